#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biphoton/emccd.hpp"
#include "biphoton/fft2.hpp"
#include "biphoton/grid.hpp"

namespace biphoton {

enum class XcorrMode { Naive, Fast };

// Linear (zero-padded, non-circular) cross-correlation restricted to the lag
// window |dx| <= lag_x, |dy| <= lag_y, with the sign convention
// C(d) = sum_r a(r + d) * b(r). Output entry (dy + lag_y, dx + lag_x).
// Fast mode pads to a friendly FFT size >= frame + lag so the circular
// product equals the linear one on the kept window.
GridD xcorr_lags(const GridD& a, const GridD& b, int lag_x, int lag_y,
                 XcorrMode mode = XcorrMode::Fast);

// Minus-coordinate-projected correlation image with its lag window and
// provenance. lag_values(dy + lag_y, dx + lag_x) = Gamma(dx, dy).
struct CorrelationImage {
  GridD lag_values;
  int lag_x = 0;
  int lag_y = 0;
  std::int64_t frames = 0;
  std::string interpolation = "off";
  bool overlap_corrected = false;
  std::string provenance;

  double at(int dx, int dy) const { return lag_values(dy + lag_y, dx + lag_x); }
  double& at(int dx, int dy) { return lag_values(dy + lag_y, dx + lag_x); }
};

// Streaming accumulator for the covariance estimator: per frame it adds the
// same-frame product term, and the consecutive-frame product term against the
// held previous frame. Single-stream use is strictly sequential; parallel
// runs split the stack into chunks that overlap by exactly one frame, feed
// that boundary frame through prime(), and merge in a fixed order.
class CorrAccumulator {
 public:
  CorrAccumulator(int width, int height, int lag_x, int lag_y,
                  XcorrMode mode = XcorrMode::Fast);

  // Boundary frame for a chunk: becomes the held previous frame (cross term
  // only), without counting toward the same-frame sum.
  void prime(const GridD& frame);

  void accumulate(const GridD& frame);
  void accumulate(const Frame& frame) { accumulate(frame.as_double()); }

  // Adds another accumulator produced under the one-frame-overlap contract.
  void merge(const CorrAccumulator& other);

  CorrelationImage finalize() const;  // needs >= 2 frames

  std::int64_t frames_seen() const { return frames_; }
  std::int64_t cross_pairs() const { return cross_pairs_; }
  int lag_x() const { return lag_x_; }
  int lag_y() const { return lag_y_; }
  int width() const { return width_; }
  int height() const { return height_; }

 private:
  void accumulate_fast(const GridD& frame, bool count_frame);
  void accumulate_naive(const GridD& frame, bool count_frame);

  int width_, height_, lag_x_, lag_y_;
  XcorrMode mode_;
  GridD auto_sum_, cross_sum_;
  std::int64_t frames_ = 0;
  std::int64_t cross_pairs_ = 0;
  bool has_prev_ = false;

  // fast path state
  int padded_ = 0;
  Fft2 fft_;
  GridC spec_cur_, spec_prev_, work_;
  // naive path state
  GridD prev_frame_;
};

enum class InterpMode { Off, Paper, FullColumn };

// Replaces the lag cells the detector cannot measure faithfully: the
// same-pixel variance spike at (0,0) and the vertical-crosstalk cells at
// (0,+-1) in paper mode, or the whole dx = 0 column in full-column mode,
// using the mean of the row neighbours at dx = +-1.
CorrelationImage interpolate_artifacts(CorrelationImage img, InterpMode mode);

const char* interp_mode_name(InterpMode mode);

// Small-ROI 4D correlation tensor, the cross-path oracle for the streaming
// estimator. Flat pixel index q = iy * nx + ix; values(q1, q2) is the
// covariance estimate between pixels q1 and q2.
struct G2Tensor {
  Eigen::MatrixXd values;
  int nx = 0;
  int ny = 0;
  std::int64_t frames = 0;

  double at(int ix1, int iy1, int ix2, int iy2) const {
    return values(iy1 * nx + ix1, iy2 * nx + ix2);
  }
};

// Builds the full tensor from a frame list (ROI capped at 24x24 to guard the
// O(N^4) memory blowup).
G2Tensor g2_full(const std::vector<GridD>& frames);

// Gamma_minus(d) = sum_r G2(r + d, r); same convention as the streaming path.
GridD minus_projection(const G2Tensor& tensor, int lag_x, int lag_y);

// Gamma_plus(s) = sum_r G2(s - r, r) over absolute pixel sums; output is
// (2*ny - 1) x (2*nx - 1) with entry (sy, sx) for s in [0, 2n - 2].
GridD sum_projection(const G2Tensor& tensor);

}  // namespace biphoton
