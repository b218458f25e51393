#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biphoton/g2.hpp"
#include "biphoton/optics.hpp"

namespace biphoton {

// Peak statistic: the window maximum is the primary definition; the window
// sum ("area") is the sanctioned alternative that tracks the same trends
// with better statistics.
enum class PeakMetric { Height, Area };

struct LagCenter {
  int dx = 0;
  int dy = 0;
};

// Expected correlation-peak centre in lag pixels for a mask: (0, 0) for
// unsplit masks, +lambda*f/period mapped through magnification and pitch for
// the positive grating order.
LagCenter expected_peak_center(const SlmMask& mask, const OpticsConfig& cfg);

// Peak statistic inside the (2w+1)^2 window around `center`; throws if the
// window is clipped by the lag grid. Interpolation must already be applied.
double extract_xi(const CorrelationImage& img, LagCenter center, int halfwidth,
                  PeakMetric metric = PeakMetric::Height);

// One batched peak measurement: per-batch values, their mean and the
// standard error (sample std over batches / sqrt(batch count)).
struct XiMeasurement {
  std::vector<double> batch_values;
  double mean = 0.0;
  double stderr_mean = 0.0;
  LagCenter center;
  int halfwidth = 0;
  std::int64_t frames_per_batch = 0;

  static XiMeasurement from_batches(std::vector<double> values, LagCenter center,
                                    int halfwidth, std::int64_t frames_per_batch);
};

struct RatioWithError {
  double ratio = 0.0;
  double error = 0.0;  // linear-sum propagation, as reported
};

// ratio = xi/xi0 with the linear-sum error propagation
// d(ratio) = ratio * (dxi0/xi0 + dxi/xi). Throws on non-positive xi or xi0.
RatioWithError ratio_with_error(double xi, double dxi, double xi0, double dxi0);

// Conventional quadrature propagation, offered for diagnostics only.
double ratio_error_quadrature(double xi, double dxi, double xi0, double dxi0);

struct RatioPoint {
  double delta_x_um = 0.0;
  double ratio = 0.0;
  double ratio_err = 0.0;
  double lambda_um = 0.0;  // grating period (0 for the reference point)
  std::int64_t frames = 0;
  std::string flags = "ok";
};

struct RatioCurve {
  std::vector<RatioPoint> points;  // sorted by delta_x
};

struct GaussianFit {
  double amplitude = 0.0;
  double center_x_mm = 0.0;
  double center_y_mm = 0.0;
  double variance_mm2 = 0.0;         // camera-plane fit variance
  double variance_sample_mm2 = 0.0;  // divided by magnification^2
  double offset = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Least-squares fit of A*exp(-((x-x0)^2+(y-y0)^2)/(2V)) + c to an image whose
// cells sit at pixel_scale_mm spacing (camera plane). Gauss-Newton with
// Levenberg damping, moment initialization; relative step < 1e-8 or 200
// iterations. Throws PipelineError with the residual report on failure.
GaussianFit fit_gaussian_variance(const GridD& image, double pixel_scale_mm,
                                  double magnification);

struct AlphaPoint {
  double alpha_rad = 0.0;
  double xi_zero_order = 0.0;
  double stderr_mean = 0.0;
};

struct AlphaPick {
  double alpha_star = 0.0;
  std::size_t index = 0;
};

// argmin of the zero-order statistic over the scanned shifts, ties broken
// toward the smallest |alpha|. Errors out when the table is flat within its
// own noise (advising more frames).
AlphaPick pick_alpha(const std::vector<AlphaPoint>& table);

}  // namespace biphoton
