#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "biphoton/framestack.hpp"
#include "biphoton/g2.hpp"
#include "biphoton/metrics.hpp"

namespace biphoton {

// Random-access frame provider feeding the correlation pipeline. Generated
// sources are pure functions of the frame index and can serve chunks on any
// thread; file-backed sources are sequential.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::int64_t count() const = 0;
  virtual Frame frame(std::int64_t index) const = 0;
  virtual bool parallel_safe() const { return false; }
  virtual int width() const = 0;
  virtual int height() const = 0;
};

// Monte Carlo source: frames materialize on demand from the per-frame RNG
// streams, so any subrange is reproducible in isolation.
class SimFrameSource : public FrameSource {
 public:
  SimFrameSource(SourceSpec spec, MediumSpec medium, DetectorSpec det,
                 std::int64_t frame_count, SamplerMode mode = SamplerMode::Tabulated);

  std::int64_t count() const override { return frame_count_; }
  Frame frame(std::int64_t index) const override;
  bool parallel_safe() const override { return true; }
  int width() const override { return spec_.optics.roi_nx; }
  int height() const override { return spec_.optics.roi_ny; }

  const SourceSpec& spec() const { return spec_; }
  const MinusSampler& sampler() const { return sampler_; }

  // ROI acceptance probe: fraction of generated photons that land inside the
  // ROI (no medium), estimated from a fixed-seed batch of pairs.
  double roi_acceptance(std::int64_t pairs = 100000) const;

 private:
  SourceSpec spec_;
  MediumSpec medium_;
  DetectorSpec det_;
  std::int64_t frame_count_;
  MinusSampler sampler_;
};

class FileFrameSource : public FrameSource {
 public:
  explicit FileFrameSource(const std::string& path);

  std::int64_t count() const override { return reader_->frame_count(); }
  Frame frame(std::int64_t index) const override { return reader_->read_frame(index); }
  int width() const override { return static_cast<int>(reader_->header().width); }
  int height() const override { return static_cast<int>(reader_->header().height); }
  const StackHeader& header() const { return reader_->header(); }

 private:
  std::unique_ptr<FrameStackReader> reader_;  // mutable seek state
};

struct PipelineOptions {
  int lag_x = 64;
  int lag_y = 64;
  InterpMode interp = InterpMode::Paper;
  XcorrMode mode = XcorrMode::Fast;
  // Per-lag overlap normalization: lag d only has (W-|dx|)(H-|dy|) pixel
  // pairs inside the ROI, so pairs straddling the boundary depress the raw
  // sum at large lags. Rescaling to the zero-lag overlap makes peak values
  // comparable across lags and ROI sizes.
  bool overlap_correction = true;
  // Fixed chunk count for the merge-based reduction. The chunking (not the
  // thread count) determines the floating-point grouping, so results are
  // byte-stable for any thread count.
  int chunks = 4;
  int threads = 1;
};

// Correlation image over frames [begin, end): chunked accumulation with the
// one-frame-overlap contract, fixed-order merge, then interpolation.
CorrelationImage run_correlation(const FrameSource& source, std::int64_t begin,
                                 std::int64_t end, const PipelineOptions& opts);

// B disjoint contiguous batches of K frames, full pipeline per batch, peak
// statistic at `center`. When `mean_image` is given it receives the average
// of the per-batch correlation images (for peak-position and SNR checks).
XiMeasurement batch_xi(const FrameSource& source, int batches, std::int64_t frames_per_batch,
                       const PipelineOptions& opts, LagCenter center, int halfwidth,
                       PeakMetric metric, CorrelationImage* mean_image = nullptr);

// Mean frame (the intensity image), computed over [begin, end).
GridD intensity_image(const FrameSource& source, std::int64_t begin, std::int64_t end);

// Null-test estimator: both products are taken across independently shuffled
// frame orders, so genuine same-frame coincidences never pair up and the
// result is accidentals-only noise around zero.
CorrelationImage shuffled_null_correlation(const FrameSource& source,
                                           const PipelineOptions& opts,
                                           std::uint64_t shuffle_seed);

}  // namespace biphoton
