#include "biphoton/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>

#include "biphoton/errors.hpp"

namespace biphoton {

SimFrameSource::SimFrameSource(SourceSpec spec, MediumSpec medium, DetectorSpec det,
                               std::int64_t frame_count, SamplerMode mode)
    : spec_(std::move(spec)),
      medium_(std::move(medium)),
      det_(det),
      frame_count_(frame_count),
      sampler_(build_minus_sampler(spec_.mask, spec_.optics, spec_.eta_slm, mode)) {
  spec_.validate();
  medium_.validate();
  det_.validate();
  if (frame_count_ < 2) throw ConfigError("frame source needs at least 2 frames");
}

Frame SimFrameSource::frame(std::int64_t index) const {
  return simulate_frame(spec_, sampler_, medium_, det_, index);
}

double SimFrameSource::roi_acceptance(std::int64_t pairs) const {
  Stream rng = derive_stream(spec_.seed, 0xacce97ull);
  std::int64_t in = 0, total = 0;
  for (std::int64_t i = 0; i < pairs; ++i) {
    const PairEvent pair = sample_pair(sampler_, spec_.optics, rng);
    for (const Vec2& r : {pair.r1, pair.r2}) {
      ++total;
      if (project_to_pixels(r, spec_.optics)) ++in;
    }
  }
  return static_cast<double>(in) / static_cast<double>(total);
}

FileFrameSource::FileFrameSource(const std::string& path)
    : reader_(std::make_unique<FrameStackReader>(path)) {}

namespace {

struct ChunkRange {
  std::int64_t begin;
  std::int64_t end;
};

std::vector<ChunkRange> split_chunks(std::int64_t begin, std::int64_t end, int chunks) {
  const std::int64_t n = end - begin;
  const int k = static_cast<int>(std::min<std::int64_t>(chunks, std::max<std::int64_t>(1, n / 2)));
  std::vector<ChunkRange> out;
  std::int64_t start = begin;
  for (int i = 0; i < k; ++i) {
    const std::int64_t len = n / k + (i < n % k ? 1 : 0);
    out.push_back({start, start + len});
    start += len;
  }
  return out;
}

}  // namespace

CorrelationImage run_correlation(const FrameSource& source, std::int64_t begin,
                                 std::int64_t end, const PipelineOptions& opts) {
  if (begin < 0 || end > source.count() || end - begin < 2)
    throw PipelineError("correlation run needs at least 2 frames within the stack");

  const auto ranges = split_chunks(begin, end, opts.chunks);
  std::vector<std::unique_ptr<CorrAccumulator>> accs(ranges.size());

  auto run_chunk = [&](std::size_t i) {
    auto acc = std::make_unique<CorrAccumulator>(source.width(), source.height(),
                                                 opts.lag_x, opts.lag_y, opts.mode);
    // One-frame overlap: the previous chunk's last frame feeds only the
    // cross term of this chunk.
    if (ranges[i].begin > begin) acc->prime(source.frame(ranges[i].begin - 1).as_double());
    for (std::int64_t m = ranges[i].begin; m < ranges[i].end; ++m)
      acc->accumulate(source.frame(m).as_double());
    accs[i] = std::move(acc);
  };

  const int threads = std::max(1, opts.threads);
  if (threads > 1 && source.parallel_safe() && ranges.size() > 1) {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    for (int t = 0; t < std::min<int>(threads, static_cast<int>(ranges.size())); ++t) {
      pool.emplace_back([&] {
        try {
          for (std::size_t i = next.fetch_add(1); i < ranges.size(); i = next.fetch_add(1))
            run_chunk(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  } else {
    for (std::size_t i = 0; i < ranges.size(); ++i) run_chunk(i);
  }

  // Fixed left-to-right merge order keeps the reduction deterministic.
  for (std::size_t i = 1; i < ranges.size(); ++i) accs[0]->merge(*accs[i]);
  CorrelationImage img = accs[0]->finalize();
  if (opts.overlap_correction) {
    const double w = source.width(), h = source.height();
    for (int dy = -opts.lag_y; dy <= opts.lag_y; ++dy)
      for (int dx = -opts.lag_x; dx <= opts.lag_x; ++dx)
        img.at(dx, dy) *= w * h / ((w - std::abs(dx)) * (h - std::abs(dy)));
    img.overlap_corrected = true;
  }
  return interpolate_artifacts(std::move(img), opts.interp);
}

XiMeasurement batch_xi(const FrameSource& source, int batches, std::int64_t frames_per_batch,
                       const PipelineOptions& opts, LagCenter center, int halfwidth,
                       PeakMetric metric, CorrelationImage* mean_image) {
  if (batches < 1 || frames_per_batch < 2)
    throw ConfigError("batched xi needs >= 1 batch of >= 2 frames");
  if (static_cast<std::int64_t>(batches) * frames_per_batch > source.count())
    throw ConfigError("stack too short: " + std::to_string(source.count()) + " frames for " +
                      std::to_string(batches) + " x " + std::to_string(frames_per_batch));
  std::vector<double> values;
  for (int b = 0; b < batches; ++b) {
    const std::int64_t begin = static_cast<std::int64_t>(b) * frames_per_batch;
    CorrelationImage img = run_correlation(source, begin, begin + frames_per_batch, opts);
    values.push_back(extract_xi(img, center, halfwidth, metric));
    if (mean_image) {
      if (b == 0) {
        *mean_image = img;
      } else {
        mean_image->lag_values += img.lag_values;
        mean_image->frames += img.frames;
      }
    }
  }
  if (mean_image) mean_image->lag_values /= static_cast<double>(batches);
  return XiMeasurement::from_batches(std::move(values), center, halfwidth, frames_per_batch);
}

GridD intensity_image(const FrameSource& source, std::int64_t begin, std::int64_t end) {
  if (begin < 0 || end > source.count() || end <= begin)
    throw PipelineError("intensity image needs a non-empty frame range");
  GridD sum = GridD::Zero(source.height(), source.width());
  for (std::int64_t m = begin; m < end; ++m) sum += source.frame(m).as_double();
  return sum / static_cast<double>(end - begin);
}

CorrelationImage shuffled_null_correlation(const FrameSource& source,
                                           const PipelineOptions& opts,
                                           std::uint64_t shuffle_seed) {
  const std::int64_t n = source.count();
  if (n < 2) throw PipelineError("shuffled null test needs at least 2 frames");

  auto permutation = [&](std::uint64_t key) {
    std::vector<std::int64_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    Stream rng = derive_stream(shuffle_seed, key);
    for (std::int64_t i = n - 1; i > 0; --i) {
      const std::int64_t j =
          static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(p[i], p[j]);
    }
    return p;
  };
  const auto p1 = permutation(1);
  const auto p2 = permutation(2);

  GridD term1 = GridD::Zero(2 * opts.lag_y + 1, 2 * opts.lag_x + 1);
  GridD term2 = term1;
  for (std::int64_t m = 0; m < n; ++m) {
    const GridD a = source.frame(p1[m]).as_double();
    const GridD b = source.frame(p2[m]).as_double();
    term1 += xcorr_lags(a, b, opts.lag_x, opts.lag_y, opts.mode);
    if (m + 1 < n)
      term2 += xcorr_lags(a, source.frame(p1[m + 1]).as_double(), opts.lag_x, opts.lag_y,
                          opts.mode);
  }
  CorrelationImage img;
  img.lag_x = opts.lag_x;
  img.lag_y = opts.lag_y;
  img.frames = n;
  img.lag_values =
      term1 / static_cast<double>(n) - term2 / static_cast<double>(n - 1);
  img.provenance = "shuffled-null";
  if (opts.overlap_correction) {
    const double w = source.width(), h = source.height();
    for (int dy = -opts.lag_y; dy <= opts.lag_y; ++dy)
      for (int dx = -opts.lag_x; dx <= opts.lag_x; ++dx)
        img.at(dx, dy) *= w * h / ((w - std::abs(dx)) * (h - std::abs(dy)));
    img.overlap_corrected = true;
  }
  return interpolate_artifacts(std::move(img), opts.interp);
}

}  // namespace biphoton
