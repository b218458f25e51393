#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/experiment.hpp"

using namespace biphoton;

namespace {

// Sharp desk-scale configuration: correlation peak sigma of 2 camera pixels,
// so statistical tests resolve quickly.
OpticsConfig sharp_optics(int roi) {
  OpticsConfig cfg;
  cfg.wavelength_nm = 814.0;
  cfg.focal_mm = 50.0;
  cfg.entanglement_area_mm2 = 2.56e-4;  // (2 px * 8 um)^2
  cfg.beam_area_mm2 = 0.25;
  cfg.slm_corr_width_mm = 0.34;
  cfg.magnification = 2.0;
  cfg.pixel_pitch_um = 16.0;
  cfg.roi_nx = cfg.roi_ny = roi;
  return cfg;
}

SourceSpec sharp_source(const SlmMask& mask, int roi, std::uint64_t seed) {
  SourceSpec spec;
  spec.pair_rate_hz = 3e6;
  spec.exposure_s = 2e-3;
  spec.eta_slm = 1.0;
  spec.mask = mask;
  spec.optics = sharp_optics(roi);
  spec.seed = seed;
  return spec;
}

DetectorSpec clean_detector() {
  DetectorSpec det;
  det.eta_q = 0.9;
  det.gain = 1000.0;
  det.read_noise = 5.0;
  det.bias = 100.0;
  det.smear_beta = 0.0;
  det.stray_rate = 0.0;
  return det;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("chunked reduction is deterministic and matches a single pass") {
  const SimFrameSource source(sharp_source(SlmMask::flat(), 32, 5), MediumSpec{},
                              clean_detector(), 64);
  PipelineOptions single;
  single.lag_x = single.lag_y = 8;
  single.chunks = 1;
  single.interp = InterpMode::Off;
  const CorrelationImage ref = run_correlation(source, 0, 64, single);

  PipelineOptions chunked = single;
  chunked.chunks = 4;
  const CorrelationImage a = run_correlation(source, 0, 64, chunked);
  CHECK((a.lag_values - ref.lag_values).abs().maxCoeff() <=
        1e-12 * ref.lag_values.abs().maxCoeff());

  // thread count does not change the bytes (chunking fixed at 4)
  PipelineOptions threaded = chunked;
  threaded.threads = 2;
  const CorrelationImage b = run_correlation(source, 0, 64, threaded);
  CHECK((a.lag_values - b.lag_values).abs().maxCoeff() == 0.0);
}

TEST_CASE("flat-mask stack yields a single central peak with SNR > 5") {
  const SimFrameSource source(sharp_source(SlmMask::flat(), 48, 21), MediumSpec{},
                              clean_detector(), 800);
  PipelineOptions opts;
  opts.lag_x = opts.lag_y = 16;
  const CorrelationImage img = run_correlation(source, 0, 800, opts);

  // noise from lag cells away from the peak
  double sum = 0.0, sum2 = 0.0;
  int count = 0;
  for (int dy = -16; dy <= 16; ++dy)
    for (int dx = -16; dx <= 16; ++dx) {
      if (std::abs(dx) < 6 && std::abs(dy) < 6) continue;
      sum += img.at(dx, dy);
      sum2 += img.at(dx, dy) * img.at(dx, dy);
      ++count;
    }
  const double mean = sum / count;
  const double sd = std::sqrt(sum2 / count - mean * mean);
  const double xi0 = extract_xi(img, {0, 0}, 2, PeakMetric::Height);
  CHECK(xi0 > 5.0 * sd);

  // the peak is the global maximum and sits at the origin
  int bx = 0, by = 0;
  double best = -1e300;
  for (int dy = -16; dy <= 16; ++dy)
    for (int dx = -16; dx <= 16; ++dx)
      if (img.at(dx, dy) > best) {
        best = img.at(dx, dy);
        bx = dx;
        by = dy;
      }
  CHECK(std::abs(bx) <= 1);
  CHECK(std::abs(by) <= 1);
}

TEST_CASE("grating stack yields two symmetric peaks at the order lags") {
  const OpticsConfig cfg = sharp_optics(64);
  const double lambda = period_for_separation_mm(0.192, cfg);  // +-12 px
  const SimFrameSource source(sharp_source(SlmMask::grating(lambda), 64, 23), MediumSpec{},
                              clean_detector(), 1200);
  PipelineOptions opts;
  opts.lag_x = opts.lag_y = 20;
  const CorrelationImage img = run_correlation(source, 0, 1200, opts);

  const LagCenter c = expected_peak_center(SlmMask::grating(lambda), cfg);
  CHECK(c.dx == 12);
  const double plus = extract_xi(img, c, 2, PeakMetric::Height);
  const double minus = extract_xi(img, {-c.dx, 0}, 2, PeakMetric::Height);
  const double centre = extract_xi(img, {0, 0}, 1, PeakMetric::Height);
  CHECK(plus > 2.0 * centre);  // eta_slm = 1: no zero-order peak
  // centrosymmetry: both first-order peaks agree within noise
  CHECK(plus == doctest::Approx(minus).epsilon(0.25));
}

TEST_CASE("batch stderr shrinks like 1/sqrt(K)") {
  // CLT scaling across replicate simulations: doubling the frames per batch
  // reduces the standard error by about sqrt(2).
  std::vector<double> ratio;
  for (std::uint64_t rep = 0; rep < 6; ++rep) {
    SourceSpec src = sharp_source(SlmMask::flat(), 32, 100 + rep);
    const SimFrameSource source(src, MediumSpec{}, clean_detector(), 1800);
    PipelineOptions opts;
    opts.lag_x = opts.lag_y = 8;
    const XiMeasurement small =
        batch_xi(source, 4, 150, opts, {0, 0}, 2, PeakMetric::Area);
    const XiMeasurement big =
        batch_xi(source, 4, 300, opts, {0, 0}, 2, PeakMetric::Area);
    if (big.stderr_mean > 0.0) ratio.push_back(small.stderr_mean / big.stderr_mean);
  }
  double mean = 0.0;
  for (double r : ratio) mean += r;
  mean /= ratio.size();
  CHECK(mean == doctest::Approx(std::sqrt(2.0)).epsilon(0.45));
}

TEST_CASE("persistence fidelity: stack file replays the in-memory pipeline") {
  const SourceSpec src = sharp_source(SlmMask::flat(), 32, 77);
  const DetectorSpec det = clean_detector();
  const std::string path = temp_path("bp_pipe_roundtrip.bpf1");
  simulate_stack(src, MediumSpec{}, det, 120, path);

  PipelineOptions opts;
  opts.lag_x = opts.lag_y = 8;
  const SimFrameSource mem(src, MediumSpec{}, det, 120);
  const FileFrameSource file(path);
  const CorrelationImage a = run_correlation(mem, 0, 120, opts);
  const CorrelationImage b = run_correlation(file, 0, 120, opts);
  CHECK((a.lag_values - b.lag_values).abs().maxCoeff() == 0.0);

  // batched xi agrees too
  const XiMeasurement xa = batch_xi(mem, 4, 30, opts, {0, 0}, 2, PeakMetric::Height);
  const XiMeasurement xb = batch_xi(file, 4, 30, opts, {0, 0}, 2, PeakMetric::Height);
  CHECK(xa.mean == xb.mean);
  CHECK(xa.stderr_mean == xb.stderr_mean);
}

TEST_CASE("shuffled pairing nulls the genuine peak") {
  const SimFrameSource source(sharp_source(SlmMask::flat(), 32, 31), MediumSpec{},
                              clean_detector(), 500);
  PipelineOptions opts;
  opts.lag_x = opts.lag_y = 8;
  const CorrelationImage normal = run_correlation(source, 0, 500, opts);
  const CorrelationImage null = shuffled_null_correlation(source, opts, 9);

  const double sd =
      std::sqrt((null.lag_values - null.lag_values.mean()).square().mean());
  CHECK(normal.at(0, 0) > 5.0 * sd);   // genuine peak present normally
  CHECK(std::abs(null.at(0, 0)) < 4.5 * sd);  // and gone under shuffling
}

TEST_CASE("smear produces the central-column artifact; full-column interp removes it") {
  const OpticsConfig cfg = sharp_optics(48);
  const double lambda = period_for_separation_mm(0.192, cfg);  // peaks at +-12 px
  DetectorSpec det = clean_detector();
  det.smear_beta = 1e-3;
  const SimFrameSource source(sharp_source(SlmMask::grating(lambda), 48, 41), MediumSpec{},
                              det, 1500);
  PipelineOptions opts;
  opts.lag_x = opts.lag_y = 16;
  opts.interp = InterpMode::Off;
  const CorrelationImage raw = run_correlation(source, 0, 1500, opts);

  // per-column means; exclude the two genuine peaks at dx = +-12
  auto column_mean = [&](const CorrelationImage& img, int dx) {
    double sum = 0.0;
    for (int dy = -16; dy <= 16; ++dy) sum += img.at(dx, dy);
    return sum / 33.0;
  };
  auto column_stats = [&](const CorrelationImage& img) {
    // off-column reference: columns 3..8 on both sides
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (int adx = 3; adx <= 8; ++adx)
      for (int s : {-1, 1}) {
        const double m = column_mean(img, s * adx);
        sum += m;
        sum2 += m * m;
        ++n;
      }
    const double mean = sum / n;
    return std::pair<double, double>(mean, std::sqrt(sum2 / n - mean * mean));
  };

  const double raw_centre_ex = column_mean(raw, 0) - raw.at(0, 0) / 33.0;
  const auto [off_mean, off_sd] = column_stats(raw);
  // smear column clearly elevated before interpolation (same-pixel spike at
  // (0,0) excluded from the column average)
  CHECK(raw_centre_ex > 3.0 * std::abs(off_mean));
  CHECK(raw_centre_ex > off_mean + 3.0 * off_sd);

  const CorrelationImage fixed = interpolate_artifacts(raw, InterpMode::FullColumn);
  const auto [fixed_off_mean, fixed_off_sd] = column_stats(fixed);
  CHECK(std::abs(column_mean(fixed, 0) - fixed_off_mean) < 2.0 * fixed_off_sd);
}

TEST_CASE("frame source bounds are enforced") {
  const SimFrameSource source(sharp_source(SlmMask::flat(), 32, 3), MediumSpec{},
                              clean_detector(), 16);
  PipelineOptions opts;
  opts.lag_x = opts.lag_y = 4;
  CHECK_THROWS_AS(run_correlation(source, 0, 17, opts), PipelineError);
  CHECK_THROWS_AS(run_correlation(source, 4, 5, opts), PipelineError);
  CHECK_THROWS_AS(batch_xi(source, 4, 8, opts, {0, 0}, 1, PeakMetric::Height),
                  ConfigError);
}
