#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "biphoton/errors.hpp"
#include "biphoton/experiment.hpp"

using namespace biphoton;

namespace {

std::string temp_dir(const char* name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(p);
  return p.string();
}

OpticsConfig sharp_optics(int roi) {
  OpticsConfig cfg;
  cfg.entanglement_area_mm2 = 2.56e-4;
  cfg.beam_area_mm2 = 0.25;
  cfg.roi_nx = cfg.roi_ny = roi;
  return cfg;
}

DetectorSpec clean_detector() {
  DetectorSpec det;
  det.eta_q = 0.9;
  det.read_noise = 5.0;
  det.smear_beta = 0.0;
  return det;
}

}  // namespace

TEST_CASE("config: preset config1 materializes the measured constants") {
  const ExperimentConfig cfg = parse_config("[optics]\npreset = config1\n");
  CHECK(cfg.optics.entanglement_area_mm2 == doctest::Approx(1.72e-3));
  CHECK(cfg.optics.beam_area_mm2 == doctest::Approx(1.92));
  CHECK(cfg.optics.magnification == doctest::Approx(2.0));
  CHECK(cfg.optics.pixel_pitch_um == doctest::Approx(16.0));
  CHECK(cfg.optics.wavelength_nm == doctest::Approx(814.0));
  CHECK(cfg.exposure_s == doctest::Approx(2e-3));

  const ExperimentConfig cfg2 = parse_config("[optics]\npreset = config2\n");
  CHECK(cfg2.optics.entanglement_area_mm2 == doctest::Approx(69.2e-6));
  CHECK(cfg2.optics.beam_area_mm2 == doctest::Approx(0.0432));
  CHECK(cfg2.optics.magnification == doctest::Approx(10.0));
}

TEST_CASE("config: range errors cite the line") {
  try {
    parse_config("[optics]\npreset = config1\nentanglement_area_mm2 = -1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("entanglement_area_mm2") != std::string::npos);
  }
}

TEST_CASE("config: unknown keys are rejected, not defaulted") {
  try {
    parse_config("[optics]\nmagnifcation = 2\n");  // typo
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("magnifcation") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[optic]\nroi = 64\n"), ConfigError);
}

TEST_CASE("config: serialize/parse round trip") {
  const std::string text =
      "[optics]\n"
      "preset = config1\n"
      "roi = 64\n"
      "[source]\n"
      "pair_rate_hz = 2.5e6\n"
      "seed = 42\n"
      "[mask]\n"
      "kind = grating\n"
      "period_mm = 0.5\n"
      "alpha_rad = 0.1\n"
      "[medium]\n"
      "elements = etpa(strength=0.25,width_mm=0.05) | loss(t=0.8)\n"
      "[task]\n"
      "lambda_list_mm = 2.0,1.0,0.5\n"
      "frames_per_batch = 250\n"
      "metric = area\n"
      "[run]\n"
      "out = /tmp/bp_run\n";
  const ExperimentConfig cfg = parse_config(text);
  CHECK(cfg.pair_rate_hz == doctest::Approx(2.5e6));
  CHECK(cfg.seed == 42);
  CHECK(cfg.mask.kind == SlmMask::Kind::Grating);
  CHECK(cfg.medium.elements.size() == 2);
  CHECK(cfg.task.metric == PeakMetric::Area);

  const ExperimentConfig again = parse_config(serialize_config(cfg));
  CHECK(cfg == again);
  CHECK(serialize_config(cfg) == serialize_config(again));
}

TEST_CASE("config: dx list converts to grating periods") {
  const ExperimentConfig cfg = parse_config(
      "[optics]\npreset = config1\n[task]\ndx_list_um = 40\n");
  REQUIRE(cfg.task.lambda_list_mm.size() == 1);
  CHECK(peak_separation_mm(cfg.task.lambda_list_mm[0], cfg.optics) * 1e3 ==
        doctest::Approx(40.0));
  CHECK_THROWS_AS(
      parse_config("[task]\nlambda_list_mm = 1\ndx_list_um = 40\n"),
      ConfigError);
}

TEST_CASE("config: medium presets resolve against the final optics") {
  const ExperimentConfig cfg = parse_config(
      "[optics]\npreset = config2\n[medium]\npreset = rh6g\n");
  REQUIRE(cfg.medium.elements.size() == 1);
  const auto& absorber = std::get<EtpaAbsorber>(cfg.medium.elements[0]);
  CHECK(absorber.kernel_width_mm ==
        doctest::Approx(2.0 * std::sqrt(69.2e-6)));
}

TEST_CASE("ratio curve: flat-vs-flat zero point sits at 1") {
  CurveSpec spec;
  spec.optics = sharp_optics(32);
  spec.eta_slm = 1.0;
  spec.seed = 3;
  spec.detector = clean_detector();
  spec.lambdas_mm = {period_for_separation_mm(0.128, spec.optics)};  // +-8 px
  spec.batches = 4;
  spec.frames_per_batch = 200;
  spec.pipeline.lag_x = spec.pipeline.lag_y = 12;
  spec.metric = PeakMetric::Area;
  spec.include_zero_point = true;

  const CurveResult res = compute_ratio_curve(spec);
  REQUIRE(res.curve.points.size() == 2);
  const RatioPoint& zero = res.curve.points[0];
  CHECK(zero.delta_x_um == 0.0);
  CHECK(zero.ratio == doctest::Approx(1.0).epsilon(0.15));
  CHECK(std::abs(zero.ratio - 1.0) < 3.0 * zero.ratio_err + 0.1);
  // grating point: decreasing ratio, sorted by separation
  CHECK(res.curve.points[1].delta_x_um == doctest::Approx(128.0));
  CHECK(res.curve.points[1].ratio < 1.0);
}

TEST_CASE("alpha scan recovers a planted offset (quick)") {
  AlphaScanSpec spec;
  spec.optics = sharp_optics(48);
  spec.seed = 7;
  spec.detector = clean_detector();
  spec.period_mm = period_for_separation_mm(0.256, spec.optics);  // +-16 px
  spec.true_offset_rad = 0.3;
  spec.points = 5;
  spec.batches = 2;
  spec.frames_per_batch = 300;
  spec.pipeline.lag_x = spec.pipeline.lag_y = 8;
  spec.xi_halfwidth = 6;

  const AlphaScanResult res = run_alpha_scan(spec);
  REQUIRE(res.table.size() == 5);
  const double step = spec.span_rad / (spec.points - 1);
  CHECK(std::abs(res.pick.alpha_star - spec.true_offset_rad) <= step);
}

TEST_CASE("manifest verification detects tampering") {
  const std::string dir = temp_dir("bp_manifest_test");
  RunOptions opts;
  opts.seed = 5;
  opts.out_dir = dir;
  opts.threads = 2;
  opts.batches_override = 2;
  opts.frames_override = 60;
  run_preset(PresetId::FigS5, opts);

  const std::string summary = summarize_run(dir);
  CHECK(summary.find("halfplane_scan.csv") != std::string::npos);
  CHECK(summary.find("MODIFIED") == std::string::npos);
  CHECK(summary.find("0 modified, 0 missing") != std::string::npos);

  // tamper with the CSV: the report notices
  {
    std::ofstream f(std::filesystem::path(dir) / "halfplane_scan.csv", std::ios::app);
    f << "tampered\n";
  }
  const std::string after = summarize_run(dir);
  CHECK(after.find("MODIFIED") != std::string::npos);
}

TEST_CASE("preset ids round trip") {
  for (PresetId id : all_presets()) {
    const auto parsed = parse_preset_id(preset_name(id));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == id);
  }
  CHECK_FALSE(parse_preset_id("fig9z").has_value());
}

TEST_CASE("csv formatting is locale-free shortest round trip") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e-3) == "0.001");
  RatioCurve curve;
  curve.points.push_back({40.0, 0.890625, 0.0125, 2035.0, 4000, "ok"});
  const std::string csv = ratio_curve_csv(curve);
  CHECK(csv == "delta_x_um,ratio,ratio_err,lambda_um,frames,flags\n"
               "40,0.890625,0.0125,2035,4000,ok\n");
}

TEST_CASE("simulate writes a stack and analyze reproduces the pipeline") {
  const std::string dir = temp_dir("bp_sim_analyze");
  ExperimentConfig cfg;
  cfg.optics = sharp_optics(32);
  cfg.detector = clean_detector();
  cfg.seed = 11;
  cfg.stack_frames = 80;
  cfg.mask = SlmMask::flat();
  cfg.out_dir = dir;
  const std::string stack = run_simulate(cfg);
  CHECK(std::filesystem::exists(stack));

  AnalyzeOptions aopts;
  aopts.lag_window = 8;
  aopts.xi_halfwidth = 2;
  const std::string adir = temp_dir("bp_sim_analyze_out");
  const auto files = run_analyze(stack, aopts, adir);
  CHECK(files.size() == 3);
  CHECK(std::filesystem::exists(std::filesystem::path(adir) / "correlation.csv"));

  // equality against the in-memory pipeline
  const SimFrameSource mem(cfg.source_spec(), cfg.medium, cfg.detector, 80);
  PipelineOptions popts;
  popts.lag_x = popts.lag_y = 8;
  const CorrelationImage img = run_correlation(mem, 0, 80, popts);
  std::ifstream csv(std::filesystem::path(adir) / "correlation.csv");
  std::string line;
  std::getline(csv, line);
  const std::string expected_first = correlation_csv(img);
  CHECK(expected_first.substr(0, line.size()) == line);
}
