#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/metrics.hpp"
#include "biphoton/pipeline.hpp"
#include "biphoton/presets.hpp"

namespace biphoton {

// ----------------------------------------------------------------------
// Experiment configuration (INI-style text, see parse_config)

struct TaskConfig {
  std::vector<double> lambda_list_mm;  // grating periods for curve tasks
  int batches = 4;
  std::int64_t frames_per_batch = 1000;
  int lag_window = 56;  // lag half-size, both axes
  InterpMode interp = InterpMode::Paper;
  PeakMetric metric = PeakMetric::Height;
  int xi_halfwidth = 4;
  bool include_zero_point = true;
  // alpha calibration
  int alpha_points = 9;
  double alpha_span_rad = 3.141592653589793;
  double alpha_true_rad = 0.0;  // planted hardware offset (simulation input)
  double alpha_period_mm = 0.3;
  // area fits
  int intensity_roi = 384;
  std::int64_t intensity_frames = 300;
};

struct ExperimentConfig {
  std::string optics_preset = "custom";  // config1 | config2 | custom
  OpticsConfig optics;
  double pair_rate_hz = presets::kPairRateHz;
  double exposure_s = presets::kExposureS;
  double eta_slm = 1.0;
  std::uint64_t seed = 1;
  std::int64_t stack_frames = 4000;  // for `simulate`
  SlmMask mask;
  std::string medium_name = "none";  // preset name or "custom"
  MediumSpec medium;
  DetectorSpec detector;
  TaskConfig task;
  std::string out_dir = "out";
  int threads = 0;  // 0 = hardware concurrency

  SourceSpec source_spec() const;
  PipelineOptions pipeline_options() const;
};

// Parses the sectioned key-value format; unknown keys and range violations
// raise ConfigError with the offending line number. Missing keys take the
// documented defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Full round-trippable serialization (parse(serialize(c)) == c).
std::string serialize_config(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// ----------------------------------------------------------------------
// Reusable runners (the acceptance suite drives these directly)

struct CurveSpec {
  OpticsConfig optics;
  double pair_rate_hz = presets::kPairRateHz;
  double exposure_s = presets::kExposureS;
  double eta_slm = presets::kEtaSlmStar;
  std::uint64_t seed = 1;
  MediumSpec medium;
  DetectorSpec detector;
  std::vector<double> lambdas_mm;
  int batches = 4;
  std::int64_t frames_per_batch = 1000;
  PipelineOptions pipeline;
  int xi_halfwidth = 4;
  PeakMetric metric = PeakMetric::Height;
  bool include_zero_point = false;
};

struct CurvePointDetail {
  RatioPoint point;
  XiMeasurement xi;
};

struct CurveResult {
  RatioCurve curve;
  XiMeasurement xi0;
  std::vector<CurvePointDetail> details;
};

// One ratio curve: a flat-mask reference measurement plus one grating
// measurement per period, common source streams across points.
CurveResult compute_ratio_curve(const CurveSpec& spec);

// Single-mask batched peak measurement (building block for scans).
XiMeasurement measure_xi(const CurveSpec& spec, const SlmMask& mask, LagCenter center,
                         std::uint64_t seed_offset = 0);

struct AlphaScanSpec {
  OpticsConfig optics;
  double pair_rate_hz = presets::kPairRateHz;
  double exposure_s = presets::kExposureS;
  std::uint64_t seed = 1;
  DetectorSpec detector;
  double period_mm = 0.3;
  double true_offset_rad = 0.0;
  int points = 9;
  double span_rad = 3.141592653589793;
  int batches = 4;
  std::int64_t frames_per_batch = 1000;
  PipelineOptions pipeline;
  int xi_halfwidth = 4;
};

struct AlphaScanResult {
  std::vector<AlphaPoint> table;
  AlphaPick pick;
};

// Sweeps programmed shifts over [-span/2, span/2]; the effective grating
// shift is (true_offset - programmed), so the zero-order minimum recovers the
// planted offset.
AlphaScanResult run_alpha_scan(const AlphaScanSpec& spec);

struct AreaFitSpec {
  OpticsConfig optics;  // roi = correlation-image ROI
  double pair_rate_hz = presets::kPairRateHz;
  double exposure_s = presets::kExposureS;
  std::uint64_t seed = 1;
  DetectorSpec detector;
  int intensity_roi = 384;
  std::int64_t intensity_frames = 300;
  int batches = 1;
  std::int64_t frames_per_batch = 4000;
  PipelineOptions pipeline;
};

struct AreaFitResult {
  GaussianFit intensity;    // variance_sample_mm2 estimates the beam area
  GaussianFit correlation;  // variance_sample_mm2 estimates the entanglement area
};

AreaFitResult run_area_fits(const AreaFitSpec& spec);

// ----------------------------------------------------------------------
// Presets, CSV/manifest emission, CLI entry points

enum class PresetId { Fig2b, Fig3a, Fig3b, Fig3c, Fig3d, Fig4a, FigS2, FigS4, FigS5 };

std::optional<PresetId> parse_preset_id(const std::string& name);
const char* preset_name(PresetId id);
std::vector<PresetId> all_presets();

struct RunOptions {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 0;
  bool paper_scale = false;  // full 150x150 ROI budgets
  bool emit_stacks = false;  // also write the BPF1 stacks
  int batches_override = 0;
  std::int64_t frames_override = 0;
};

// Runs a preset bundle; emits CSVs and a manifest with config serialization,
// seed and SHA-256 of every artifact. Returns the list of written files.
std::vector<std::string> run_preset(PresetId id, const RunOptions& opts);

// `simulate`: writes a BPF1 stack (plus manifest) per the config.
std::string run_simulate(const ExperimentConfig& cfg);

struct AnalyzeOptions {
  int lag_window = 56;
  InterpMode interp = InterpMode::Paper;
  int xi_halfwidth = 4;
  PeakMetric metric = PeakMetric::Height;
  int peak_dx = 0;  // expected positive-peak lag; 0 = only the central peak
  bool fit = false;
  bool shuffle_diagnostic = false;
  std::uint64_t shuffle_seed = 1;
  int threads = 0;
};

// `analyze`: correlation image + xi report (+ optional Gaussian fit) from an
// existing stack file.
std::vector<std::string> run_analyze(const std::string& stack_path,
                                     const AnalyzeOptions& opts,
                                     const std::string& out_dir);

// `report`: human-readable summary of a run directory's manifest.
std::string summarize_run(const std::string& out_dir);

// CSV / text helpers shared by the CLI and tests.
std::string format_double(double v);
void write_text_atomic(const std::string& path, const std::string& content);
std::string ratio_curve_csv(const RatioCurve& curve);
std::string correlation_csv(const CorrelationImage& img);
std::string correlation_sidecar(const CorrelationImage& img, const std::string& extra);

}  // namespace biphoton
