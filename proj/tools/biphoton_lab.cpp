// biphoton-lab: simulate photon-pair frame stacks, recover correlation
// images and peak-ratio curves, and run the preset experiment bundles.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "biphoton/errors.hpp"
#include "biphoton/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitPipeline = 4;

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int threads = 0;
  bool paper_scale = false;
};

biphoton::ExperimentConfig load_config(const GlobalArgs& g) {
  if (g.config_path.empty())
    throw biphoton::ConfigError("this command needs --config <file>");
  biphoton::ExperimentConfig cfg = biphoton::parse_config_file(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (g.threads > 0) cfg.threads = g.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biphoton-lab: spatially structured photon-pair correlation toolkit"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "experiment config file (INI)");
  std::uint64_t seed_value = 0;
  const auto seed_opt = app.add_option("--seed", seed_value, "override the RNG seed");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_flag("--paper-scale", g.paper_scale, "full 150x150 ROI preset budgets");

  auto* sim = app.add_subcommand("simulate", "generate a BPF1 frame stack");

  auto* analyze = app.add_subcommand("analyze", "process an existing BPF1 stack");
  std::string stack_path;
  biphoton::AnalyzeOptions aopts;
  std::string interp_name = "paper", metric_name = "height";
  bool do_shuffle = false;
  std::uint64_t shuffle_seed = 1;
  analyze->add_option("stack", stack_path, "BPF1 stack file")->required();
  analyze->add_option("--lag-window", aopts.lag_window, "lag half-size");
  analyze->add_option("--interpolation", interp_name, "paper | full-column | off");
  analyze->add_option("--metric", metric_name, "height | area");
  analyze->add_option("--xi-halfwidth", aopts.xi_halfwidth, "peak window half-size");
  analyze->add_option("--peak-dx", aopts.peak_dx, "also report the peak at this +dx lag");
  analyze->add_flag("--fit", aopts.fit, "Gaussian-fit the correlation image");
  analyze->add_flag("--shuffle-diagnostic", do_shuffle,
                    "null test: shuffle frame pairing for both estimator terms");
  analyze->add_option("--shuffle-seed", shuffle_seed, "seed for the shuffle diagnostic");

  auto* curve = app.add_subcommand("ratio-curve", "peak-ratio curve over grating periods");
  auto* calib = app.add_subcommand("calibrate-alpha", "scan grating shifts, locate the zero-order minimum");
  auto* fitareas = app.add_subcommand("fit-areas", "fit beam and correlation areas");

  auto* preset = app.add_subcommand("preset", "run a named experiment bundle");
  std::string preset_id;
  bool emit_stacks = false;
  int batches_override = 0;
  std::int64_t frames_override = 0;
  preset->add_option("id", preset_id,
                     "fig2b fig3a fig3b fig3c fig3d fig4a figS2 figS4 figS5")
      ->required();
  preset->add_flag("--emit-stacks", emit_stacks, "also write the BPF1 stacks");
  preset->add_option("--batches", batches_override, "override batches per point");
  preset->add_option("--frames-per-batch", frames_override, "override frames per batch");

  auto* report = app.add_subcommand("report", "summarize and verify a run directory");
  std::string report_dir;
  report->add_option("dir", report_dir, "run directory with manifest.txt")->required();

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (sim->parsed()) {
      const auto cfg = load_config(g);
      const std::string path = biphoton::run_simulate(cfg);
      std::cout << "wrote " << path << "\n";
    } else if (analyze->parsed()) {
      if (interp_name == "paper") {
        aopts.interp = biphoton::InterpMode::Paper;
      } else if (interp_name == "full-column") {
        aopts.interp = biphoton::InterpMode::FullColumn;
      } else if (interp_name == "off") {
        aopts.interp = biphoton::InterpMode::Off;
      } else {
        throw biphoton::ConfigError("unknown interpolation mode '" + interp_name + "'");
      }
      if (metric_name == "area") {
        aopts.metric = biphoton::PeakMetric::Area;
      } else if (metric_name != "height") {
        throw biphoton::ConfigError("unknown metric '" + metric_name + "'");
      }
      aopts.shuffle_diagnostic = do_shuffle;
      aopts.shuffle_seed = shuffle_seed;
      aopts.threads = g.threads;
      const std::string out = g.out_dir.empty() ? "analysis" : g.out_dir;
      for (const auto& f : biphoton::run_analyze(stack_path, aopts, out))
        std::cout << "wrote " << f << "\n";
    } else if (curve->parsed()) {
      const auto cfg = load_config(g);
      biphoton::CurveSpec spec;
      spec.optics = cfg.optics;
      spec.pair_rate_hz = cfg.pair_rate_hz;
      spec.exposure_s = cfg.exposure_s;
      spec.eta_slm = cfg.eta_slm;
      spec.seed = cfg.seed;
      spec.medium = cfg.medium;
      spec.detector = cfg.detector;
      spec.lambdas_mm = cfg.task.lambda_list_mm;
      spec.batches = cfg.task.batches;
      spec.frames_per_batch = cfg.task.frames_per_batch;
      spec.pipeline = cfg.pipeline_options();
      spec.xi_halfwidth = cfg.task.xi_halfwidth;
      spec.metric = cfg.task.metric;
      spec.include_zero_point = cfg.task.include_zero_point;
      const auto result = biphoton::compute_ratio_curve(spec);
      const std::string path = cfg.out_dir + "/ratio_curve.csv";
      biphoton::write_text_atomic(path, biphoton::ratio_curve_csv(result.curve));
      biphoton::write_text_atomic(cfg.out_dir + "/ratio_curve.meta.txt",
                                  "config:\n" + biphoton::serialize_config(cfg));
      std::cout << "wrote " << path << "\n";
    } else if (calib->parsed()) {
      const auto cfg = load_config(g);
      biphoton::AlphaScanSpec spec;
      spec.optics = cfg.optics;
      spec.pair_rate_hz = cfg.pair_rate_hz;
      spec.exposure_s = cfg.exposure_s;
      spec.seed = cfg.seed;
      spec.detector = cfg.detector;
      spec.period_mm = cfg.task.alpha_period_mm;
      spec.true_offset_rad = cfg.task.alpha_true_rad;
      spec.points = cfg.task.alpha_points;
      spec.span_rad = cfg.task.alpha_span_rad;
      spec.batches = cfg.task.batches;
      spec.frames_per_batch = cfg.task.frames_per_batch;
      spec.pipeline = cfg.pipeline_options();
      spec.xi_halfwidth = std::max(cfg.task.xi_halfwidth, 8);
      const auto result = biphoton::run_alpha_scan(spec);
      std::string csv = "alpha_rad,xi_zero_order\n";
      for (const auto& p : result.table)
        csv += biphoton::format_double(p.alpha_rad) + "," +
               biphoton::format_double(p.xi_zero_order) + "\n";
      const std::string path = cfg.out_dir + "/alpha_table.csv";
      biphoton::write_text_atomic(path, csv);
      std::cout << "wrote " << path << "\n";
      std::cout << "alpha_star = " << biphoton::format_double(result.pick.alpha_star) << "\n";
    } else if (fitareas->parsed()) {
      const auto cfg = load_config(g);
      biphoton::AreaFitSpec spec;
      spec.optics = cfg.optics;
      spec.pair_rate_hz = cfg.pair_rate_hz;
      spec.exposure_s = cfg.exposure_s;
      spec.seed = cfg.seed;
      spec.detector = cfg.detector;
      spec.intensity_roi = cfg.task.intensity_roi;
      spec.intensity_frames = cfg.task.intensity_frames;
      spec.batches = cfg.task.batches;
      spec.frames_per_batch = cfg.task.frames_per_batch;
      spec.pipeline = cfg.pipeline_options();
      const auto result = biphoton::run_area_fits(spec);
      std::string report_text;
      report_text += "beam_area_fit_mm2 = " +
                     biphoton::format_double(result.intensity.variance_sample_mm2) + "\n";
      report_text += "entanglement_area_fit_mm2 = " +
                     biphoton::format_double(result.correlation.variance_sample_mm2) + "\n";
      const std::string path = cfg.out_dir + "/area_fits.txt";
      biphoton::write_text_atomic(path, report_text);
      std::cout << report_text;
      std::cout << "wrote " << path << "\n";
    } else if (preset->parsed()) {
      const auto id = biphoton::parse_preset_id(preset_id);
      if (!id) throw biphoton::ConfigError("unknown preset '" + preset_id + "'");
      biphoton::RunOptions opts;
      opts.seed = g.seed.value_or(1);
      opts.out_dir = g.out_dir.empty() ? std::string("runs/") + preset_id : g.out_dir;
      opts.threads = g.threads;
      opts.paper_scale = g.paper_scale;
      opts.emit_stacks = emit_stacks;
      opts.batches_override = batches_override;
      opts.frames_override = frames_override;
      const auto files = biphoton::run_preset(*id, opts);
      for (const auto& f : files) std::cout << "wrote " << opts.out_dir << "/" << f << "\n";
      std::cout << "wrote " << opts.out_dir << "/manifest.txt\n";
    } else if (report->parsed()) {
      std::cout << biphoton::summarize_run(report_dir);
    }
  } catch (const biphoton::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const biphoton::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const biphoton::PipelineError& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return kExitPipeline;
  } catch (const std::exception& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return 0;
}
