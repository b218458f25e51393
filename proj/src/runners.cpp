#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "biphoton/errors.hpp"
#include "biphoton/experiment.hpp"
#include "biphoton/hash.hpp"

namespace biphoton {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

PipelineOptions clamp_to_roi(PipelineOptions opts, const OpticsConfig& optics) {
  opts.lag_x = std::min(opts.lag_x, optics.roi_nx - 1);
  opts.lag_y = std::min(opts.lag_y, optics.roi_ny - 1);
  return opts;
}

void run_jobs(std::vector<std::function<void()>>& jobs, int threads) {
  if (threads <= 1 || jobs.size() <= 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::exception_ptr error;
  const int n = std::min<int>(threads, static_cast<int>(jobs.size()));
  for (int t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
          jobs[i]();
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

SourceSpec make_source(const CurveSpec& spec, const SlmMask& mask,
                       std::uint64_t seed_offset) {
  SourceSpec s;
  s.pair_rate_hz = spec.pair_rate_hz;
  s.exposure_s = spec.exposure_s;
  s.eta_slm = spec.eta_slm;
  s.mask = mask;
  s.optics = spec.optics;
  s.seed = seed_offset == 0 ? spec.seed : mix64(spec.seed + seed_offset * kGolden);
  return s;
}

}  // namespace

XiMeasurement measure_xi(const CurveSpec& spec, const SlmMask& mask, LagCenter center,
                         std::uint64_t seed_offset) {
  const std::int64_t total = static_cast<std::int64_t>(spec.batches) * spec.frames_per_batch;
  const SimFrameSource source(make_source(spec, mask, seed_offset), spec.medium,
                              spec.detector, total);
  const PipelineOptions opts = clamp_to_roi(spec.pipeline, spec.optics);
  return batch_xi(source, spec.batches, spec.frames_per_batch, opts, center,
                  spec.xi_halfwidth, spec.metric);
}

CurveResult compute_ratio_curve(const CurveSpec& spec) {
  spec.optics.validate();
  spec.medium.validate();
  spec.detector.validate();
  if (spec.lambdas_mm.empty()) throw ConfigError("ratio curve needs at least one period");

  const PipelineOptions base = clamp_to_roi(spec.pipeline, spec.optics);
  // Points are independent jobs; when running them in parallel, each point's
  // own chunk reduction stays single-threaded (the chunking is fixed, so the
  // numbers do not depend on this choice).
  const int threads = resolve_threads(spec.pipeline.threads);
  PipelineOptions point_opts = base;
  if (threads > 1) point_opts.threads = 1;

  const std::int64_t total = static_cast<std::int64_t>(spec.batches) * spec.frames_per_batch;

  struct PointJob {
    double lambda_mm = 0.0;  // 0 = flat reference / zero point
    std::uint64_t seed_offset = 0;
    XiMeasurement xi;
    CorrelationImage mean_image;
  };
  std::vector<PointJob> points;
  points.push_back({0.0, 0, {}, {}});  // flat reference
  if (spec.include_zero_point) points.push_back({0.0, 0x5eedul, {}, {}});
  for (double lambda : spec.lambdas_mm) points.push_back({lambda, 0, {}, {}});

  std::vector<std::function<void()>> jobs;
  for (auto& p : points) {
    jobs.push_back([&spec, &p, &point_opts, total] {
      const SlmMask mask =
          p.lambda_mm > 0.0 ? SlmMask::grating(p.lambda_mm) : SlmMask::flat();
      const LagCenter center = expected_peak_center(mask, spec.optics);
      const SimFrameSource source(make_source(spec, mask, p.seed_offset), spec.medium,
                                  spec.detector, total);
      p.xi = batch_xi(source, spec.batches, spec.frames_per_batch, point_opts, center,
                      spec.xi_halfwidth, spec.metric, &p.mean_image);
    });
  }
  run_jobs(jobs, threads);

  CurveResult result;
  result.xi0 = points[0].xi;
  const double xi0 = result.xi0.mean;
  const double dxi0 = result.xi0.stderr_mean;

  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& p = points[i];
    RatioPoint row;
    row.lambda_um = p.lambda_mm * 1e3;
    row.delta_x_um =
        p.lambda_mm > 0.0 ? peak_separation_mm(p.lambda_mm, spec.optics) * 1e3 : 0.0;
    row.frames = total;
    const auto rw = ratio_with_error(p.xi.mean, p.xi.stderr_mean, xi0, dxi0);
    row.ratio = rw.ratio;
    row.ratio_err = rw.error;

    std::vector<std::string> flags;
    if (p.xi.stderr_mean > 0.0 && p.xi.mean / p.xi.stderr_mean < 3.0)
      flags.push_back("low_snr");
    if (p.lambda_mm > 0.0) {
      if (!thin_crystal_validity(spec.optics.slm_corr_width_mm, p.lambda_mm).valid)
        flags.push_back("thin_crystal");
      // Measured peak position vs the formula prediction, on the mean image.
      const LagCenter center = p.xi.center;
      int best_dx = center.dx, best_dy = center.dy;
      double best = -std::numeric_limits<double>::infinity();
      for (int dy = center.dy - p.xi.halfwidth; dy <= center.dy + p.xi.halfwidth; ++dy)
        for (int dx = center.dx - p.xi.halfwidth; dx <= center.dx + p.xi.halfwidth; ++dx)
          if (p.mean_image.at(dx, dy) > best) {
            best = p.mean_image.at(dx, dy);
            best_dx = dx;
            best_dy = dy;
          }
      if (std::abs(best_dx - center.dx) > 1 || std::abs(best_dy - center.dy) > 1)
        flags.push_back("peak_offset");
    }
    row.flags = flags.empty() ? "ok" : [&] {
      std::string s;
      for (std::size_t k = 0; k < flags.size(); ++k) s += (k ? ";" : "") + flags[k];
      return s;
    }();

    result.details.push_back({row, p.xi});
    result.curve.points.push_back(row);
  }

  std::sort(result.curve.points.begin(), result.curve.points.end(),
            [](const RatioPoint& a, const RatioPoint& b) { return a.delta_x_um < b.delta_x_um; });
  return result;
}

AlphaScanResult run_alpha_scan(const AlphaScanSpec& spec) {
  if (spec.points < 5) throw ConfigError("alpha scan needs at least 5 grid points");
  const int threads = resolve_threads(spec.pipeline.threads);
  PipelineOptions opts = clamp_to_roi(spec.pipeline, spec.optics);
  if (threads > 1) opts.threads = 1;
  const std::int64_t total = static_cast<std::int64_t>(spec.batches) * spec.frames_per_batch;

  AlphaScanResult out;
  out.table.resize(spec.points);
  std::vector<std::function<void()>> jobs;
  for (int i = 0; i < spec.points; ++i) {
    jobs.push_back([&, i] {
      const double alpha =
          -0.5 * spec.span_rad + spec.span_rad * i / (spec.points - 1);
      // The hardware offset is unknown to the calibration: the effective
      // grating shift is the planted offset minus the programmed one.
      SourceSpec src;
      src.pair_rate_hz = spec.pair_rate_hz;
      src.exposure_s = spec.exposure_s;
      src.eta_slm = 1.0;
      src.mask = SlmMask::grating(spec.period_mm, spec.true_offset_rad - alpha);
      src.optics = spec.optics;
      src.seed = spec.seed;
      const SimFrameSource source(src, MediumSpec{}, spec.detector, total);
      // Zero-order objective uses the window-sum statistic: the height
      // difference between neighbouring shifts is far below desk-scale noise.
      const XiMeasurement xi = batch_xi(source, spec.batches, spec.frames_per_batch, opts,
                                        {0, 0}, spec.xi_halfwidth, PeakMetric::Area);
      out.table[i] = AlphaPoint{alpha, xi.mean, xi.stderr_mean};
    });
  }
  run_jobs(jobs, threads);
  out.pick = pick_alpha(out.table);
  return out;
}

AreaFitResult run_area_fits(const AreaFitSpec& spec) {
  AreaFitResult out;
  const double pitch_mm = spec.optics.pixel_pitch_um * 1e-3;

  {
    OpticsConfig icfg = spec.optics;
    icfg.roi_nx = icfg.roi_ny = spec.intensity_roi;
    SourceSpec src;
    src.pair_rate_hz = spec.pair_rate_hz;
    src.exposure_s = spec.exposure_s;
    src.eta_slm = 1.0;
    src.mask = SlmMask::flat();
    src.optics = icfg;
    src.seed = spec.seed;
    const SimFrameSource source(src, MediumSpec{}, spec.detector,
                                std::max<std::int64_t>(2, spec.intensity_frames),
                                SamplerMode::Analytic);
    const GridD mean = intensity_image(source, 0, spec.intensity_frames);
    out.intensity = fit_gaussian_variance(mean, pitch_mm, icfg.magnification);
  }

  {
    SourceSpec src;
    src.pair_rate_hz = spec.pair_rate_hz;
    src.exposure_s = spec.exposure_s;
    src.eta_slm = 1.0;
    src.mask = SlmMask::flat();
    src.optics = spec.optics;
    src.seed = spec.seed;
    const std::int64_t total =
        static_cast<std::int64_t>(spec.batches) * spec.frames_per_batch;
    const SimFrameSource source(src, MediumSpec{}, spec.detector, total);
    const PipelineOptions opts = clamp_to_roi(spec.pipeline, spec.optics);
    const CorrelationImage img = run_correlation(source, 0, total, opts);
    out.correlation = fit_gaussian_variance(img.lag_values, pitch_mm, spec.optics.magnification);
  }
  return out;
}

// ----------------------------------------------------------------------
// CLI-facing runs

namespace {

struct Manifest {
  std::ostringstream head;
  std::vector<std::string> files;
  std::string dir;

  explicit Manifest(const std::string& out_dir) : dir(out_dir) {
    std::filesystem::create_directories(out_dir);
    head << "# biphoton-lab run manifest\n";
  }

  std::string emit(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    write_text_atomic(path, content);
    files.push_back(name);
    return path;
  }

  void note_external(const std::string& name) { files.push_back(name); }

  std::string finish() {
    std::ostringstream out;
    out << head.str();
    out << "[artifacts]\n";
    for (const auto& name : files) {
      const std::string path = (std::filesystem::path(dir) / name).string();
      out << name << " = " << sha256_file_hex(path) << "\n";
    }
    const std::string path = (std::filesystem::path(dir) / "manifest.txt").string();
    write_text_atomic(path, out.str());
    return path;
  }
};

int default_lag(int roi) { return roi >= 150 ? 64 : std::min(56, roi - 1); }

std::vector<double> periods_for_dx_um(const OpticsConfig& cfg,
                                      const std::vector<double>& dx_um) {
  std::vector<double> out;
  for (double dx : dx_um) out.push_back(period_for_separation_mm(dx * 1e-3, cfg));
  return out;
}

}  // namespace

std::string run_simulate(const ExperimentConfig& cfg) {
  Manifest manifest(cfg.out_dir);
  manifest.head << "kind = simulate\nseed = " << cfg.seed << "\n";
  manifest.head << "[config]\n" << serialize_config(cfg);

  const std::string stack_name = "stack.bpf1";
  const std::string stack_path = (std::filesystem::path(cfg.out_dir) / stack_name).string();
  const FrameTelemetry tel =
      simulate_stack(cfg.source_spec(), cfg.medium, cfg.detector, cfg.stack_frames, stack_path);
  manifest.note_external(stack_name);

  std::ostringstream tel_text;
  tel_text << "pairs_generated = " << tel.pairs_generated << "\n"
           << "photons_surviving = " << tel.photons_surviving << "\n"
           << "photons_detected_roi = " << tel.photons_detected_roi << "\n"
           << "photons_out_of_roi = " << tel.photons_out_of_roi << "\n";
  manifest.emit("telemetry.txt", tel_text.str());
  manifest.finish();
  return stack_path;
}

std::vector<std::string> run_analyze(const std::string& stack_path,
                                     const AnalyzeOptions& opts, const std::string& out_dir) {
  const FileFrameSource source(stack_path);
  PipelineOptions popts;
  popts.lag_x = popts.lag_y =
      std::min({opts.lag_window, source.width() - 1, source.height() - 1});
  popts.interp = opts.interp;
  popts.threads = 1;

  CorrelationImage img =
      opts.shuffle_diagnostic
          ? shuffled_null_correlation(source, popts, opts.shuffle_seed)
          : run_correlation(source, 0, source.count(), popts);
  img.provenance = sha256_file_hex(stack_path);

  Manifest manifest(out_dir);
  manifest.head << "kind = analyze\nstack = " << stack_path << "\n";

  std::vector<std::string> written;
  written.push_back(manifest.emit("correlation.csv", correlation_csv(img)));
  written.push_back(manifest.emit("correlation.meta.txt", correlation_sidecar(img, "")));

  std::ostringstream report;
  const double xi0 = extract_xi(img, {0, 0}, opts.xi_halfwidth, opts.metric);
  report << "xi0 = " << format_double(xi0) << "\n";
  if (opts.peak_dx != 0) {
    const double xi = extract_xi(img, {opts.peak_dx, 0}, opts.xi_halfwidth, opts.metric);
    report << "xi_peak_dx = " << opts.peak_dx << "\n";
    report << "xi_peak = " << format_double(xi) << "\n";
    if (xi0 > 0.0 && xi > 0.0) report << "ratio = " << format_double(xi / xi0) << "\n";
  }
  if (opts.fit) {
    const auto& meta = source.header().metadata;
    const double mag =
        meta.count("magnification") ? std::stod(meta.at("magnification")) : 1.0;
    const double pitch_um =
        meta.count("pixel_pitch_um") ? std::stod(meta.at("pixel_pitch_um")) : 16.0;
    const GaussianFit fit = fit_gaussian_variance(img.lag_values, pitch_um * 1e-3, mag);
    report << "fit_variance_mm2 = " << format_double(fit.variance_mm2) << "\n";
    report << "fit_variance_sample_mm2 = " << format_double(fit.variance_sample_mm2) << "\n";
    report << "fit_amplitude = " << format_double(fit.amplitude) << "\n";
    report << "fit_offset = " << format_double(fit.offset) << "\n";
    report << "fit_residual_norm = " << format_double(fit.residual_norm) << "\n";
  }
  written.push_back(manifest.emit("xi_report.txt", report.str()));
  manifest.finish();
  return written;
}

// ----------------------------------------------------------------------
// Presets

namespace {

struct PresetContext {
  RunOptions opts;
  int roi;
  int batches;
  std::int64_t frames;
  int threads;

  explicit PresetContext(const RunOptions& o)
      : opts(o),
        roi(o.paper_scale ? presets::kRoiFull : presets::kRoiDesk),
        batches(o.batches_override > 0 ? o.batches_override : 4),
        frames(o.frames_override > 0 ? o.frames_override : 1000),
        threads(resolve_threads(o.threads)) {}

  CurveSpec base_curve(const OpticsConfig& optics) const {
    CurveSpec spec;
    spec.optics = optics;
    spec.eta_slm = presets::kEtaSlmStar;
    spec.seed = opts.seed;
    spec.detector = presets::default_detector();
    spec.batches = batches;
    spec.frames_per_batch = frames;
    spec.pipeline.lag_x = spec.pipeline.lag_y = default_lag(optics.roi_nx);
    spec.pipeline.threads = threads;
    spec.include_zero_point = true;
    return spec;
  }
};

// Background rate matching the mean signal photon flux per pixel.
double matched_stray_rate(const CurveSpec& spec) {
  SourceSpec src;
  src.pair_rate_hz = spec.pair_rate_hz;
  src.exposure_s = spec.exposure_s;
  src.eta_slm = spec.eta_slm;
  src.mask = SlmMask::flat();
  src.optics = spec.optics;
  src.seed = spec.seed;
  const SimFrameSource probe(src, MediumSpec{}, spec.detector, 2, SamplerMode::Analytic);
  const double acceptance = probe.roi_acceptance();
  const double photons =
      2.0 * spec.pair_rate_hz * spec.exposure_s * acceptance;
  return photons / (spec.optics.roi_nx * spec.optics.roi_ny);
}

void emit_curves(Manifest& manifest, const std::vector<std::string>& names,
                 const std::vector<CurveSpec>& specs, std::vector<std::string>& files) {
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const CurveResult res = compute_ratio_curve(specs[i]);
    files.push_back(manifest.emit(names[i], ratio_curve_csv(res.curve)));
  }
}

}  // namespace

std::vector<std::string> run_preset(PresetId id, const RunOptions& opts) {
  PresetContext ctx(opts);
  Manifest manifest(opts.out_dir);
  manifest.head << "kind = preset\n";
  manifest.head << "preset = " << preset_name(id) << "\n";
  manifest.head << "seed = " << opts.seed << "\n";
  manifest.head << "paper_scale = " << (opts.paper_scale ? "true" : "false") << "\n";
  manifest.head << "batches = " << ctx.batches << "\n";
  manifest.head << "frames_per_batch = " << ctx.frames << "\n";

  std::vector<std::string> files;
  const OpticsConfig cfg1 = presets::config1(ctx.roi);
  const OpticsConfig cfg2 = presets::config2(ctx.roi);
  // Desk-scale separations reaching the shaped plateau in configuration 1.
  const std::vector<double> dx_um = {40.0, 80.0, 160.0, 270.0, 400.0};

  switch (id) {
    case PresetId::Fig2b: {
      // Correlation images for the flat mask and three grating periods.
      const std::vector<double> periods = {0.0, 2.035, 1.0, 0.5};
      const std::vector<std::string> names = {"corr_flat", "corr_L2035um", "corr_L1000um",
                                              "corr_L500um"};
      for (std::size_t i = 0; i < periods.size(); ++i) {
        SourceSpec src;
        src.pair_rate_hz = presets::kPairRateHz;
        src.exposure_s = presets::kExposureS;
        src.eta_slm = presets::kEtaSlmStar;
        src.mask = periods[i] > 0.0 ? SlmMask::grating(periods[i]) : SlmMask::flat();
        src.optics = cfg1;
        src.seed = opts.seed;
        const std::int64_t total = ctx.batches * ctx.frames / 2;
        const SimFrameSource source(src, MediumSpec{}, presets::default_detector(),
                                    std::max<std::int64_t>(total, 2));
        PipelineOptions popts;
        popts.lag_x = popts.lag_y = default_lag(ctx.roi);
        popts.threads = ctx.threads;
        const CorrelationImage img = run_correlation(source, 0, source.count(), popts);
        files.push_back(manifest.emit(names[i] + ".csv", correlation_csv(img)));
        files.push_back(manifest.emit(
            names[i] + ".meta.txt",
            correlation_sidecar(img, "mask = " + src.mask.describe() + "\n")));
        if (opts.emit_stacks) {
          const std::string stack_name = names[i] + ".bpf1";
          simulate_stack(src, MediumSpec{}, presets::default_detector(), source.count(),
                         (std::filesystem::path(opts.out_dir) / stack_name).string());
          manifest.note_external(stack_name);
        }
      }
      break;
    }
    case PresetId::Fig3a: {
      const std::vector<std::string> media = {"air", "hexane", "rh6g", "cdse"};
      std::vector<CurveSpec> specs;
      std::vector<std::string> names;
      for (std::size_t i = 0; i < media.size(); ++i) {
        CurveSpec spec = ctx.base_curve(cfg1);
        spec.lambdas_mm = periods_for_dx_um(cfg1, dx_um);
        spec.medium = presets::medium_by_name(media[i], cfg1);
        // hexane is a second independent no-interaction run
        if (media[i] == "hexane") spec.seed = mix64(opts.seed + 17 * kGolden);
        specs.push_back(spec);
        names.push_back("curve_" + media[i] + ".csv");
      }
      emit_curves(manifest, names, specs, files);
      break;
    }
    case PresetId::Fig3b: {
      CurveSpec air = ctx.base_curve(cfg1);
      air.lambdas_mm = periods_for_dx_um(cfg1, dx_um);

      CurveSpec loss = air;
      loss.medium.elements.push_back(LinearLoss{0.5});
      CurveSpec scatter = air;
      scatter.medium.elements.push_back(
          Scatterer{0.5, 0.5 * std::sqrt(cfg1.entanglement_area_mm2)});
      CurveSpec stray = air;
      stray.detector.stray_rate = matched_stray_rate(air);

      emit_curves(manifest,
                  {"curve_air.csv", "curve_loss.csv", "curve_scatter.csv", "curve_stray.csv"},
                  {air, loss, scatter, stray}, files);
      break;
    }
    case PresetId::Fig3c: {
      // Pair-flux scan at fixed separation 40 um.
      const double lambda = period_for_separation_mm(0.040, cfg1);
      std::ostringstream csv_air, csv_rh6g;
      for (auto* csv : {&csv_air, &csv_rh6g})
        *csv << "flux_scale,delta_x_um,ratio,ratio_err,lambda_um,frames,flags\n";
      for (double scale : {0.25, 0.5, 1.0}) {
        for (const std::string& medium : {std::string("air"), std::string("rh6g")}) {
          CurveSpec spec = ctx.base_curve(cfg1);
          spec.pair_rate_hz = presets::kPairRateHz * scale;
          spec.lambdas_mm = {lambda};
          spec.medium = presets::medium_by_name(medium, cfg1);
          spec.include_zero_point = false;
          const CurveResult res = compute_ratio_curve(spec);
          const RatioPoint& p = res.curve.points.front();
          auto& csv = medium == "air" ? csv_air : csv_rh6g;
          csv << format_double(scale) << "," << format_double(p.delta_x_um) << ","
              << format_double(p.ratio) << "," << format_double(p.ratio_err) << ","
              << format_double(p.lambda_um) << "," << p.frames << "," << p.flags << "\n";
        }
      }
      files.push_back(manifest.emit("power_scan_air.csv", csv_air.str()));
      files.push_back(manifest.emit("power_scan_rh6g.csv", csv_rh6g.str()));
      break;
    }
    case PresetId::Fig3d: {
      for (int roi : {64, 100, 150}) {
        CurveSpec spec = ctx.base_curve(presets::config1(roi));
        spec.lambdas_mm = periods_for_dx_um(spec.optics, {40.0, 160.0, 400.0});
        spec.pipeline.lag_x = spec.pipeline.lag_y = default_lag(roi);
        const CurveResult res = compute_ratio_curve(spec);
        files.push_back(manifest.emit("curve_roi" + std::to_string(roi) + ".csv",
                                      ratio_curve_csv(res.curve)));
      }
      break;
    }
    case PresetId::Fig4a: {
      // Same grating periods through both configurations.
      const std::vector<double> periods = periods_for_dx_um(cfg1, {40.0, 100.0, 200.0, 400.0});
      CurveSpec c1 = ctx.base_curve(cfg1);
      c1.lambdas_mm = periods;
      c1.medium = presets::medium_by_name("rh6g", cfg1);
      CurveSpec c2 = ctx.base_curve(cfg2);
      c2.lambdas_mm = periods;
      c2.medium = presets::medium_by_name("rh6g", cfg2);
      CurveSpec c2air = ctx.base_curve(cfg2);
      c2air.lambdas_mm = periods;
      emit_curves(manifest,
                  {"curve_config1_rh6g.csv", "curve_config2_rh6g.csv", "curve_config2_air.csv"},
                  {c1, c2, c2air}, files);
      break;
    }
    case PresetId::FigS2: {
      std::ostringstream report;
      for (int which : {1, 2}) {
        AreaFitSpec spec;
        spec.optics = which == 1 ? cfg1 : cfg2;
        spec.seed = opts.seed;
        spec.detector = presets::default_detector();
        // calibration-grade frames: smear would skew the intensity fit
        spec.detector.smear_beta = 0.0;
        spec.intensity_roi = 384;
        spec.intensity_frames = std::min<std::int64_t>(300, ctx.batches * ctx.frames);
        spec.batches = 1;
        spec.frames_per_batch = ctx.batches * ctx.frames;
        spec.pipeline.lag_x = spec.pipeline.lag_y = default_lag(ctx.roi);
        spec.pipeline.threads = ctx.threads;
        const AreaFitResult res = run_area_fits(spec);
        report << "[config" << which << "]\n";
        report << "beam_area_fit_mm2 = " << format_double(res.intensity.variance_sample_mm2)
               << "\n";
        report << "beam_area_nominal_mm2 = "
               << format_double(spec.optics.beam_area_mm2) << "\n";
        report << "entanglement_area_fit_mm2 = "
               << format_double(res.correlation.variance_sample_mm2) << "\n";
        report << "entanglement_area_nominal_mm2 = "
               << format_double(spec.optics.entanglement_area_mm2) << "\n";
      }
      files.push_back(manifest.emit("area_fits.txt", report.str()));
      break;
    }
    case PresetId::FigS4: {
      AlphaScanSpec spec;
      spec.optics = cfg1;
      spec.seed = opts.seed;
      spec.detector = presets::default_detector();
      spec.period_mm = 0.3;
      spec.true_offset_rad = 0.2;
      spec.points = 9;
      spec.batches = ctx.batches;
      spec.frames_per_batch = 2 * ctx.frames;
      spec.pipeline.lag_x = spec.pipeline.lag_y = default_lag(ctx.roi);
      spec.pipeline.threads = ctx.threads;
      spec.xi_halfwidth = 8;
      const AlphaScanResult res = run_alpha_scan(spec);
      std::ostringstream csv;
      csv << "alpha_rad,xi_zero_order\n";
      for (const auto& p : res.table)
        csv << format_double(p.alpha_rad) << "," << format_double(p.xi_zero_order) << "\n";
      files.push_back(manifest.emit("alpha_table.csv", csv.str()));
      std::ostringstream meta;
      meta << "alpha_star = " << format_double(res.pick.alpha_star) << "\n";
      meta << "true_offset = " << format_double(spec.true_offset_rad) << "\n";
      meta << "metric = area\n";
      files.push_back(manifest.emit("alpha_table.meta.txt", meta.str()));
      break;
    }
    case PresetId::FigS5: {
      std::ostringstream csv;
      csv << "phi_rad,xi0,xi0_err\n";
      const double pi = 3.141592653589793;
      for (double phi : {0.0, pi / 8.0, pi / 4.0, pi / 2.0}) {
        CurveSpec spec = ctx.base_curve(cfg1);
        const XiMeasurement xi = measure_xi(spec, SlmMask::half_plane(phi), {0, 0});
        csv << format_double(phi) << "," << format_double(xi.mean) << ","
            << format_double(xi.stderr_mean) << "\n";
      }
      files.push_back(manifest.emit("halfplane_scan.csv", csv.str()));
      break;
    }
  }

  manifest.finish();
  return files;
}

std::string summarize_run(const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = fs::path(out_dir) / "manifest.txt";
  std::ifstream in(manifest_path);
  if (!in) throw DataError(manifest_path.string() + ": no manifest found");
  std::ostringstream out;
  out << "run directory: " << out_dir << "\n";
  std::string line;
  bool in_artifacts = false;
  int verified = 0, mismatched = 0, missing = 0;
  while (std::getline(in, line)) {
    if (line == "[artifacts]") {
      in_artifacts = true;
      continue;
    }
    if (!in_artifacts) {
      if (!line.empty() && line[0] != '#' && line[0] != '[') out << "  " << line << "\n";
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string name = line.substr(0, eq);
    const std::string recorded = line.substr(eq + 3);
    const fs::path artifact = fs::path(out_dir) / name;
    if (!fs::exists(artifact)) {
      out << "  MISSING   " << name << "\n";
      ++missing;
    } else if (sha256_file_hex(artifact.string()) != recorded) {
      out << "  MODIFIED  " << name << "\n";
      ++mismatched;
    } else {
      out << "  ok        " << name << "\n";
      ++verified;
    }
  }
  out << verified << " artifact(s) verified, " << mismatched << " modified, " << missing
      << " missing\n";
  return out.str();
}

}  // namespace biphoton
