#include "biphoton/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/hash.hpp"

namespace biphoton {

namespace presets {

OpticsConfig config1(int roi) {
  OpticsConfig cfg;
  cfg.wavelength_nm = kWavelengthNm;
  cfg.focal_mm = kConfig1FocalMm;
  cfg.entanglement_area_mm2 = kConfig1EntanglementAreaMm2;
  cfg.beam_area_mm2 = kConfig1BeamAreaMm2;
  cfg.slm_corr_width_mm = kSlmCorrWidthMm;
  cfg.magnification = kConfig1Magnification;
  cfg.pixel_pitch_um = kPixelPitchUm;
  cfg.roi_nx = cfg.roi_ny = roi;
  return cfg;
}

OpticsConfig config2(int roi) {
  OpticsConfig cfg;
  cfg.wavelength_nm = kWavelengthNm;
  cfg.focal_mm = kConfig2FocalMm;
  cfg.entanglement_area_mm2 = kConfig2EntanglementAreaMm2;
  cfg.beam_area_mm2 = kConfig2BeamAreaMm2;
  cfg.slm_corr_width_mm = kSlmCorrWidthMm;
  cfg.magnification = kConfig2Magnification;
  cfg.pixel_pitch_um = kPixelPitchUm;
  cfg.roi_nx = cfg.roi_ny = roi;
  return cfg;
}

DetectorSpec default_detector() {
  DetectorSpec det;
  det.eta_q = kDetectorEtaQ;
  det.gain = kDetectorGain;
  det.read_noise = kDetectorReadNoise;
  det.bias = kDetectorBias;
  det.smear_beta = kDetectorSmearBeta;
  det.stray_rate = 0.0;
  return det;
}

MediumSpec medium_by_name(const std::string& name, const OpticsConfig& cfg) {
  const double w_m = kEtpaKernelScale * std::sqrt(cfg.entanglement_area_mm2);
  MediumSpec m;
  if (name == "air" || name == "none" || name == "hexane") return m;
  if (name == "rh6g") {
    m.elements.push_back(EtpaAbsorber{kRh6gStrength, w_m});
  } else if (name == "cdse") {
    m.elements.push_back(EtpaAbsorber{kCdseStrength, w_m});
  } else if (name == "loss50") {
    m.elements.push_back(LinearLoss{0.5});
  } else if (name == "parafilm") {
    m.elements.push_back(Scatterer{0.5, 0.5 * std::sqrt(cfg.entanglement_area_mm2)});
  } else {
    throw ConfigError("unknown medium preset '" + name + "'");
  }
  return m;
}

}  // namespace presets

SourceSpec ExperimentConfig::source_spec() const {
  SourceSpec s;
  s.pair_rate_hz = pair_rate_hz;
  s.exposure_s = exposure_s;
  s.eta_slm = eta_slm;
  s.mask = mask;
  s.optics = optics;
  s.seed = seed;
  return s;
}

PipelineOptions ExperimentConfig::pipeline_options() const {
  PipelineOptions p;
  p.lag_x = p.lag_y = task.lag_window;
  p.interp = task.interp;
  p.threads = threads;
  return p;
}

// ----------------------------------------------------------------------
// INI parsing

namespace {

struct IniLine {
  int number = 0;
  std::string section;
  std::string key;
  std::string value;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<IniLine> tokenize_ini(const std::string& text) {
  std::vector<IniLine> lines;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(number) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    IniLine l;
    l.number = number;
    l.section = section;
    l.key = trim(line.substr(0, eq));
    l.value = trim(line.substr(eq + 1));
    if (l.key.empty())
      throw ConfigError("line " + std::to_string(number) + ": empty key");
    lines.push_back(std::move(l));
  }
  return lines;
}

double parse_double(const IniLine& l) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(l.value, &pos);
    if (pos != l.value.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(v)) throw std::invalid_argument("not finite");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(l.number) + ": '" + l.value +
                      "' is not a valid number for " + l.key);
  }
}

double parse_positive(const IniLine& l) {
  const double v = parse_double(l);
  if (!(v > 0.0))
    throw ConfigError("line " + std::to_string(l.number) + ": " + l.key +
                      " must be > 0 (got " + l.value + ")");
  return v;
}

double parse_non_negative(const IniLine& l) {
  const double v = parse_double(l);
  if (v < 0.0)
    throw ConfigError("line " + std::to_string(l.number) + ": " + l.key +
                      " must be >= 0 (got " + l.value + ")");
  return v;
}

std::int64_t parse_int(const IniLine& l, std::int64_t lo, std::int64_t hi) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(l.value, &pos);
    if (pos != l.value.size()) throw std::invalid_argument("trailing characters");
    if (v < lo || v > hi) throw std::out_of_range("range");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(l.number) + ": '" + l.value +
                      "' is not a valid integer in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "] for " + l.key);
  }
}

bool parse_bool(const IniLine& l) {
  if (l.value == "true" || l.value == "1" || l.value == "yes") return true;
  if (l.value == "false" || l.value == "0" || l.value == "no") return false;
  throw ConfigError("line " + std::to_string(l.number) + ": '" + l.value +
                    "' is not a boolean for " + l.key);
}

std::vector<double> parse_double_list(const IniLine& l) {
  std::vector<double> out;
  std::stringstream ss(l.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    IniLine sub = l;
    sub.value = item;
    out.push_back(parse_positive(sub));
  }
  if (out.empty())
    throw ConfigError("line " + std::to_string(l.number) + ": empty list for " + l.key);
  return out;
}

// medium element chain: "etpa(strength=0.1,width_mm=0.03) | loss(t=0.5) | ..."
MediumSpec parse_medium_elements(const IniLine& l) {
  MediumSpec spec;
  if (trim(l.value) == "none") return spec;
  std::stringstream ss(l.value);
  std::string part;
  while (std::getline(ss, part, '|')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto open = part.find('(');
    const auto close = part.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw ConfigError("line " + std::to_string(l.number) + ": malformed medium element '" +
                        part + "'");
    const std::string kind = trim(part.substr(0, open));
    std::map<std::string, double> args;
    std::stringstream as(part.substr(open + 1, close - open - 1));
    std::string kv;
    while (std::getline(as, kv, ',')) {
      kv = trim(kv);
      if (kv.empty()) continue;
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(l.number) + ": malformed argument '" + kv +
                          "' in medium element");
      IniLine sub = l;
      sub.key = trim(kv.substr(0, eq));
      sub.value = trim(kv.substr(eq + 1));
      args[sub.key] = parse_double(sub);
    }
    auto need = [&](const char* name) {
      const auto it = args.find(name);
      if (it == args.end())
        throw ConfigError("line " + std::to_string(l.number) + ": medium element '" + kind +
                          "' needs argument " + name);
      return it->second;
    };
    if (kind == "etpa") {
      spec.elements.push_back(EtpaAbsorber{need("strength"), need("width_mm")});
    } else if (kind == "loss") {
      spec.elements.push_back(LinearLoss{need("t")});
    } else if (kind == "scatter") {
      spec.elements.push_back(Scatterer{need("p"), need("sigma_mm")});
    } else {
      throw ConfigError("line " + std::to_string(l.number) + ": unknown medium element '" +
                        kind + "'");
    }
  }
  spec.validate();
  return spec;
}

InterpMode parse_interp(const IniLine& l) {
  if (l.value == "paper") return InterpMode::Paper;
  if (l.value == "full-column") return InterpMode::FullColumn;
  if (l.value == "off") return InterpMode::Off;
  throw ConfigError("line " + std::to_string(l.number) +
                    ": interpolation must be paper, full-column or off");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  cfg.detector = presets::default_detector();
  cfg.mask = SlmMask::flat();

  std::string mask_kind = "flat";
  double mask_period = 0.0, mask_alpha = 0.0, mask_phase = 0.0;
  std::vector<double> dx_list_um;
  bool have_lambda_list = false;
  bool have_medium_elements = false;

  for (const auto& l : tokenize_ini(text)) {
    const std::string where = "line " + std::to_string(l.number) + ": ";
    if (l.section == "optics") {
      if (l.key == "preset") {
        if (l.value == "config1") {
          cfg.optics = presets::config1(cfg.optics.roi_nx);
        } else if (l.value == "config2") {
          cfg.optics = presets::config2(cfg.optics.roi_nx);
        } else if (l.value != "custom") {
          throw ConfigError(where + "optics preset must be config1, config2 or custom");
        }
        cfg.optics_preset = l.value;
      } else if (l.key == "wavelength_nm") {
        cfg.optics.wavelength_nm = parse_positive(l);
      } else if (l.key == "focal_mm") {
        cfg.optics.focal_mm = parse_positive(l);
      } else if (l.key == "entanglement_area_mm2") {
        cfg.optics.entanglement_area_mm2 = parse_positive(l);
      } else if (l.key == "beam_area_mm2") {
        cfg.optics.beam_area_mm2 = parse_positive(l);
      } else if (l.key == "slm_envelope_area_mm2") {
        cfg.optics.slm_envelope_area_mm2 = parse_non_negative(l);
      } else if (l.key == "slm_corr_width_mm") {
        cfg.optics.slm_corr_width_mm = parse_positive(l);
      } else if (l.key == "magnification") {
        cfg.optics.magnification = parse_positive(l);
      } else if (l.key == "pixel_pitch_um") {
        cfg.optics.pixel_pitch_um = parse_positive(l);
      } else if (l.key == "roi") {
        cfg.optics.roi_nx = cfg.optics.roi_ny = static_cast<int>(parse_int(l, 2, 4096));
      } else {
        throw ConfigError(where + "unknown key '" + l.key + "' in [optics]");
      }
    } else if (l.section == "source") {
      if (l.key == "pair_rate_hz") {
        cfg.pair_rate_hz = parse_non_negative(l);
      } else if (l.key == "exposure_s") {
        cfg.exposure_s = parse_positive(l);
      } else if (l.key == "eta_slm") {
        cfg.eta_slm = parse_positive(l);
        if (cfg.eta_slm > 1.0) throw ConfigError(where + "eta_slm must lie in (0, 1]");
      } else if (l.key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(
            parse_int(l, 0, std::numeric_limits<std::int64_t>::max()));
      } else if (l.key == "frames") {
        cfg.stack_frames = parse_int(l, 2, 100000000);
      } else {
        throw ConfigError(where + "unknown key '" + l.key + "' in [source]");
      }
    } else if (l.section == "mask") {
      if (l.key == "kind") {
        if (l.value != "flat" && l.value != "grating" && l.value != "halfplane")
          throw ConfigError(where + "mask kind must be flat, grating or halfplane");
        mask_kind = l.value;
      } else if (l.key == "period_mm") {
        mask_period = parse_positive(l);
      } else if (l.key == "alpha_rad") {
        mask_alpha = parse_double(l);
      } else if (l.key == "phase_rad") {
        mask_phase = parse_non_negative(l);
      } else {
        throw ConfigError(where + "unknown key '" + l.key + "' in [mask]");
      }
    } else if (l.section == "medium") {
      if (l.key == "preset") {
        cfg.medium_name = l.value;  // resolved after optics is final
      } else if (l.key == "elements") {
        cfg.medium = parse_medium_elements(l);
        cfg.medium_name = "custom";
        have_medium_elements = true;
      } else {
        throw ConfigError(where + "unknown key '" + l.key + "' in [medium]");
      }
    } else if (l.section == "detector") {
      if (l.key == "eta_q") {
        cfg.detector.eta_q = parse_positive(l);
      } else if (l.key == "gain") {
        cfg.detector.gain = parse_positive(l);
      } else if (l.key == "read_noise") {
        cfg.detector.read_noise = parse_non_negative(l);
      } else if (l.key == "bias") {
        cfg.detector.bias = parse_non_negative(l);
      } else if (l.key == "smear_beta") {
        cfg.detector.smear_beta = parse_non_negative(l);
      } else if (l.key == "stray_rate") {
        cfg.detector.stray_rate = parse_non_negative(l);
      } else {
        throw ConfigError(where + "unknown key '" + l.key + "' in [detector]");
      }
    } else if (l.section == "task") {
      if (l.key == "lambda_list_mm") {
        cfg.task.lambda_list_mm = parse_double_list(l);
        have_lambda_list = true;
      } else if (l.key == "dx_list_um") {
        dx_list_um = parse_double_list(l);
      } else if (l.key == "batches") {
        cfg.task.batches = static_cast<int>(parse_int(l, 1, 1000000));
      } else if (l.key == "frames_per_batch") {
        cfg.task.frames_per_batch = parse_int(l, 2, 1000000000);
      } else if (l.key == "lag_window") {
        cfg.task.lag_window = static_cast<int>(parse_int(l, 1, 4096));
      } else if (l.key == "interpolation") {
        cfg.task.interp = parse_interp(l);
      } else if (l.key == "metric") {
        if (l.value == "height") {
          cfg.task.metric = PeakMetric::Height;
        } else if (l.value == "area") {
          cfg.task.metric = PeakMetric::Area;
        } else {
          throw ConfigError(where + "metric must be height or area");
        }
      } else if (l.key == "xi_halfwidth") {
        cfg.task.xi_halfwidth = static_cast<int>(parse_int(l, 0, 1024));
      } else if (l.key == "include_zero_point") {
        cfg.task.include_zero_point = parse_bool(l);
      } else if (l.key == "alpha_points") {
        cfg.task.alpha_points = static_cast<int>(parse_int(l, 5, 10001));
      } else if (l.key == "alpha_span_rad") {
        cfg.task.alpha_span_rad = parse_positive(l);
      } else if (l.key == "alpha_true_rad") {
        cfg.task.alpha_true_rad = parse_double(l);
      } else if (l.key == "alpha_period_mm") {
        cfg.task.alpha_period_mm = parse_positive(l);
      } else if (l.key == "intensity_roi") {
        cfg.task.intensity_roi = static_cast<int>(parse_int(l, 16, 4096));
      } else if (l.key == "intensity_frames") {
        cfg.task.intensity_frames = parse_int(l, 2, 100000000);
      } else {
        throw ConfigError(where + "unknown key '" + l.key + "' in [task]");
      }
    } else if (l.section == "run") {
      if (l.key == "out") {
        cfg.out_dir = l.value;
      } else if (l.key == "threads") {
        cfg.threads = static_cast<int>(parse_int(l, 0, 1024));
      } else {
        throw ConfigError(where + "unknown key '" + l.key + "' in [run]");
      }
    } else {
      throw ConfigError(where + "unknown section [" + l.section + "]");
    }
  }

  // Mask assembly after all keys are in.
  if (mask_kind == "flat") {
    cfg.mask = SlmMask::flat();
  } else if (mask_kind == "grating") {
    if (!(mask_period > 0.0))
      throw ConfigError("mask kind grating needs period_mm");
    cfg.mask = SlmMask::grating(mask_period, mask_alpha);
  } else {
    cfg.mask = SlmMask::half_plane(mask_phase);
  }

  if (!dx_list_um.empty()) {
    if (have_lambda_list)
      throw ConfigError("[task] lambda_list_mm and dx_list_um are mutually exclusive");
    cfg.task.lambda_list_mm.clear();
    for (double dx : dx_list_um)
      cfg.task.lambda_list_mm.push_back(period_for_separation_mm(dx * 1e-3, cfg.optics));
  }

  if (!have_medium_elements && cfg.medium_name != "custom")
    cfg.medium = presets::medium_by_name(cfg.medium_name, cfg.optics);

  cfg.optics.validate();
  cfg.detector.validate();
  cfg.medium.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[optics]\n";
  out << "preset = custom\n";  // explicit values below carry the state
  out << "wavelength_nm = " << format_double(cfg.optics.wavelength_nm) << "\n";
  out << "focal_mm = " << format_double(cfg.optics.focal_mm) << "\n";
  out << "entanglement_area_mm2 = " << format_double(cfg.optics.entanglement_area_mm2) << "\n";
  out << "beam_area_mm2 = " << format_double(cfg.optics.beam_area_mm2) << "\n";
  out << "slm_envelope_area_mm2 = " << format_double(cfg.optics.slm_envelope_area_mm2) << "\n";
  out << "slm_corr_width_mm = " << format_double(cfg.optics.slm_corr_width_mm) << "\n";
  out << "magnification = " << format_double(cfg.optics.magnification) << "\n";
  out << "pixel_pitch_um = " << format_double(cfg.optics.pixel_pitch_um) << "\n";
  out << "roi = " << cfg.optics.roi_nx << "\n";
  out << "\n[source]\n";
  out << "pair_rate_hz = " << format_double(cfg.pair_rate_hz) << "\n";
  out << "exposure_s = " << format_double(cfg.exposure_s) << "\n";
  out << "eta_slm = " << format_double(cfg.eta_slm) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "frames = " << cfg.stack_frames << "\n";
  out << "\n[mask]\n";
  switch (cfg.mask.kind) {
    case SlmMask::Kind::Flat:
      out << "kind = flat\n";
      break;
    case SlmMask::Kind::Grating:
      out << "kind = grating\n";
      out << "period_mm = " << format_double(cfg.mask.period_mm) << "\n";
      out << "alpha_rad = " << format_double(cfg.mask.alpha_rad) << "\n";
      break;
    case SlmMask::Kind::HalfPlane:
      out << "kind = halfplane\n";
      out << "phase_rad = " << format_double(cfg.mask.phase_rad) << "\n";
      break;
    case SlmMask::Kind::Custom:
      throw ConfigError("custom mask grids cannot be serialized to config text");
  }
  out << "\n[medium]\n";
  if (cfg.medium.empty()) {
    out << "elements = none\n";
  } else {
    out << "elements = " << cfg.medium.describe() << "\n";
  }
  out << "\n[detector]\n";
  out << "eta_q = " << format_double(cfg.detector.eta_q) << "\n";
  out << "gain = " << format_double(cfg.detector.gain) << "\n";
  out << "read_noise = " << format_double(cfg.detector.read_noise) << "\n";
  out << "bias = " << format_double(cfg.detector.bias) << "\n";
  out << "smear_beta = " << format_double(cfg.detector.smear_beta) << "\n";
  out << "stray_rate = " << format_double(cfg.detector.stray_rate) << "\n";
  out << "\n[task]\n";
  if (!cfg.task.lambda_list_mm.empty()) {
    out << "lambda_list_mm = ";
    for (std::size_t i = 0; i < cfg.task.lambda_list_mm.size(); ++i)
      out << (i ? "," : "") << format_double(cfg.task.lambda_list_mm[i]);
    out << "\n";
  }
  out << "batches = " << cfg.task.batches << "\n";
  out << "frames_per_batch = " << cfg.task.frames_per_batch << "\n";
  out << "lag_window = " << cfg.task.lag_window << "\n";
  out << "interpolation = " << interp_mode_name(cfg.task.interp) << "\n";
  out << "metric = " << (cfg.task.metric == PeakMetric::Height ? "height" : "area") << "\n";
  out << "xi_halfwidth = " << cfg.task.xi_halfwidth << "\n";
  out << "include_zero_point = " << (cfg.task.include_zero_point ? "true" : "false") << "\n";
  out << "alpha_points = " << cfg.task.alpha_points << "\n";
  out << "alpha_span_rad = " << format_double(cfg.task.alpha_span_rad) << "\n";
  out << "alpha_true_rad = " << format_double(cfg.task.alpha_true_rad) << "\n";
  out << "alpha_period_mm = " << format_double(cfg.task.alpha_period_mm) << "\n";
  out << "intensity_roi = " << cfg.task.intensity_roi << "\n";
  out << "intensity_frames = " << cfg.task.intensity_frames << "\n";
  out << "\n[run]\n";
  out << "out = " << cfg.out_dir << "\n";
  out << "threads = " << cfg.threads << "\n";
  return out.str();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

// ----------------------------------------------------------------------
// CSV / text emission

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError(tmp.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, target);
}

std::string ratio_curve_csv(const RatioCurve& curve) {
  std::ostringstream out;
  out << "delta_x_um,ratio,ratio_err,lambda_um,frames,flags\n";
  for (const auto& p : curve.points) {
    out << format_double(p.delta_x_um) << "," << format_double(p.ratio) << ","
        << format_double(p.ratio_err) << "," << format_double(p.lambda_um) << "," << p.frames
        << "," << p.flags << "\n";
  }
  return out.str();
}

std::string correlation_csv(const CorrelationImage& img) {
  std::ostringstream out;
  for (int iy = 0; iy < img.lag_values.rows(); ++iy) {
    for (int ix = 0; ix < img.lag_values.cols(); ++ix) {
      if (ix) out << ",";
      out << format_double(img.lag_values(iy, ix));
    }
    out << "\n";
  }
  return out.str();
}

std::string correlation_sidecar(const CorrelationImage& img, const std::string& extra) {
  std::ostringstream out;
  out << "frames = " << img.frames << "\n";
  out << "lag_x = " << img.lag_x << "\n";
  out << "lag_y = " << img.lag_y << "\n";
  out << "interpolation = " << img.interpolation << "\n";
  out << "overlap_corrected = " << (img.overlap_corrected ? "true" : "false") << "\n";
  if (!img.provenance.empty()) out << "source = " << img.provenance << "\n";
  if (!extra.empty()) out << extra;
  return out.str();
}

std::optional<PresetId> parse_preset_id(const std::string& name) {
  for (PresetId id : all_presets()) {
    if (name == preset_name(id)) return id;
  }
  return std::nullopt;
}

const char* preset_name(PresetId id) {
  switch (id) {
    case PresetId::Fig2b: return "fig2b";
    case PresetId::Fig3a: return "fig3a";
    case PresetId::Fig3b: return "fig3b";
    case PresetId::Fig3c: return "fig3c";
    case PresetId::Fig3d: return "fig3d";
    case PresetId::Fig4a: return "fig4a";
    case PresetId::FigS2: return "figS2";
    case PresetId::FigS4: return "figS4";
    case PresetId::FigS5: return "figS5";
  }
  return "unknown";
}

std::vector<PresetId> all_presets() {
  return {PresetId::Fig2b, PresetId::Fig3a, PresetId::Fig3b,
          PresetId::Fig3c, PresetId::Fig3d, PresetId::Fig4a,
          PresetId::FigS2, PresetId::FigS4, PresetId::FigS5};
}

}  // namespace biphoton
