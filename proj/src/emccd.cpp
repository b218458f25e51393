#include "biphoton/emccd.hpp"

#include <cmath>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/framestack.hpp"

namespace biphoton {

void DetectorSpec::validate() const {
  std::ostringstream bad;
  if (!(eta_q > 0.0) || eta_q > 1.0) bad << "eta_q must lie in (0, 1]; ";
  if (!(gain > 0.0)) bad << "gain must be > 0; ";
  if (read_noise < 0.0) bad << "read_noise must be >= 0; ";
  if (smear_beta < 0.0 || smear_beta >= 1.0) bad << "smear_beta must lie in [0, 1); ";
  if (stray_rate < 0.0) bad << "stray_rate must be >= 0; ";
  if (bias < 0.0) bad << "bias must be >= 0; ";
  const std::string msg = bad.str();
  if (!msg.empty()) throw ConfigError("detector config: " + msg);
}

std::optional<PixelIndex> project_to_pixels(const Vec2& position_mm,
                                            const OpticsConfig& cfg) {
  const double pitch_mm = cfg.pixel_pitch_um * 1e-3;
  const int ix = static_cast<int>(
      std::floor(position_mm.x() * cfg.magnification / pitch_mm)) + cfg.roi_nx / 2;
  const int iy = static_cast<int>(
      std::floor(position_mm.y() * cfg.magnification / pitch_mm)) + cfg.roi_ny / 2;
  if (ix < 0 || iy < 0 || ix >= cfg.roi_nx || iy >= cfg.roi_ny) return std::nullopt;
  return PixelIndex{ix, iy};
}

void apply_smear(GridD& signal_counts, double beta) {
  if (beta < 0.0 || beta >= 1.0) throw ConfigError("smear beta must lie in [0, 1)");
  if (beta == 0.0) return;
  const int h = static_cast<int>(signal_counts.rows());
  const int w = static_cast<int>(signal_counts.cols());
  for (int x = 0; x < w; ++x) {
    double above = 0.0;
    for (int y = 0; y < h; ++y) {
      const double original = signal_counts(y, x);
      signal_counts(y, x) += beta * above;
      above += original;
    }
  }
}

Frame expose(const GridI& hits, const DetectorSpec& det, std::uint64_t seed,
             std::int64_t frame_index) {
  det.validate();
  const int h = static_cast<int>(hits.rows());
  const int w = static_cast<int>(hits.cols());
  const double stray_electrons = det.stray_rate * det.eta_q;

  GridD signal(h, w);
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      Stream rng = frame_stream(seed, frame_index, StreamRole::Detector,
                                static_cast<std::uint64_t>(iy) * w + ix);
      int electrons = 0;
      const int n = hits(iy, ix);
      if (n > 0) electrons = sample_binomial(rng, n, det.eta_q);
      if (stray_electrons > 0.0)
        electrons += static_cast<int>(sample_poisson(rng, stray_electrons));
      signal(iy, ix) = electrons > 0 ? sample_gain_counts(rng, electrons, det.gain) : 0.0;
    }
  }

  apply_smear(signal, det.smear_beta);

  Frame frame;
  frame.index = frame_index;
  frame.pixels.resize(h, w);
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      Stream rng = frame_stream(seed, frame_index, StreamRole::Detector,
                                0x80000000ull + static_cast<std::uint64_t>(iy) * w + ix);
      double value = signal(iy, ix) + det.bias;
      if (det.read_noise > 0.0) value += det.read_noise * sample_normal(rng);
      value = std::round(value);
      if (value < 0.0) value = 0.0;
      if (value > det.saturation) value = det.saturation;
      frame.pixels(iy, ix) = static_cast<std::uint16_t>(value);
    }
  }
  return frame;
}

Frame simulate_frame(const SourceSpec& spec, const MinusSampler& sampler,
                     const MediumSpec& medium, const DetectorSpec& det,
                     std::int64_t frame_index, FrameTelemetry* telemetry) {
  Stream count_rng = frame_stream(spec.seed, frame_index, StreamRole::PairCount);
  Stream pair_rng = frame_stream(spec.seed, frame_index, StreamRole::PairPositions);
  Stream medium_rng = frame_stream(spec.seed, frame_index, StreamRole::Medium);

  const std::int64_t n_pairs = draw_pair_count(spec, count_rng);

  GridI hits = GridI::Zero(spec.optics.roi_ny, spec.optics.roi_nx);
  FrameTelemetry tel;
  tel.pairs_generated = n_pairs;
  for (std::int64_t i = 0; i < n_pairs; ++i) {
    const PairEvent pair = sample_pair(sampler, spec.optics, pair_rng);
    const SurvivingPhotons photons = apply_medium(pair, medium, medium_rng);
    tel.photons_surviving += photons.count;
    for (int k = 0; k < photons.count; ++k) {
      if (const auto px = project_to_pixels(photons.positions[k], spec.optics)) {
        ++hits(px->iy, px->ix);
        ++tel.photons_detected_roi;
      } else {
        ++tel.photons_out_of_roi;
      }
    }
  }

  if (telemetry) *telemetry = tel;
  return expose(hits, det, spec.seed, frame_index);
}

FrameTelemetry simulate_stack(const SourceSpec& spec, const MediumSpec& medium,
                              const DetectorSpec& det, std::int64_t frame_count,
                              const std::string& path) {
  spec.validate();
  medium.validate();
  det.validate();
  if (frame_count < 2) throw ConfigError("a stack needs at least 2 frames");

  const MinusSampler sampler =
      build_minus_sampler(spec.mask, spec.optics, spec.eta_slm, SamplerMode::Tabulated);

  std::map<std::string, std::string> meta;
  meta["seed"] = std::to_string(spec.seed);
  meta["pair_rate_hz"] = std::to_string(spec.pair_rate_hz);
  meta["exposure_s"] = std::to_string(spec.exposure_s);
  meta["eta_slm"] = std::to_string(spec.eta_slm);
  meta["mask"] = spec.mask.describe();
  meta["medium"] = medium.describe();
  meta["wavelength_nm"] = std::to_string(spec.optics.wavelength_nm);
  meta["focal_mm"] = std::to_string(spec.optics.focal_mm);
  meta["entanglement_area_mm2"] = std::to_string(spec.optics.entanglement_area_mm2);
  meta["beam_area_mm2"] = std::to_string(spec.optics.beam_area_mm2);
  meta["magnification"] = std::to_string(spec.optics.magnification);
  meta["pixel_pitch_um"] = std::to_string(spec.optics.pixel_pitch_um);
  meta["detector_eta_q"] = std::to_string(det.eta_q);
  meta["detector_gain"] = std::to_string(det.gain);
  meta["detector_read_noise"] = std::to_string(det.read_noise);
  meta["detector_smear_beta"] = std::to_string(det.smear_beta);
  meta["detector_stray_rate"] = std::to_string(det.stray_rate);
  meta["detector_bias"] = std::to_string(det.bias);

  FrameStackWriter writer(path, spec.optics.roi_nx, spec.optics.roi_ny, meta);
  FrameTelemetry total;
  for (std::int64_t m = 0; m < frame_count; ++m) {
    FrameTelemetry tel;
    Frame frame;
    try {
      frame = simulate_frame(spec, sampler, medium, det, m, &tel);
    } catch (const std::exception& e) {
      throw PipelineError("frame " + std::to_string(m) + ": " + e.what());
    }
    writer.append(frame);
    total.pairs_generated += tel.pairs_generated;
    total.photons_surviving += tel.photons_surviving;
    total.photons_detected_roi += tel.photons_detected_roi;
    total.photons_out_of_roi += tel.photons_out_of_roi;
  }
  writer.close();
  return total;
}

}  // namespace biphoton
