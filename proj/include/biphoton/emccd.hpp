#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "biphoton/grid.hpp"
#include "biphoton/medium.hpp"
#include "biphoton/pair_sampler.hpp"

namespace biphoton {

struct DetectorSpec {
  double eta_q = 0.7;        // quantum efficiency
  double gain = 1000.0;      // counts per photoelectron
  double read_noise = 10.0;  // counts RMS, added at readout
  double smear_beta = 1e-3;  // vertical-transfer crosstalk fraction
  double stray_rate = 0.0;   // mean background photons / pixel / exposure
  double bias = 100.0;       // counts offset
  std::uint16_t saturation = 65535;

  void validate() const;
};

struct Frame {
  GridU16 pixels;
  std::int64_t index = 0;

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
  GridD as_double() const { return pixels.cast<double>(); }
};

struct PixelIndex {
  int ix = 0;
  int iy = 0;
};

// Sample-plane position -> camera pixel through the magnification, with the
// ROI centred on the optical axis. nullopt = outside the ROI.
std::optional<PixelIndex> project_to_pixels(const Vec2& position_mm,
                                            const OpticsConfig& cfg);

// Charge smearing during vertical transfer: each pixel picks up beta times
// the summed charge above it in its column. Acts on the gain-amplified
// signal, before bias and readout noise.
void apply_smear(GridD& signal_counts, double beta);

// Detector response for one exposure. hits(iy, ix) = photons on that pixel.
// Per pixel: binomial QE thinning + Poisson stray electrons -> per-electron
// exponential gain -> smear -> Gaussian(bias, read noise) -> clamp to u16.
// Pixel randomness is keyed by (seed, frame, pixel) so identical hit patterns
// produce identical noise regardless of what happened elsewhere.
Frame expose(const GridI& hits, const DetectorSpec& det, std::uint64_t seed,
             std::int64_t frame_index);

// Per-frame bookkeeping from generation.
struct FrameTelemetry {
  std::int64_t pairs_generated = 0;
  std::int64_t photons_surviving = 0;
  std::int64_t photons_detected_roi = 0;  // photons landing inside the ROI
  std::int64_t photons_out_of_roi = 0;
};

// Generates one frame of the full source -> medium -> detector chain. All
// randomness derives from (spec.seed, frame_index), so any frame can be
// produced independently on any thread.
Frame simulate_frame(const SourceSpec& spec, const MinusSampler& sampler,
                     const MediumSpec& medium, const DetectorSpec& det,
                     std::int64_t frame_index, FrameTelemetry* telemetry = nullptr);

// Streams frame_count frames into a BPF1 file with full provenance metadata.
// Returns aggregate telemetry. Frames are generated in index order.
FrameTelemetry simulate_stack(const SourceSpec& spec, const MediumSpec& medium,
                              const DetectorSpec& det, std::int64_t frame_count,
                              const std::string& path);

}  // namespace biphoton
