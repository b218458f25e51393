#pragma once

#include <cstdint>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/optics.hpp"
#include "biphoton/rng.hpp"

namespace biphoton {

// One photon pair in the sample plane, continuous positions in mm.
struct PairEvent {
  Vec2 r1;
  Vec2 r2;
};

enum class SamplerMode { Analytic, Tabulated };

// Sampler of the minus coordinate d = r1 - r2. Analytic mode is a Gaussian
// mixture (valid for flat masks and unshifted gratings with well-separated
// orders); tabulated mode inverts the CDF of the shaped-correlation oracle.
// A (1 - eta_slm) fraction of draws bypasses the mask and follows the flat
// (zero-order) distribution.
class MinusSampler {
 public:
  struct Component {
    Vec2 center_mm;
    double variance_mm2;  // per axis
    double weight;
  };

  static MinusSampler analytic(std::vector<Component> components, double eta_slm,
                               double flat_variance_mm2);
  static MinusSampler tabulated(const CorrelationField& field, double eta_slm,
                                double flat_variance_mm2);

  Vec2 draw(Stream& rng) const;

  bool is_tabulated() const { return tabulated_; }
  double eta_slm() const { return eta_slm_; }
  const std::vector<Component>& components() const { return components_; }

 private:
  MinusSampler() = default;

  Vec2 draw_masked(Stream& rng) const;

  bool tabulated_ = false;
  double eta_slm_ = 1.0;
  double flat_variance_mm2_ = 0.0;
  std::vector<Component> components_;
  // Tabulated: compact CDF over cells carrying mass, plus their flat indices.
  std::vector<double> cdf_;
  std::vector<std::int32_t> cells_;
  int grid_n_ = 0;
  double step_mm_ = 0.0;
};

// Full description of the photon-pair source for one stack.
struct SourceSpec {
  double pair_rate_hz = 3e6;
  double exposure_s = 2e-3;
  double eta_slm = 1.0;  // diffracted fraction; the rest stays zero-order
  SlmMask mask;
  OpticsConfig optics;
  std::uint64_t seed = 1;

  double mean_pairs_per_frame() const { return pair_rate_hz * exposure_s; }
  void validate() const;
};

// Pair arrivals per exposure in the low-gain regime: Poisson(rate * exposure).
std::int64_t draw_pair_count(const SourceSpec& spec, Stream& rng);

// Builds the minus-coordinate sampler for a mask. Analytic mode accepts only
// flat masks and unshifted gratings (n_max = 9 orders); everything else needs
// the tabulated oracle route.
MinusSampler build_minus_sampler(const SlmMask& mask, const OpticsConfig& cfg,
                                 double eta_slm, SamplerMode mode, int n_max = 9);

// Draws one pair: minus coordinate from the sampler, sum coordinate from the
// beam envelope (per-axis variance 4*Sigma - A_e so the single-photon
// intensity has fitted variance Sigma).
PairEvent sample_pair(const MinusSampler& sampler, const OpticsConfig& cfg, Stream& rng);

}  // namespace biphoton
