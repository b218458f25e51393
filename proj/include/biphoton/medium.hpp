#pragma once

#include <string>
#include <variant>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/pair_sampler.hpp"
#include "biphoton/rng.hpp"

namespace biphoton {

// Two-photon absorber acting on intact pairs: absorption probability
// s * exp(-|r1 - r2|^2 / (2 w^2)); removes both photons or neither.
struct EtpaAbsorber {
  double strength = 0.0;        // s in [0, 1]
  double kernel_width_mm = 0.0;  // w
};

// Per-photon Bernoulli survival with probability t.
struct LinearLoss {
  double transmission = 1.0;
};

// With probability p, displace a photon by an isotropic Gaussian step.
struct Scatterer {
  double event_probability = 0.0;
  double displacement_mm = 0.0;  // sigma of the step, per axis
};

using MediumElement = std::variant<EtpaAbsorber, LinearLoss, Scatterer>;

// Ordered element list; empty = no medium ("air"). Pair-level absorbers act
// only while both photons survive; per-photon elements act on each survivor.
struct MediumSpec {
  std::vector<MediumElement> elements;

  bool empty() const { return elements.empty(); }
  void validate() const;
  std::string describe() const;
};

struct SurvivingPhotons {
  int count = 0;
  Vec2 positions[2];

  void add(const Vec2& p) { positions[count++] = p; }
};

// Pair-level ETPA outcome; true = the whole pair was absorbed.
bool apply_etpa(const PairEvent& pair, const EtpaAbsorber& absorber, Stream& rng);

// Closed-form mean absorbed fraction for unshaped pairs whose minus
// coordinate has per-axis variance A_e: s * w^2 / (w^2 + A_e).
double expected_etpa_fraction(double strength, double kernel_width_mm,
                              double entanglement_area_mm2);

// Per-photon operations.
bool apply_linear_loss(const Vec2& position, double transmission, Stream& rng);
Vec2 apply_scatter(const Vec2& position, double event_probability,
                   double displacement_mm, Stream& rng);

// Runs the full element chain in listed order.
SurvivingPhotons apply_medium(const PairEvent& pair, const MediumSpec& spec, Stream& rng);

}  // namespace biphoton
