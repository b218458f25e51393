#include "biphoton/medium.hpp"

#include <cmath>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

void MediumSpec::validate() const {
  for (const auto& e : elements) {
    if (const auto* a = std::get_if<EtpaAbsorber>(&e)) {
      if (a->strength < 0.0 || a->strength > 1.0)
        throw ConfigError("etpa strength must lie in [0, 1]");
      if (!(a->kernel_width_mm > 0.0)) throw ConfigError("etpa kernel width must be > 0");
    } else if (const auto* l = std::get_if<LinearLoss>(&e)) {
      if (l->transmission < 0.0 || l->transmission > 1.0)
        throw ConfigError("loss transmission must lie in [0, 1]");
    } else if (const auto* s = std::get_if<Scatterer>(&e)) {
      if (s->event_probability < 0.0 || s->event_probability > 1.0)
        throw ConfigError("scatter probability must lie in [0, 1]");
      if (!(s->displacement_mm > 0.0)) throw ConfigError("scatter displacement must be > 0");
    }
  }
}

std::string MediumSpec::describe() const {
  if (elements.empty()) return "none";
  std::ostringstream out;
  bool first = true;
  for (const auto& e : elements) {
    if (!first) out << " | ";
    first = false;
    if (const auto* a = std::get_if<EtpaAbsorber>(&e)) {
      out << "etpa(strength=" << a->strength << ",width_mm=" << a->kernel_width_mm << ")";
    } else if (const auto* l = std::get_if<LinearLoss>(&e)) {
      out << "loss(t=" << l->transmission << ")";
    } else if (const auto* s = std::get_if<Scatterer>(&e)) {
      out << "scatter(p=" << s->event_probability << ",sigma_mm=" << s->displacement_mm
          << ")";
    }
  }
  return out.str();
}

bool apply_etpa(const PairEvent& pair, const EtpaAbsorber& absorber, Stream& rng) {
  const double d2 = (pair.r1 - pair.r2).squaredNorm();
  const double w2 = absorber.kernel_width_mm * absorber.kernel_width_mm;
  const double p = absorber.strength * std::exp(-d2 / (2.0 * w2));
  return rng.next_double() < p;
}

double expected_etpa_fraction(double strength, double kernel_width_mm,
                              double entanglement_area_mm2) {
  if (!(strength > 0.0) || !(kernel_width_mm > 0.0) || !(entanglement_area_mm2 > 0.0))
    throw ConfigError("expected_etpa_fraction needs positive arguments");
  const double w2 = kernel_width_mm * kernel_width_mm;
  return strength * w2 / (w2 + entanglement_area_mm2);
}

bool apply_linear_loss(const Vec2& position, double transmission, Stream& rng) {
  (void)position;  // loss is position independent
  return rng.next_double() < transmission;
}

Vec2 apply_scatter(const Vec2& position, double event_probability, double displacement_mm,
                   Stream& rng) {
  if (rng.next_double() >= event_probability) return position;
  return position + sample_normal2(rng, displacement_mm);
}

SurvivingPhotons apply_medium(const PairEvent& pair, const MediumSpec& spec, Stream& rng) {
  PairEvent current = pair;
  bool alive[2] = {true, true};
  bool pair_intact = true;

  for (const auto& e : spec.elements) {
    if (const auto* a = std::get_if<EtpaAbsorber>(&e)) {
      if (pair_intact && apply_etpa(current, *a, rng)) {
        alive[0] = alive[1] = false;
        pair_intact = false;
      }
    } else if (const auto* l = std::get_if<LinearLoss>(&e)) {
      for (int i = 0; i < 2; ++i) {
        if (alive[i] && !apply_linear_loss(i == 0 ? current.r1 : current.r2,
                                           l->transmission, rng))
          alive[i] = false;
      }
      pair_intact = alive[0] && alive[1];
    } else if (const auto* s = std::get_if<Scatterer>(&e)) {
      if (alive[0]) current.r1 = apply_scatter(current.r1, s->event_probability,
                                               s->displacement_mm, rng);
      if (alive[1]) current.r2 = apply_scatter(current.r2, s->event_probability,
                                               s->displacement_mm, rng);
      pair_intact = alive[0] && alive[1];
    }
    if (!alive[0] && !alive[1]) break;
  }

  SurvivingPhotons out;
  if (alive[0]) out.add(current.r1);
  if (alive[1]) out.add(current.r2);
  return out;
}

}  // namespace biphoton
