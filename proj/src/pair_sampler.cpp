#include "biphoton/pair_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/errors.hpp"

namespace biphoton {

MinusSampler MinusSampler::analytic(std::vector<Component> components, double eta_slm,
                                    double flat_variance_mm2) {
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.variance_mm2 > 0.0)) throw ConfigError("sampler component variance must be > 0");
    if (c.weight < 0.0) throw ConfigError("sampler component weight must be >= 0");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError("sampler component weights must sum to 1");
  MinusSampler s;
  s.tabulated_ = false;
  s.eta_slm_ = eta_slm;
  s.flat_variance_mm2_ = flat_variance_mm2;
  s.components_ = std::move(components);
  return s;
}

MinusSampler MinusSampler::tabulated(const CorrelationField& field, double eta_slm,
                                     double flat_variance_mm2) {
  MinusSampler s;
  s.tabulated_ = true;
  s.eta_slm_ = eta_slm;
  s.flat_variance_mm2_ = flat_variance_mm2;
  s.grid_n_ = field.n();
  s.step_mm_ = field.step_mm;

  // Compact the field to cells carrying mass; the dropped tail is bounded so
  // the CDF still ends at 1 after renormalization.
  const double total = field.values.sum();
  const double threshold = 1e-15 * total;
  double kept = 0.0;
  for (int iy = 0; iy < s.grid_n_; ++iy) {
    for (int ix = 0; ix < s.grid_n_; ++ix) {
      const double v = field.values(iy, ix);
      if (v > threshold) {
        kept += v;
        s.cells_.push_back(iy * s.grid_n_ + ix);
        s.cdf_.push_back(kept);
      }
    }
  }
  if (s.cdf_.empty()) throw PipelineError("tabulated sampler: field has no mass");
  const double inv = 1.0 / kept;
  for (auto& c : s.cdf_) c *= inv;
  s.cdf_.back() = 1.0;
  return s;
}

Vec2 MinusSampler::draw_masked(Stream& rng) const {
  if (tabulated_) {
    const double u = rng.next_double();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const std::int32_t cell = cells_[it == cdf_.end() ? cdf_.size() - 1 : it - cdf_.begin()];
    const int iy = cell / grid_n_;
    const int ix = cell % grid_n_;
    const int half = grid_n_ / 2;
    // Uniform jitter within the cell keeps the density piecewise constant.
    const double jx = rng.next_double() - 0.5;
    const double jy = rng.next_double() - 0.5;
    return {(ix - half + jx) * step_mm_, (iy - half + jy) * step_mm_};
  }
  double u = rng.next_double();
  const Component* chosen = &components_.back();
  for (const auto& c : components_) {
    if (u < c.weight) {
      chosen = &c;
      break;
    }
    u -= c.weight;
  }
  return chosen->center_mm + sample_normal2(rng, std::sqrt(chosen->variance_mm2));
}

Vec2 MinusSampler::draw(Stream& rng) const {
  if (eta_slm_ < 1.0 && rng.next_double() >= eta_slm_) {
    // Undiffracted (zero-order) fraction: unshaped correlation.
    return sample_normal2(rng, std::sqrt(flat_variance_mm2_));
  }
  return draw_masked(rng);
}

void SourceSpec::validate() const {
  optics.validate();
  mask.validate();
  if (!(pair_rate_hz >= 0.0) || !(exposure_s >= 0.0) ||
      !std::isfinite(mean_pairs_per_frame()))
    throw ConfigError("source: pair rate and exposure must be finite and >= 0");
  if (!(eta_slm > 0.0) || eta_slm > 1.0)
    throw ConfigError("source: eta_slm must lie in (0, 1]");
}

std::int64_t draw_pair_count(const SourceSpec& spec, Stream& rng) {
  return sample_poisson(rng, spec.mean_pairs_per_frame());
}

MinusSampler build_minus_sampler(const SlmMask& mask, const OpticsConfig& cfg,
                                 double eta_slm, SamplerMode mode, int n_max) {
  cfg.validate();
  mask.validate();
  const double a_e = cfg.entanglement_area_mm2;
  if (mode == SamplerMode::Analytic) {
    if (mask.kind == SlmMask::Kind::Flat)
      return MinusSampler::analytic({{Vec2::Zero(), a_e, 1.0}}, eta_slm, a_e);
    if (mask.kind == SlmMask::Kind::Grating && mask.alpha_rad == 0.0) {
      std::vector<MinusSampler::Component> comps;
      for (const auto& o : analytic_grating_correlation(mask.period_mm, cfg, n_max))
        comps.push_back({Vec2(o.center_mm, 0.0), a_e, o.weight});
      return MinusSampler::analytic(std::move(comps), eta_slm, a_e);
    }
    throw ConfigError("analytic sampler supports only flat masks and unshifted gratings; "
                      "use tabulated mode for " + mask.describe());
  }
  return MinusSampler::tabulated(shaped_correlation(mask, cfg), eta_slm, a_e);
}

PairEvent sample_pair(const MinusSampler& sampler, const OpticsConfig& cfg, Stream& rng) {
  const Vec2 d = sampler.draw(rng);
  const double sum_var = 4.0 * cfg.beam_area_mm2 - cfg.entanglement_area_mm2;
  const Vec2 u = sample_normal2(rng, std::sqrt(sum_var));
  return {0.5 * (u + d), 0.5 * (u - d)};
}

}  // namespace biphoton
