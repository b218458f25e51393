#include "biphoton/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/fft2.hpp"

namespace biphoton {

namespace {

constexpr double kPi = std::numbers::pi;

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Phase profile of one mask at a single SLM-plane point.
double mask_phase(const SlmMask& mask, double x_mm, double y_mm) {
  switch (mask.kind) {
    case SlmMask::Kind::Flat:
      return 0.0;
    case SlmMask::Kind::Grating:
      return 0.25 * kPi *
             (sgn(std::cos(2.0 * kPi * x_mm / mask.period_mm + mask.alpha_rad)) + 1.0);
    case SlmMask::Kind::HalfPlane:
      return x_mm > 0.0 ? mask.phase_rad : 0.0;
    case SlmMask::Kind::Custom:
      break;  // handled on the grid, not pointwise
  }
  (void)y_mm;
  return 0.0;
}

void fftshift(GridD& a) {
  const int n = static_cast<int>(a.rows());
  const int h = n / 2;
  GridD out(n, n);
  out.block(0, 0, h, h) = a.block(h, h, h, h);
  out.block(h, h, h, h) = a.block(0, 0, h, h);
  out.block(0, h, h, h) = a.block(h, 0, h, h);
  out.block(h, 0, h, h) = a.block(0, h, h, h);
  a.swap(out);
}

double analytic_envelope_area(const OpticsConfig& cfg) {
  const double lf = cfg.lambda_f_mm2();
  return lf * lf / (16.0 * kPi * kPi * cfg.entanglement_area_mm2);
}

}  // namespace

void OpticsConfig::validate() const {
  std::ostringstream bad;
  if (!(entanglement_area_mm2 > 0.0)) bad << "entanglement_area_mm2 must be > 0; ";
  if (!(beam_area_mm2 > entanglement_area_mm2))
    bad << "beam_area_mm2 must exceed entanglement_area_mm2; ";
  if (!(wavelength_nm > 0.0)) bad << "wavelength_nm must be > 0; ";
  if (!(focal_mm > 0.0)) bad << "focal_mm must be > 0; ";
  if (!(pixel_pitch_um > 0.0)) bad << "pixel_pitch_um must be > 0; ";
  if (!(magnification > 0.0)) bad << "magnification must be > 0; ";
  if (roi_nx < 2 || roi_ny < 2) bad << "roi must be at least 2x2; ";
  if (slm_envelope_area_mm2 < 0.0) bad << "slm_envelope_area_mm2 must be >= 0; ";
  if (!(slm_corr_width_mm > 0.0)) bad << "slm_corr_width_mm must be > 0; ";
  const std::string msg = bad.str();
  if (!msg.empty()) throw ConfigError("optics config: " + msg);
}

SlmMask SlmMask::grating(double period_mm, double alpha_rad) {
  SlmMask m;
  m.kind = Kind::Grating;
  m.period_mm = period_mm;
  m.alpha_rad = alpha_rad;
  m.validate();
  return m;
}

SlmMask SlmMask::half_plane(double phase_rad) {
  SlmMask m;
  m.kind = Kind::HalfPlane;
  m.phase_rad = phase_rad;
  m.validate();
  return m;
}

SlmMask SlmMask::custom(GridD phase) {
  SlmMask m;
  m.kind = Kind::Custom;
  m.custom_phase = std::move(phase);
  m.validate();
  return m;
}

void SlmMask::validate() const {
  switch (kind) {
    case Kind::Flat:
      return;
    case Kind::Grating:
      if (!(period_mm > 0.0)) throw ConfigError("grating period must be > 0");
      return;
    case Kind::HalfPlane:
      if (phase_rad < 0.0 || phase_rad >= 2.0 * kPi)
        throw ConfigError("half-plane phase must lie in [0, 2*pi)");
      return;
    case Kind::Custom:
      if (custom_phase.size() == 0 || !custom_phase.isFinite().all())
        throw ConfigError("custom mask phase grid must be non-empty and finite");
      return;
  }
}

std::string SlmMask::describe() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::Flat:
      s << "flat";
      break;
    case Kind::Grating:
      s << "grating(period_mm=" << period_mm << ", alpha_rad=" << alpha_rad << ")";
      break;
    case Kind::HalfPlane:
      s << "half-plane(phase_rad=" << phase_rad << ")";
      break;
    case Kind::Custom:
      s << "custom(" << custom_phase.rows() << "x" << custom_phase.cols() << ")";
      break;
  }
  return s.str();
}

double square_wave_coeff(int n) {
  if (n % 2 == 0) return 0.0;
  const double half = 0.5 * n;
  return std::sin(kPi * half) / (kPi * half);
}

double CorrelationField::value_at(double dx_mm, double dy_mm) const {
  const int ix = origin() + static_cast<int>(std::lround(dx_mm / step_mm));
  const int iy = origin() + static_cast<int>(std::lround(dy_mm / step_mm));
  if (ix < 0 || iy < 0 || ix >= n() || iy >= n())
    throw PipelineError("correlation field lookup outside the lag grid");
  return values(iy, ix);
}

double CorrelationField::max_near(double dx_mm, double dy_mm, double halfwidth_mm) const {
  const int w = std::max(1, static_cast<int>(std::lround(halfwidth_mm / step_mm)));
  const int cx = origin() + static_cast<int>(std::lround(dx_mm / step_mm));
  const int cy = origin() + static_cast<int>(std::lround(dy_mm / step_mm));
  double best = -1.0;
  for (int iy = std::max(0, cy - w); iy <= std::min(n() - 1, cy + w); ++iy)
    for (int ix = std::max(0, cx - w); ix <= std::min(n() - 1, cx + w); ++ix)
      best = std::max(best, values(iy, ix));
  if (best < 0.0) throw PipelineError("correlation field window outside the lag grid");
  return best;
}

double CorrelationField::mass_near(double dx_mm, double dy_mm, double halfwidth_mm) const {
  const int w = std::max(1, static_cast<int>(std::lround(halfwidth_mm / step_mm)));
  const int cx = origin() + static_cast<int>(std::lround(dx_mm / step_mm));
  const int cy = origin() + static_cast<int>(std::lround(dy_mm / step_mm));
  double mass = 0.0;
  for (int iy = std::max(0, cy - w); iy <= std::min(n() - 1, cy + w); ++iy)
    for (int ix = std::max(0, cx - w); ix <= std::min(n() - 1, cx + w); ++ix)
      mass += values(iy, ix);
  return mass;
}

double CorrelationField::second_moment_mm2() const {
  double m2 = 0.0;
  double mass = 0.0;
  for (int iy = 0; iy < n(); ++iy) {
    const double y = lag(iy);
    for (int ix = 0; ix < n(); ++ix) {
      const double x = lag(ix);
      const double v = values(iy, ix);
      mass += v;
      m2 += v * 0.5 * (x * x + y * y);  // per-axis average
    }
  }
  return m2 / mass;
}

GridD symmetrized_phase(const SlmMask& mask, const SlmGrid& grid) {
  mask.validate();
  GridD psi(grid.n, grid.n);
  if (mask.kind == SlmMask::Kind::Custom) {
    if (mask.custom_phase.rows() != grid.n || mask.custom_phase.cols() != grid.n)
      throw ConfigError("custom mask phase grid does not match the SLM grid");
    for (int iy = 0; iy < grid.n; ++iy)
      for (int ix = 0; ix < grid.n; ++ix)
        psi(iy, ix) = mask.custom_phase(iy, ix) +
                      mask.custom_phase(grid.n - 1 - iy, grid.n - 1 - ix);
    return psi;
  }
  // Masks in this family depend on x only; evaluate one row and replicate.
  Eigen::ArrayXd row(grid.n);
  for (int ix = 0; ix < grid.n; ++ix) {
    const double x = grid.coord(ix);
    row[ix] = mask_phase(mask, x, 0.0) + mask_phase(mask, -x, 0.0);
  }
  for (int iy = 0; iy < grid.n; ++iy) psi.row(iy) = row.transpose();
  return psi;
}

GridD symmetrized_phase(const SlmMask& mask, const std::vector<double>& axis_mm,
                        double step_mm) {
  const int n = static_cast<int>(axis_mm.size());
  for (int i = 0; i < n; ++i) {
    if (std::abs(axis_mm[i] + axis_mm[n - 1 - i]) > 1e-9 * std::abs(step_mm))
      throw ConfigError("SLM sampling grid is not symmetric about the origin");
  }
  SlmGrid grid{n, step_mm};
  return symmetrized_phase(mask, grid);
}

SlmGrid default_slm_grid(const OpticsConfig& cfg, int n) {
  // Lag step of lambda*f/(n*h) = sqrt(A_e)/8: eight lag samples per peak
  // sigma, with the SLM envelope still spanning tens of grid cells.
  const double lag_step = std::sqrt(cfg.entanglement_area_mm2) / 8.0;
  const double h = cfg.lambda_f_mm2() / (n * lag_step);
  return SlmGrid{n, h};
}

CorrelationField shaped_correlation(const SlmMask& mask, const OpticsConfig& cfg) {
  return shaped_correlation(mask, cfg, default_slm_grid(cfg));
}

CorrelationField shaped_correlation(const SlmMask& mask, const OpticsConfig& cfg,
                                    const SlmGrid& grid) {
  cfg.validate();
  if (mask.kind == SlmMask::Kind::Grating && mask.period_mm < 8.0 * grid.step_mm) {
    std::ostringstream s;
    s << "grating period " << mask.period_mm << " mm under-resolved: needs >= 8 grid steps ("
      << 8.0 * grid.step_mm << " mm) on the SLM grid";
    throw PipelineError(s.str());
  }
  const double sigma_slm = cfg.slm_envelope_area_mm2 > 0.0 ? cfg.slm_envelope_area_mm2
                                                           : analytic_envelope_area(cfg);

  const GridD psi = symmetrized_phase(mask, grid);
  GridC field(grid.n, grid.n);
  for (int iy = 0; iy < grid.n; ++iy) {
    const double y = grid.coord(iy);
    for (int ix = 0; ix < grid.n; ++ix) {
      const double x = grid.coord(ix);
      const double envelope = std::exp(-(x * x + y * y) / (4.0 * sigma_slm));
      field(iy, ix) = std::polar(envelope, psi(iy, ix));
    }
  }

  Fft2 fft;
  fft.forward(field);
  GridD intensity = field.abs2();
  fftshift(intensity);

  CorrelationField out;
  out.step_mm = cfg.lambda_f_mm2() / grid.aperture_mm();
  const double total = intensity.sum();
  if (!(total > 0.0)) throw PipelineError("shaped correlation produced zero mass");

  // Aliasing guard: mass within two cells of the lag-grid edge must stay
  // small, otherwise wrapped orders contaminate the field. Ideal binary
  // gratings carry an irreducible ~1e-6..1e-5 band fraction from their 1/n^2
  // order tails, so the trip level is set at the catastrophe scale.
  const int n = grid.n;
  const double edge = intensity.topRows(2).sum() + intensity.bottomRows(2).sum() +
                      intensity.block(2, 0, n - 4, 2).sum() +
                      intensity.block(2, n - 2, n - 4, 2).sum();
  if (edge > 1e-4 * total) {
    std::ostringstream s;
    s << "aliasing detected for mask " << mask.describe() << ": edge mass fraction "
      << edge / total;
    throw PipelineError(s.str());
  }

  out.values = intensity / total;
  return out;
}

std::vector<GratingOrder> analytic_grating_correlation(double period_mm,
                                                       const OpticsConfig& cfg,
                                                       int n_max) {
  if (n_max < 1) throw ConfigError("analytic grating correlation needs n_max >= 1");
  if (!(period_mm > 0.0)) throw ConfigError("grating period must be > 0");
  const double spacing = cfg.lambda_f_mm2() / period_mm;
  std::vector<GratingOrder> orders;
  double total = 0.0;
  for (int m = -n_max; m <= n_max; ++m) {
    if (m % 2 == 0) continue;
    const double a = square_wave_coeff(m);
    orders.push_back({m * spacing, a * a});
    total += a * a;
  }
  for (auto& o : orders) o.weight /= total;
  std::sort(orders.begin(), orders.end(),
            [](const GratingOrder& a, const GratingOrder& b) { return a.center_mm < b.center_mm; });
  return orders;
}

double peak_separation_mm(double period_mm, const OpticsConfig& cfg) {
  if (!(period_mm > 0.0)) throw ConfigError("grating period must be > 0");
  return 2.0 * cfg.lambda_f_mm2() / period_mm;
}

double period_for_separation_mm(double separation_mm, const OpticsConfig& cfg) {
  if (!(separation_mm > 0.0)) throw ConfigError("peak separation must be > 0");
  return 2.0 * cfg.lambda_f_mm2() / separation_mm;
}

ThinCrystalCheck thin_crystal_validity(double w_slm_mm, double min_period_mm,
                                       double ratio_threshold) {
  if (!(w_slm_mm > 0.0) || !(min_period_mm > 0.0))
    throw ConfigError("thin-crystal check needs positive widths");
  ThinCrystalCheck out;
  out.margin = min_period_mm / w_slm_mm;
  out.valid = out.margin >= ratio_threshold;
  return out;
}

double tpa_rate(const RateModelParams& p, TpaRegime regime) {
  if (p.sigma_e_cm2 < 0.0 || p.delta_c_gm < 0.0 || p.pair_flux_hz < 0.0 ||
      p.multi_pair_coeff < 0.0 || p.entanglement_time_s < 0.0)
    throw ConfigError("rate model parameters must be non-negative");
  const double phi = p.pair_flux_hz;
  switch (regime) {
    case TpaRegime::EntangledLowGain:
      return p.sigma_e_cm2 * phi;
    case TpaRegime::Classical:
      return p.delta_c_gm * phi * phi;
    case TpaRegime::Mixed:
      return p.sigma_e_cm2 * phi + p.multi_pair_coeff * p.delta_c_gm * phi * phi;
  }
  return 0.0;
}

double solve_slm_envelope_area(const OpticsConfig& cfg, int grid_n, double rel_tol) {
  cfg.validate();
  const double seed = analytic_envelope_area(cfg);
  auto moment = [&](double area) {
    OpticsConfig c = cfg;
    c.slm_envelope_area_mm2 = area;
    const auto field = shaped_correlation(SlmMask::flat(), c, default_slm_grid(c, grid_n));
    return field.second_moment_mm2();
  };
  // Peak variance decreases monotonically with envelope area.
  double lo = seed / 4.0, hi = seed * 4.0;
  if (moment(lo) < cfg.entanglement_area_mm2 || moment(hi) > cfg.entanglement_area_mm2)
    throw PipelineError("envelope-area bisection bracket does not contain the root");
  while ((hi - lo) > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (moment(mid) > cfg.entanglement_area_mm2) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

OpticsConfig with_envelope_area(OpticsConfig cfg) {
  if (cfg.slm_envelope_area_mm2 <= 0.0)
    cfg.slm_envelope_area_mm2 = solve_slm_envelope_area(cfg, 512);
  return cfg;
}

}  // namespace biphoton
