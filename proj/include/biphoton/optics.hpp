#pragma once

#include <string>
#include <vector>

#include "biphoton/grid.hpp"

namespace biphoton {

// Source and imaging constants. Areas follow the Gaussian-variance
// convention: the correlation peak is exp(-|d|^2 / (2*A_e)) and the intensity
// profile is exp(-|r|^2 / (2*Sigma)), both in the sample plane, so fitted
// variances equal the configured areas directly. Lengths are mm, areas mm^2.
struct OpticsConfig {
  double wavelength_nm = 814.0;
  double focal_mm = 50.0;             // effective focal length SLM -> sample
  double entanglement_area_mm2 = 1.72e-3;  // A_e
  double beam_area_mm2 = 1.92;             // Sigma
  double slm_envelope_area_mm2 = 0.0;      // Sigma_SLM; 0 = derive from A_e
  double slm_corr_width_mm = 0.34;         // w_SLM, used by the validity check
  double magnification = 2.0;
  double pixel_pitch_um = 16.0;
  int roi_nx = 150;
  int roi_ny = 150;

  double wavelength_mm() const { return wavelength_nm * 1e-6; }
  double lambda_f_mm2() const { return wavelength_mm() * focal_mm; }
  // Sample-plane extent of one camera pixel.
  double sample_pixel_mm() const { return pixel_pitch_um * 1e-3 / magnification; }

  void validate() const;  // throws ConfigError on violated invariants
};

struct SlmMask {
  enum class Kind { Flat, Grating, HalfPlane, Custom };

  Kind kind = Kind::Flat;
  double period_mm = 0.0;   // grating period in the SLM plane
  double alpha_rad = 0.0;   // lateral shift, radians of grating phase
  double phase_rad = 0.0;   // half-plane phase step
  GridD custom_phase;       // phase grid theta(r'), matched to the oracle grid

  static SlmMask flat() { return {}; }
  static SlmMask grating(double period_mm, double alpha_rad = 0.0);
  static SlmMask half_plane(double phase_rad);
  static SlmMask custom(GridD phase);

  std::string describe() const;
  void validate() const;
};

// Symmetric sampling of the SLM aperture: n points at pitch step_mm with
// x(i) = (i - (n-1)/2) * step, so x(i) = -x(n-1-i) exactly.
struct SlmGrid {
  int n = 2048;
  double step_mm = 0.0;

  double coord(int i) const { return (i - 0.5 * (n - 1)) * step_mm; }
  double aperture_mm() const { return n * step_mm; }
};

// Minus-coordinate correlation density on a centred lag grid. values(iy, ix)
// lives at lag ((ix - n/2) * step, (iy - n/2) * step); total mass is 1.
struct CorrelationField {
  GridD values;
  double step_mm = 0.0;

  int n() const { return static_cast<int>(values.rows()); }
  int origin() const { return n() / 2; }
  double lag(int i) const { return (i - origin()) * step_mm; }
  double value_at(double dx_mm, double dy_mm) const;  // nearest-cell lookup

  // Max / integrated mass in a square window centred on (dx, dy).
  double max_near(double dx_mm, double dy_mm, double halfwidth_mm) const;
  double mass_near(double dx_mm, double dy_mm, double halfwidth_mm) const;

  // Mass-weighted second moment about the origin, per axis average. Equals
  // the Gaussian variance parameter for a single centred peak.
  double second_moment_mm2() const;
};

struct RateModelParams {
  double sigma_e_cm2 = 0.0;   // entangled TPA cross-section
  double delta_c_gm = 0.0;    // classical TPA cross-section, GM units
  double entanglement_time_s = 0.0;  // carried scalar, no temporal model
  double multi_pair_coeff = 0.0;     // unitless mixed-regime coefficient
  double pair_flux_hz = 0.0;
};

enum class TpaRegime { EntangledLowGain, Classical, Mixed };

// --- operations -----------------------------------------------------------

// Exponential Fourier coefficient a_n of sgn(cos u): sinc(n/2) for odd n
// (normalized sinc), 0 for even n including n = 0 (zero-mean square wave).
double square_wave_coeff(int n);

// psi(r') = theta(r') + theta(-r') evaluated on the symmetric grid.
GridD symmetrized_phase(const SlmMask& mask, const SlmGrid& grid);

// Overload validating an explicit coordinate axis for origin symmetry.
GridD symmetrized_phase(const SlmMask& mask, const std::vector<double>& axis_mm,
                        double step_mm);

// Default oracle grid for a configuration: step chosen so the lag grid
// resolves the correlation peak (lag step = sqrt(A_e)/8).
SlmGrid default_slm_grid(const OpticsConfig& cfg, int n = 2048);

// Numerical oracle: Gaussian SLM envelope times exp(i*psi), 2D DFT with lag
// scaling delta = lambda*f*(spatial frequency), squared magnitude, unit mass.
// Throws PipelineError if the grating period is under-resolved or aliased
// mass reaches the lag-grid edge.
CorrelationField shaped_correlation(const SlmMask& mask, const OpticsConfig& cfg,
                                    const SlmGrid& grid);
CorrelationField shaped_correlation(const SlmMask& mask, const OpticsConfig& cfg);

struct GratingOrder {
  double center_mm = 0.0;  // lag-axis position of the order
  double weight = 0.0;     // intensity weight, renormalized over kept orders
};

// Ideal-grating order list: centers (2n+1)*lambda*f/period for odd orders up
// to |order| <= n_max, weights proportional to square_wave_coeff^2. Ignores
// inter-order interference, so it is valid only when the order spacing is
// large against sqrt(A_e).
std::vector<GratingOrder> analytic_grating_correlation(double period_mm,
                                                       const OpticsConfig& cfg,
                                                       int n_max);

// Separation of the +/-1 order correlation peaks: 2*lambda*f/period.
double peak_separation_mm(double period_mm, const OpticsConfig& cfg);
// Grating period that produces a given peak separation.
double period_for_separation_mm(double separation_mm, const OpticsConfig& cfg);

struct ThinCrystalCheck {
  bool valid = false;
  double margin = 0.0;  // min period / SLM-plane correlation width
};

// Valid iff min_period >= threshold * w_SLM (inclusive boundary).
ThinCrystalCheck thin_crystal_validity(double w_slm_mm, double min_period_mm,
                                       double ratio_threshold = 3.0);

double tpa_rate(const RateModelParams& params, TpaRegime regime);

// Solves for the SLM envelope area that makes the flat-mask oracle peak
// variance equal A_e (one-parameter bisection on the second moment). The
// closed-form seed (lambda*f)^2 / (16*pi^2*A_e) brackets the root.
double solve_slm_envelope_area(const OpticsConfig& cfg, int grid_n = 1024,
                               double rel_tol = 1e-6);

// Returns cfg with slm_envelope_area_mm2 filled in if it was left at 0.
OpticsConfig with_envelope_area(OpticsConfig cfg);

}  // namespace biphoton
