#include "biphoton/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

LagCenter expected_peak_center(const SlmMask& mask, const OpticsConfig& cfg) {
  if (mask.kind != SlmMask::Kind::Grating) return {0, 0};
  const double d_mm = cfg.lambda_f_mm2() / mask.period_mm;  // +1 order lag
  const double pitch_mm = cfg.pixel_pitch_um * 1e-3;
  return {static_cast<int>(std::lround(d_mm * cfg.magnification / pitch_mm)), 0};
}

double extract_xi(const CorrelationImage& img, LagCenter center, int halfwidth,
                  PeakMetric metric) {
  if (halfwidth < 0) throw ConfigError("xi window halfwidth must be >= 0");
  if (center.dx - halfwidth < -img.lag_x || center.dx + halfwidth > img.lag_x ||
      center.dy - halfwidth < -img.lag_y || center.dy + halfwidth > img.lag_y) {
    std::ostringstream s;
    s << "xi window at (" << center.dx << "," << center.dy << ") +- " << halfwidth
      << " is clipped by the lag grid (+-" << img.lag_x << "," << img.lag_y << ")";
    throw PipelineError(s.str());
  }
  double best = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (int dy = center.dy - halfwidth; dy <= center.dy + halfwidth; ++dy) {
    for (int dx = center.dx - halfwidth; dx <= center.dx + halfwidth; ++dx) {
      const double v = img.at(dx, dy);
      best = std::max(best, v);
      sum += v;
    }
  }
  return metric == PeakMetric::Height ? best : sum;
}

XiMeasurement XiMeasurement::from_batches(std::vector<double> values, LagCenter center,
                                          int halfwidth, std::int64_t frames_per_batch) {
  if (values.empty()) throw PipelineError("xi measurement needs at least one batch");
  XiMeasurement m;
  m.batch_values = std::move(values);
  m.center = center;
  m.halfwidth = halfwidth;
  m.frames_per_batch = frames_per_batch;
  const double n = static_cast<double>(m.batch_values.size());
  double mean = 0.0;
  for (double v : m.batch_values) mean += v;
  mean /= n;
  m.mean = mean;
  if (m.batch_values.size() > 1) {
    double ss = 0.0;
    for (double v : m.batch_values) ss += (v - mean) * (v - mean);
    m.stderr_mean = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return m;
}

RatioWithError ratio_with_error(double xi, double dxi, double xi0, double dxi0) {
  if (!(xi > 0.0) || !(xi0 > 0.0))
    throw PipelineError("ratio needs positive peak values (xi = " + std::to_string(xi) +
                        ", xi0 = " + std::to_string(xi0) + ")");
  RatioWithError out;
  out.ratio = xi / xi0;
  out.error = out.ratio * (dxi0 / xi0 + dxi / xi);
  return out;
}

double ratio_error_quadrature(double xi, double dxi, double xi0, double dxi0) {
  const double r = xi / xi0;
  return r * std::sqrt((dxi / xi) * (dxi / xi) + (dxi0 / xi0) * (dxi0 / xi0));
}

namespace {

struct FitState {
  double a, x0, y0, v, c;
};

double fit_cost(const GridD& img, double scale, const FitState& s, Eigen::VectorXd* grad,
                Eigen::MatrixXd* hess) {
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  double cost = 0.0;
  if (grad) grad->setZero();
  if (hess) hess->setZero();
  Eigen::Matrix<double, 5, 1> j;
  for (int iy = 0; iy < h; ++iy) {
    const double y = iy * scale;
    for (int ix = 0; ix < w; ++ix) {
      const double x = ix * scale;
      const double rx = x - s.x0, ry = y - s.y0;
      const double rho2 = rx * rx + ry * ry;
      const double e = std::exp(-rho2 / (2.0 * s.v));
      const double model = s.a * e + s.c;
      const double r = img(iy, ix) - model;
      cost += r * r;
      if (grad) {
        j[0] = e;
        j[1] = s.a * e * rx / s.v;
        j[2] = s.a * e * ry / s.v;
        j[3] = s.a * e * rho2 / (2.0 * s.v * s.v);
        j[4] = 1.0;
        *grad += j * r;
        hess->selfadjointView<Eigen::Lower>().rankUpdate(j);
      }
    }
  }
  return cost;
}

}  // namespace

namespace {

// One Gauss-Newton/Levenberg descent from a given start; returns whether the
// relative-step criterion was met and leaves the state and cost updated.
bool lm_descend(const GridD& image, double scale, FitState& s, double& cost,
                int& iterations) {
  Eigen::VectorXd grad(5);
  Eigen::MatrixXd hess(5, 5);
  double lambda = 1e-3;
  cost = fit_cost(image, scale, s, &grad, &hess);
  for (int iter = 0; iter < 200; ++iter) {
    ++iterations;
    Eigen::MatrixXd damped = hess.selfadjointView<Eigen::Lower>();
    for (int i = 0; i < 5; ++i) damped(i, i) += lambda * std::max(damped(i, i), 1e-12);
    const Eigen::VectorXd step = damped.ldlt().solve(grad);
    FitState trial = s;
    trial.a += step[0];
    trial.x0 += step[1];
    trial.y0 += step[2];
    trial.v += step[3];
    trial.c += step[4];
    if (!(trial.v > 0.0) || !std::isfinite(trial.v)) {
      lambda *= 10.0;
      if (lambda > 1e14) return false;
      continue;
    }
    const double trial_cost = fit_cost(image, scale, trial, nullptr, nullptr);
    if (trial_cost < cost) {
      const double rel_step = std::abs(step[3]) / std::max(std::abs(s.v), 1e-300) +
                              std::abs(step[0]) / std::max(std::abs(s.a), 1e-300);
      s = trial;
      cost = fit_cost(image, scale, s, &grad, &hess);
      lambda = std::max(lambda * 0.3, 1e-12);
      if (rel_step < 1e-8) return true;
    } else {
      lambda *= 10.0;
      if (lambda > 1e14) return false;
    }
  }
  return false;
}

}  // namespace

GaussianFit fit_gaussian_variance(const GridD& image, double pixel_scale_mm,
                                  double magnification) {
  const int h = static_cast<int>(image.rows());
  const int w = static_cast<int>(image.cols());
  if (h < 5 || w < 5) throw PipelineError("gaussian fit needs at least a 5x5 image");

  // Moment initialization. The offset starts at the image minimum: for peaks
  // wider than the window the border still carries signal, so a border mean
  // would eat a large part of the amplitude.
  FitState init;
  init.c = image.minCoeff();
  init.a = image.maxCoeff() - init.c;
  if (!(init.a > 0.0)) throw PipelineError("gaussian fit: image has no peak");
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      const double v = std::max(0.0, image(iy, ix) - init.c);
      mass += v;
      mx += v * ix;
      my += v * iy;
    }
  init.x0 = mx / mass * pixel_scale_mm;
  init.y0 = my / mass * pixel_scale_mm;
  double m2 = 0.0;
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      const double v = std::max(0.0, image(iy, ix) - init.c);
      const double dx = ix * pixel_scale_mm - init.x0;
      const double dy = iy * pixel_scale_mm - init.y0;
      m2 += v * 0.5 * (dx * dx + dy * dy);
    }
  init.v = std::max(m2 / mass, pixel_scale_mm * pixel_scale_mm * 0.25);

  // Window truncation biases the moment variance, so retry the descent over
  // a ladder of starting widths until one converges.
  FitState s;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  for (double v_scale : {1.0, 2.0, 0.5, 4.0}) {
    s = init;
    s.v = init.v * v_scale;
    if (lm_descend(image, pixel_scale_mm, s, cost, iterations)) {
      converged = true;
      break;
    }
  }

  GaussianFit fit;
  fit.amplitude = s.a;
  fit.center_x_mm = s.x0;
  fit.center_y_mm = s.y0;
  fit.variance_mm2 = s.v;
  fit.variance_sample_mm2 = s.v / (magnification * magnification);
  fit.offset = s.c;
  fit.residual_norm = std::sqrt(cost);
  fit.iterations = iterations;
  fit.converged = converged;
  if (!converged) {
    std::ostringstream msg;
    msg << "gaussian fit did not converge after " << iterations
        << " iterations; residual norm " << fit.residual_norm << ", variance "
        << fit.variance_mm2 << " mm^2, amplitude " << fit.amplitude;
    throw PipelineError(msg.str());
  }
  return fit;
}

AlphaPick pick_alpha(const std::vector<AlphaPoint>& table) {
  if (table.size() < 5) throw ConfigError("alpha calibration needs at least 5 grid points");
  double lo = table.front().xi_zero_order, hi = lo;
  std::vector<double> errs;
  for (const auto& p : table) {
    lo = std::min(lo, p.xi_zero_order);
    hi = std::max(hi, p.xi_zero_order);
    errs.push_back(p.stderr_mean);
  }
  std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
  const double noise = errs[errs.size() / 2];
  if (hi - lo < 3.0 * noise)
    throw PipelineError("alpha scan is flat within noise; increase frames per point");
  AlphaPick pick;
  bool have = false;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& p = table[i];
    const auto& cur = table[pick.index];
    const bool better =
        !have || p.xi_zero_order < cur.xi_zero_order ||
        (p.xi_zero_order == cur.xi_zero_order && std::abs(p.alpha_rad) < std::abs(cur.alpha_rad));
    if (better) {
      pick.index = i;
      pick.alpha_star = p.alpha_rad;
      have = true;
    }
  }
  return pick;
}

}  // namespace biphoton
