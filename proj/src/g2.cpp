#include "biphoton/g2.hpp"

#include <cmath>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

GridD xcorr_naive(const GridD& a, const GridD& b, int lag_x, int lag_y) {
  const int h = static_cast<int>(a.rows());
  const int w = static_cast<int>(a.cols());
  GridD out = GridD::Zero(2 * lag_y + 1, 2 * lag_x + 1);
  for (int dy = -lag_y; dy <= lag_y; ++dy) {
    for (int dx = -lag_x; dx <= lag_x; ++dx) {
      // r and r + d both inside the frame
      const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
      const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
      double sum = 0.0;
      for (int y = y0; y < y1; ++y) {
        const double* ap = a.data() + static_cast<std::ptrdiff_t>(y + dy) * w;
        const double* bp = b.data() + static_cast<std::ptrdiff_t>(y) * w;
        for (int x = x0; x < x1; ++x) sum += ap[x + dx] * bp[x];
      }
      out(dy + lag_y, dx + lag_x) = sum;
    }
  }
  return out;
}

void check_dims(const GridD& a, const GridD& b, int lag_x, int lag_y) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw PipelineError("xcorr: frame dimensions do not match");
  if (lag_x < 0 || lag_y < 0 || lag_x >= a.cols() || lag_y >= a.rows())
    throw PipelineError("xcorr: lag window does not fit inside the frame");
}

}  // namespace

GridD xcorr_lags(const GridD& a, const GridD& b, int lag_x, int lag_y, XcorrMode mode) {
  check_dims(a, b, lag_x, lag_y);
  if (mode == XcorrMode::Naive) return xcorr_naive(a, b, lag_x, lag_y);

  const int h = static_cast<int>(a.rows());
  const int w = static_cast<int>(a.cols());
  const int padded = Fft2::friendly_size(std::max(w + lag_x, h + lag_y));
  Fft2 fft;
  GridC fa = GridC::Zero(padded, padded);
  GridC fb = GridC::Zero(padded, padded);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      fa(y, x) = a(y, x);
      fb(y, x) = b(y, x);
    }
  fft.forward_transposed(fa);
  fft.forward_transposed(fb);
  fa *= fb.conjugate();
  fft.inverse_from_transposed(fa);

  GridD out(2 * lag_y + 1, 2 * lag_x + 1);
  for (int dy = -lag_y; dy <= lag_y; ++dy)
    for (int dx = -lag_x; dx <= lag_x; ++dx)
      out(dy + lag_y, dx + lag_x) = fa((dy + padded) % padded, (dx + padded) % padded).real();
  return out;
}

CorrAccumulator::CorrAccumulator(int width, int height, int lag_x, int lag_y,
                                 XcorrMode mode)
    : width_(width),
      height_(height),
      lag_x_(lag_x),
      lag_y_(lag_y),
      mode_(mode),
      auto_sum_(GridD::Zero(2 * lag_y + 1, 2 * lag_x + 1)),
      cross_sum_(GridD::Zero(2 * lag_y + 1, 2 * lag_x + 1)) {
  if (lag_x < 0 || lag_y < 0 || lag_x >= width || lag_y >= height)
    throw PipelineError("accumulator: lag window does not fit inside the frame");
  if (mode_ == XcorrMode::Fast) {
    padded_ = Fft2::friendly_size(std::max(width + lag_x, height + lag_y));
    spec_cur_.setZero(padded_, padded_);
    spec_prev_.setZero(padded_, padded_);
    work_.setZero(padded_, padded_);
  }
}

void CorrAccumulator::prime(const GridD& frame) {
  if (frames_ != 0 || has_prev_)
    throw PipelineError("prime() must precede all accumulation");
  if (mode_ == XcorrMode::Fast) {
    accumulate_fast(frame, /*count_frame=*/false);
  } else {
    accumulate_naive(frame, /*count_frame=*/false);
  }
}

void CorrAccumulator::accumulate(const GridD& frame) {
  if (frame.rows() != height_ || frame.cols() != width_)
    throw PipelineError("accumulator: frame does not match the configured ROI");
  if (mode_ == XcorrMode::Fast) {
    accumulate_fast(frame, /*count_frame=*/true);
  } else {
    accumulate_naive(frame, /*count_frame=*/true);
  }
}

void CorrAccumulator::accumulate_fast(const GridD& frame, bool count_frame) {
  work_.setZero();
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) work_(y, x) = frame(y, x);
  fft_.forward_transposed(work_);  // spectra live transposed throughout
  spec_cur_.swap(work_);

  if (count_frame) {
    // One inverse recovers both products: the auto spectrum in the real part
    // and the consecutive-frame spectrum in the imaginary part (both are
    // conjugate-symmetric, so their transforms are real).
    if (has_prev_) {
      work_ = spec_cur_.abs2().cast<std::complex<double>>() +
              std::complex<double>(0.0, 1.0) * (spec_prev_ * spec_cur_.conjugate());
    } else {
      work_ = spec_cur_.abs2().cast<std::complex<double>>();
    }
    fft_.inverse_from_transposed(work_);
    for (int dy = -lag_y_; dy <= lag_y_; ++dy) {
      for (int dx = -lag_x_; dx <= lag_x_; ++dx) {
        const std::complex<double> v =
            work_((dy + padded_) % padded_, (dx + padded_) % padded_);
        auto_sum_(dy + lag_y_, dx + lag_x_) += v.real();
        if (has_prev_) cross_sum_(dy + lag_y_, dx + lag_x_) += v.imag();
      }
    }
    if (has_prev_) ++cross_pairs_;
    ++frames_;
  }
  spec_prev_.swap(spec_cur_);
  has_prev_ = true;
}

void CorrAccumulator::accumulate_naive(const GridD& frame, bool count_frame) {
  if (count_frame) {
    auto_sum_ += xcorr_naive(frame, frame, lag_x_, lag_y_);
    if (has_prev_) {
      cross_sum_ += xcorr_naive(prev_frame_, frame, lag_x_, lag_y_);
      ++cross_pairs_;
    }
    ++frames_;
  }
  prev_frame_ = frame;
  has_prev_ = true;
}

void CorrAccumulator::merge(const CorrAccumulator& other) {
  if (other.width_ != width_ || other.height_ != height_ || other.lag_x_ != lag_x_ ||
      other.lag_y_ != lag_y_)
    throw PipelineError("merge: incompatible accumulator geometry");
  auto_sum_ += other.auto_sum_;
  cross_sum_ += other.cross_sum_;
  frames_ += other.frames_;
  cross_pairs_ += other.cross_pairs_;
  if (other.has_prev_) {
    has_prev_ = true;
    if (mode_ == XcorrMode::Fast) {
      spec_prev_ = other.spec_prev_;
    } else {
      prev_frame_ = other.prev_frame_;
    }
  }
}

CorrelationImage CorrAccumulator::finalize() const {
  if (frames_ < 2 || cross_pairs_ < 1)
    throw PipelineError("finalize needs at least 2 accumulated frames");
  CorrelationImage img;
  img.lag_x = lag_x_;
  img.lag_y = lag_y_;
  img.frames = frames_;
  img.lag_values = auto_sum_ / static_cast<double>(frames_) -
                   cross_sum_ / static_cast<double>(cross_pairs_);
  return img;
}

const char* interp_mode_name(InterpMode mode) {
  switch (mode) {
    case InterpMode::Off: return "off";
    case InterpMode::Paper: return "paper";
    case InterpMode::FullColumn: return "full-column";
  }
  return "off";
}

CorrelationImage interpolate_artifacts(CorrelationImage img, InterpMode mode) {
  if (mode == InterpMode::Off) {
    img.interpolation = interp_mode_name(mode);
    return img;
  }
  if (img.lag_x < 1)
    throw PipelineError("interpolation needs the dx = +-1 lag columns");
  if (mode == InterpMode::Paper) {
    img.at(0, 0) = 0.5 * (img.at(1, 0) + img.at(-1, 0));
    if (img.lag_y >= 1) {
      img.at(0, 1) = 0.5 * (img.at(1, 1) + img.at(-1, 1));
      img.at(0, -1) = 0.5 * (img.at(1, -1) + img.at(-1, -1));
    }
  } else {
    for (int dy = -img.lag_y; dy <= img.lag_y; ++dy)
      img.at(0, dy) = 0.5 * (img.at(1, dy) + img.at(-1, dy));
  }
  img.interpolation = interp_mode_name(mode);
  return img;
}

G2Tensor g2_full(const std::vector<GridD>& frames) {
  if (frames.size() < 2) throw PipelineError("g2_full needs at least 2 frames");
  const int ny = static_cast<int>(frames.front().rows());
  const int nx = static_cast<int>(frames.front().cols());
  if (nx > 24 || ny > 24)
    throw PipelineError("g2_full: ROI larger than 24x24 is not supported (oracle scale)");
  const int n = nx * ny;
  Eigen::MatrixXd auto_sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd cross_sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd prev(n), cur(n);
  for (std::size_t m = 0; m < frames.size(); ++m) {
    if (frames[m].rows() != ny || frames[m].cols() != nx)
      throw PipelineError("g2_full: inconsistent frame dimensions");
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) cur[iy * nx + ix] = frames[m](iy, ix);
    auto_sum.noalias() += cur * cur.transpose();
    if (m > 0) cross_sum.noalias() += prev * cur.transpose();
    prev = cur;
  }
  G2Tensor t;
  t.nx = nx;
  t.ny = ny;
  t.frames = static_cast<std::int64_t>(frames.size());
  t.values = auto_sum / static_cast<double>(frames.size()) -
             cross_sum / static_cast<double>(frames.size() - 1);
  return t;
}

GridD minus_projection(const G2Tensor& t, int lag_x, int lag_y) {
  GridD out = GridD::Zero(2 * lag_y + 1, 2 * lag_x + 1);
  for (int dy = -lag_y; dy <= lag_y; ++dy) {
    for (int dx = -lag_x; dx <= lag_x; ++dx) {
      double sum = 0.0;
      for (int iy = std::max(0, -dy); iy < std::min(t.ny, t.ny - dy); ++iy)
        for (int ix = std::max(0, -dx); ix < std::min(t.nx, t.nx - dx); ++ix)
          sum += t.at(ix + dx, iy + dy, ix, iy);
      out(dy + lag_y, dx + lag_x) = sum;
    }
  }
  return out;
}

GridD sum_projection(const G2Tensor& t) {
  GridD out = GridD::Zero(2 * t.ny - 1, 2 * t.nx - 1);
  for (int sy = 0; sy <= 2 * (t.ny - 1); ++sy) {
    for (int sx = 0; sx <= 2 * (t.nx - 1); ++sx) {
      double sum = 0.0;
      for (int iy = std::max(0, sy - t.ny + 1); iy <= std::min(t.ny - 1, sy); ++iy)
        for (int ix = std::max(0, sx - t.nx + 1); ix <= std::min(t.nx - 1, sx); ++ix)
          sum += t.at(sx - ix, sy - iy, ix, iy);
      out(sy, sx) = sum;
    }
  }
  return out;
}

}  // namespace biphoton
