#pragma once

#include <unsupported/Eigen/FFT>

#include <vector>

#include "biphoton/grid.hpp"

namespace biphoton {

// In-place 2D complex FFT, rows then columns with a transpose in between so
// both passes run on contiguous data. Plans are cached per size inside
// Eigen::FFT; keep one Fft2 per thread.
//
// forward() leaves the spectrum TRANSPOSED and inverse() expects a transposed
// spectrum, producing an untransposed result. Elementwise spectral products
// are layout-agnostic, so round trips through forward/product/inverse are
// exact while saving two transposes per direction.
class Fft2 {
 public:
  void forward_transposed(GridC& a) { run(a, false); }
  void inverse_from_transposed(GridC& a) { run(a, true); }  // 1/(rows*cols)

  // Conventional orientation for one-off transforms.
  void forward(GridC& a) {
    run(a, false);
    transpose_into(a);
  }
  void inverse(GridC& a) {
    transpose_into(a);
    run(a, true);
  }

  // Smallest 2^a*3^b*5^c size >= n (sizes kissfft handles with fast radices).
  static int friendly_size(int n) {
    int s = n;
    while (!is_friendly(s)) ++s;
    return s;
  }

 private:
  static bool is_friendly(int n) {
    for (int f : {2, 3, 5}) {
      while (n % f == 0) n /= f;
    }
    return n == 1;
  }

  // FFT rows, transpose, FFT rows: output is the transposed 2D transform.
  void run(GridC& a, bool inverse) {
    const int rows = static_cast<int>(a.rows());
    const int cols = static_cast<int>(a.cols());
    pass(a.data(), rows, cols, inverse);
    transpose_into(a);
    pass(a.data(), cols, rows, inverse);
  }

  void pass(std::complex<double>* data, int rows, int cols, bool inverse) {
    out_.resize(static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
      std::complex<double>* row = data + static_cast<std::ptrdiff_t>(r) * cols;
      if (inverse) {
        fft_.inv(out_.data(), row, cols);
      } else {
        fft_.fwd(out_.data(), row, cols);
      }
      std::copy(out_.begin(), out_.end(), row);
    }
  }

  void transpose_into(GridC& a) {
    scratch_ = a.matrix().transpose().array();
    a.swap(scratch_);
  }

  Eigen::FFT<double> fft_;
  GridC scratch_;
  std::vector<std::complex<double>> out_;
};

}  // namespace biphoton
