#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace mlwf::detail {

/// Unnormalized DFT along every axis of a C-ordered d-dim array (axis 0
/// slowest): out(n) = sum_s in(s) e^{-2 pi i n.s/N}; `inverse` flips the
/// exponent sign. Plain matrix transforms per axis; grids here are small.
inline void dft_grid(std::vector<std::complex<double>>& data, const std::vector<int>& sizes,
                     bool inverse) {
  using cdouble = std::complex<double>;
  const int d = static_cast<int>(sizes.size());
  int total = 1;
  for (int s : sizes) total *= s;
  std::vector<cdouble> scratch(data.size());
  int stride = total;
  for (int axis = 0; axis < d; ++axis) {
    const int n = sizes[axis];
    stride /= n;
    const int blocks = total / (n * stride);
    std::vector<cdouble> twiddle(static_cast<size_t>(n) * n);
    const double sign = inverse ? +2.0 : -2.0;
    for (int f = 0; f < n; ++f) {
      for (int s = 0; s < n; ++s) {
        twiddle[static_cast<size_t>(f) * n + s] =
            std::exp(cdouble(0.0, sign * std::numbers::pi * static_cast<double>(f) *
                                      static_cast<double>(s) / n));
      }
    }
    for (int b = 0; b < blocks; ++b) {
      for (int offset = 0; offset < stride; ++offset) {
        const int base = b * n * stride + offset;
        for (int f = 0; f < n; ++f) {
          cdouble acc(0.0, 0.0);
          for (int s = 0; s < n; ++s) {
            acc += twiddle[static_cast<size_t>(f) * n + s] * data[base + s * stride];
          }
          scratch[base + f * stride] = acc;
        }
      }
    }
    data.swap(scratch);
  }
}

}  // namespace mlwf::detail
