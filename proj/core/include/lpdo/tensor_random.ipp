#pragma once

#include <cmath>
#include <random>

namespace lpdo {

template <class Rng>
Matrix random_gaussian(std::int64_t rows, std::int64_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Fill column by column so the draw order is fixed.
  for (std::int64_t c = 0; c < cols; ++c) {
    for (std::int64_t r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(r, c) = cplx(re, im) / std::sqrt(2.0);
    }
  }
  return m;
}

template <class Rng>
Matrix random_unitary(std::int64_t n, Rng& rng) {
  return qr_isometrize(random_gaussian(n, n, rng));
}

}  // namespace lpdo
