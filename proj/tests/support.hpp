#pragma once

#include <cmath>
#include <random>

#include "bo3/spectral.hpp"

namespace bo3::testing {

// Mean-free random field with Gaussian coefficients on 0 < |xi| <= xi_max.
inline RealField random_field(const GridPtr& g, std::mt19937_64& rng, double xi_max, double xi_min = 0.0) {
  std::normal_distribution<double> normal;
  const std::size_t n = g->size();
  Spectrum c(n);
  for (std::size_t m = 1; m < n / 2; ++m) {
    const double xi = g->wavenumber(m);
    if (xi > xi_max || xi < xi_min) continue;
    c[m] = Complex(normal(rng), normal(rng));
    c[n - m] = std::conj(c[m]);
  }
  return RealField::from_spectrum(g, std::move(c));
}

inline RealField wave(const GridPtr& g, double amplitude, double k, bool sine = true) {
  return RealField::sample(g, [=](double x) { return amplitude * (sine ? std::sin(k * x) : std::cos(k * x)); });
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace bo3::testing
