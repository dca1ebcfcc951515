#pragma once

#include <span>

namespace bo3 {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of log y against log x. All entries must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace bo3
