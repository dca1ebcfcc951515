#pragma once

#include <stdexcept>
#include <string>

namespace bo3 {

/// Raised when an operation's documented precondition does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input carries a zero mode where a mean-zero field is required.
class MeanNotZeroError : public PreconditionError {
 public:
  MeanNotZeroError(const std::string& where, double mean)
      : PreconditionError(where + ": field mean " + std::to_string(mean) +
                          " exceeds the mean-zero tolerance"),
        mean_(mean) {}

  double mean() const noexcept { return mean_; }

 private:
  double mean_;
};

/// A time integration produced a non-finite sample.
class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(double time)
      : std::runtime_error("non-finite solution at t = " + std::to_string(time)),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Dispersed energy reached the periodic seam, so real-line measurements
/// are no longer trustworthy.
class WrapAroundError : public std::runtime_error {
 public:
  WrapAroundError(double time, double edge_fraction)
      : std::runtime_error("wrap-around contamination at t = " + std::to_string(time) +
                           " (edge energy fraction " + std::to_string(edge_fraction) + ")"),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace bo3
