#pragma once

// Integrating-factor RK4. With E(t) = exp(t * Lambda) the exact propagator of
// the linear part, the scheme advances the interaction variable
// w = E(-t) u with classical RK4, so the stiff dispersion is handled exactly.
// Linear flows (airy) are propagated in one exact step per stored frame.

#include <string>
#include <utility>
#include <vector>

#include "bo3/flows.hpp"

namespace bo3 {

struct SolverConfig {
  double dt = 1e-4;
  double t_start = 0.0;
  /// May be smaller than t_start for backward integration.
  double t_end = 1.0;
  std::size_t snapshot_stride = 100;
  bool dealias = true;
  double tau_tail = kTailTolerance;

  void validate() const;
  /// Number of fixed steps; the step is shortened so the run ends exactly at t_end.
  std::size_t step_count() const;
};

struct Frame {
  double t;
  RealField field;
};

struct TrajectoryWarning {
  double t;
  std::string kind;
  double value;
};

struct Trajectory {
  FlowTag tag = FlowTag::third_order_bo;
  std::vector<Frame> frames;  // strictly increasing in t
  SolverConfig config;
  std::vector<TrajectoryWarning> warnings;

  double t_min() const { return frames.front().t; }
  double t_max() const { return frames.back().t; }
  const Frame& nearest(double t) const;
};

Trajectory integrate(const FlowKind& kind, const RealField& f0, const SolverConfig& config);

/// Co-evolves phi by the third-order flow and v by the linearized flow about
/// the same phi stages, so no interpolation of the background is involved.
std::pair<Trajectory, Trajectory> integrate_linearized_pair(const RealField& phi0, const RealField& v0,
                                                            const SolverConfig& config);

/// Evaluates a stored third-order trajectory at intermediate times by cubic
/// Hermite interpolation of the interaction variable.
class BackgroundSampler {
 public:
  explicit BackgroundSampler(const Trajectory& background);
  ~BackgroundSampler();
  BackgroundSampler(BackgroundSampler&&) noexcept;
  BackgroundSampler& operator=(BackgroundSampler&&) noexcept;

  bool covers(double t) const noexcept;
  Spectrum spectrum_at(double t) const;
  RealField at(double t) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ConvergenceReport {
  std::vector<double> dts;
  std::vector<double> errors;
  double order = 0.0;
  /// Errors at round-off: the scheme is exact for this problem.
  bool exact = false;
  /// Errors do not shrink monotonically; order is NaN in that case.
  bool non_monotone = false;
};

/// Self-convergence study: each run is compared with a reference at the
/// finest step divided by 8. Needs at least three dt values forming a
/// geometric ladder.
ConvergenceReport convergence_order(const FlowKind& kind, const RealField& f0, double t_end,
                                    std::vector<double> dt_list);

/// Archive: one snapshot file per frame plus manifest.json (times, config, warnings).
void write_trajectory(const std::string& directory, const Trajectory& trajectory);

}  // namespace bo3
