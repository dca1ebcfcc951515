#pragma once

// Dispersive decay of the Airy-type flows: the time-scaled Japanese bracket,
// the hyperbolic / self-similar / elliptic split of the line, weighted decay
// channels along a trajectory, the t^{-1/3} stationary-phase rate and a
// bilinear Strichartz ratio.

#include <string>
#include <vector>

#include "bo3/fit.hpp"
#include "bo3/spectral.hpp"
#include "bo3/stepper.hpp"

namespace bo3 {

inline constexpr double kDefaultDelta = 0.05;
inline constexpr double kDefaultRegionConstant = 1.0;

/// <x>_t = (x^2 + t^{2/3})^{1/2}
double jbracket(double x, double t);

enum class Region { hyperbolic, self_similar, elliptic };
std::string to_string(Region r);

struct RegionMask {
  GridPtr grid;
  double t = 0.0;
  double c_region = kDefaultRegionConstant;
  std::vector<Region> labels;

  /// c t^{1/3}: hyperbolic for x >= threshold, elliptic for x <= -threshold.
  double threshold() const;
  std::size_t count(Region r) const;
};

RegionMask classify(const GridPtr& grid, double t, double c_region = kDefaultRegionConstant);

/// One row of a decay report: sup-norms over the points of `region`
/// ("all" for the whole grid).
///   weighted_phi_sup   sup t^{1/4} <x>_t^{1/4 - s delta} |phi|
///   weighted_phix_sup  sup t^{3/4} <x>_t^{-1/4 - s delta} |phi_x|
///   elliptic_*_over_log  sup <x>_t |phi| / log(t^{-1/3} <x>_t) and
///                      sup t^{1/2} <x>_t^{1/2} |phi_x| / log(...) over elliptic
///                      points of the row where t^{-1/3} <x>_t >= 2
/// with s = +1 for the primary weights and s = -1 for the alternate ones.
struct DecayRow {
  double t = 0.0;
  std::string region;
  double weighted_phi_sup = 0.0;
  double weighted_phix_sup = 0.0;
  double elliptic_phi_over_log = 0.0;
  double elliptic_phix_over_log = 0.0;
};

struct DecayReport {
  double delta = kDefaultDelta;
  double c_region = kDefaultRegionConstant;
  std::vector<DecayRow> rows;
  std::vector<DecayRow> alternate_rows;
  std::vector<double> skipped_times;  // frames at t <= 0
  std::vector<double> edge_warnings;  // times whose edge fraction exceeded kEdgeTolerance
  /// Fitted time exponents of sup |phi| and sup |phi_x| over the hyperbolic region.
  LineFit phi_fit;
  LineFit phix_fit;

  /// Largest value of a channel over all "all" rows.
  double max_channel(const std::string& channel, bool alternate = false) const;
  /// "t,region,weighted_phi_sup,weighted_phix_sup,elliptic_phi_over_log,elliptic_phix_over_log"
  std::string csv(bool alternate = false) const;
};

DecayReport decay_weights(const Trajectory& trajectory, double delta = kDefaultDelta,
                          double c_region = kDefaultRegionConstant);

struct DecayFit {
  std::vector<double> times;
  std::vector<double> sup;
  LineFit fit;
  double exponent() const { return fit.slope; }
};

/// Exact linear evolution of f0 sampled at `times`, with a least-squares fit
/// of log sup|phi| against log t. For localized data (edge fraction of f0 at
/// most kEdgeTolerance) throws WrapAroundError at the first time whose edge
/// fraction exceeds kEdgeTolerance; periodic data such as a plane wave is not
/// guarded.
DecayFit airy_decay_fit(const RealField& f0, const std::vector<double>& times);

inline constexpr std::size_t kStrichartzSamples = 256;

/// ||e^{t d^3} P_j f . e^{t d^3} P_k g||_{L^2(t in [-t_end, t_end], x)}
/// * 2^{max(j,k)} / (||P_j f|| ||P_k g||), by the trapezoid rule over
/// `samples` exact-propagator times. Bands must satisfy |j - k| > 2 or j = k
/// (the caller then arranges frequency separation inside the band).
double bilinear_strichartz_ratio(int j, int k, const RealField& f, const RealField& g, double t_end,
                                 std::size_t samples = kStrichartzSamples);

}  // namespace bo3
