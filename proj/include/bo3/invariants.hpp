#pragma once

// Conserved and almost-conserved functionals: the first three energies of the
// hierarchy, the vector fields L = x + 3t d_xx and its nonlinear counterpart,
// and the cubic modified energy of the linearized flow.

#include <string>
#include <vector>

#include "bo3/spectral.hpp"
#include "bo3/stepper.hpp"

namespace bo3 {

/// Sign convention for the cubic and quartic densities. Under phi -> -phi the
/// Benjamin-Ono energies become the energies conserved by the third-order
/// flow, so both flows are served by one family.
enum class Hierarchy { benjamin_ono, third_order_bo };

/// int phi^2
double e0(const RealField& phi);
/// int phi H phi_x + s/3 phi^3, with s = -1 (benjamin_ono) or +1 (third_order_bo)
double e1(const RealField& phi, Hierarchy h = Hierarchy::third_order_bo);
/// int phi_x^2 + s 3/4 phi^2 H phi_x + 1/8 phi^4
double e2(const RealField& phi, Hierarchy h = Hierarchy::third_order_bo);

inline constexpr double kEdgeTolerance = 1e-6;
inline constexpr double kEdgeWindow = 0.1;

/// Fraction of ||f||^2 carried by the outer `window` of the domain (|x| beyond
/// (1/2 - window) L). The mean over that region is removed first, so a
/// constant far-field offset does not count as leakage.
double edge_fraction(const RealField& f, double window = kEdgeWindow);

struct WeightedField {
  RealField field;
  double edge_fraction = 0.0;
  bool edge_warning = false;
};

/// x phi + 3t phi_xx with x the centered coordinate.
WeightedField l_vector_field(const RealField& phi, double t);
/// x phi + 3t phi_xx - 3t/4 phi^3 - 9t/4 [phi H phi_x + H(phi phi_x)].
/// Its derivative is phi + x phi_x + 3t phi_t, the generator of the scaling
/// symmetry, so it solves the adjoint linearized equation along the flow.
WeightedField l_nonlinear(const RealField& phi, double t);

inline constexpr double kCutoffConstant = 1.0;

struct ModifiedEnergy {
  double quadratic = 0.0;  // ||y||^2
  double cubic = 0.0;      // high-frequency normal-form correction
  double total() const { return quadratic + cubic; }
};

/// Projector to frequencies above c t^{-1/3}: symbol 1 - psi(xi t^{1/3} / c).
RealField high_part(const RealField& f, double t, double c = kCutoffConstant);
/// E3 = -int a Ha H phi_hi with a = |D|^{-1/2} y_hi. Along the linearized
/// flow the time derivative of E3 cancels the high-high part of d/dt ||y||^2
/// that is linear in phi; frequencies below the cutoff c t^{-1/3} are left
/// uncorrected.
ModifiedEnergy modified_energy(const RealField& y, const RealField& phi, double t, double c = kCutoffConstant);

struct EnergySeries {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> channels;

  std::size_t index(const std::string& name) const;
  const std::vector<double>& channel(const std::string& name) const;
  void add(const std::string& name, std::vector<double> values);
  /// max |v - v0| / |v0|; absolute when v0 = 0.
  double drift(const std::string& name) const;
  /// "t,ch1,ch2,..." then one row per time, round-trip precision.
  std::string csv() const;
  void write_csv(const std::string& path) const;
};

/// Channels: E0, E1, E2 (third-order signs), E1_bo, E2_bo (printed
/// Benjamin-Ono signs), L2, sup, H<s> and Hdot<s> Sobolev norms (e.g. H1,
/// Hdot0.5), l_norm (||L phi||), lnl_half_norm (||L^NL phi||_{Hdot^1/2}),
/// edge (edge fraction). Unknown names throw.
EnergySeries track(const Trajectory& trajectory, const std::vector<std::string>& channels);

/// Channels along a coupled (phi, v) run with y = |D|^{-1/2} v: y_l2, v_l2,
/// E2_quad, E3, modified_energy, E3_scaled (E3 / t^{1/12}). E3-based channels
/// are 0 at t = 0.
EnergySeries track_linearized(const Trajectory& phi, const Trajectory& v, const std::vector<std::string>& channels);

}  // namespace bo3
