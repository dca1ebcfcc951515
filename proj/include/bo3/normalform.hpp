#pragma once

// Quadratic normal form and gauge transform for a positive-frequency band.
//
//   phi_k^+   = P_k^+ phi
//   B_k       = 1/4 [ i P_k^+(phi d^{-1}phi) - P_k^+(H phi d^{-1}phi)
//                     - 2i d^{-1}(P_{<k} phi) P_k^+ phi ]
//   tilde_phi = phi_k^+ + B_k(phi, phi)
//   Phi       = -1/2 d^{-1} phi
//   psi       = tilde_phi exp(-i P_{<k} Phi)
//
// With these choices psi solves an Airy equation up to cubic terms. The
// residual routines measure that directly.

#include <string>
#include <vector>

#include "bo3/invariants.hpp"
#include "bo3/stepper.hpp"

namespace bo3 {

/// Phi = -1/2 d^{-1} phi, so that -2 Phi_x = phi.
RealField gauge_phase(const RealField& phi);

/// Symmetric bilinear form with bk_bilinear(phi, phi, k) = bk(phi, k).
ComplexField bk_bilinear(const RealField& u, const RealField& v, int k);
ComplexField bk(const RealField& phi, int k);

/// -1/4 P_0 [ d^{-1}phi_{>0} H phi + H(d^{-1}phi_{>0} phi) ].
RealField b0(const RealField& phi);

/// 2 B_k(v, phi) + i/2 d^{-1}v_{(0,k)} P_k^+ phi, the normal form of the
/// linearized equation.
ComplexField bk_lin(const RealField& phi, const RealField& v, int k);

struct BandTransform {
  int k = 1;
  ComplexField phi_k_plus;
  ComplexField b_k;
  ComplexField tilde_phi;
  RealField phase;  // P_{<k} Phi
  ComplexField psi;
};

BandTransform band_transform(const RealField& phi, int k);

/// (d_t - d_x^3) phi_k^+ at a state, evaluated from the right-hand side of
/// `flow` (airy or third_order_bo).
ComplexField raw_band_residual(const RealField& phi, int k, FlowTag flow = FlowTag::third_order_bo);
/// (d_t - d_x^3) psi at a state, with d_t psi from the exact chain rule of
/// the transform applied to the right-hand side of `flow`.
ComplexField gauged_band_residual(const RealField& phi, int k, FlowTag flow = FlowTag::third_order_bo);

/// Residual of the Airy equation for psi_k^+ measured on stored frames by
/// centered differences of the interaction variable exp(-t d^3) psi. Channels
/// residual_raw and residual_gauged (L2 norms) for every interior frame.
/// Frames must be uniformly spaced.
EnergySeries airy_residual(const Trajectory& trajectory, int k);

struct CubicScalingResult {
  int k = 1;
  double t_probe = 0.0;
  std::vector<double> amplitudes;
  std::vector<double> raw;
  std::vector<double> gauged;
  double slope_raw = 0.0;
  double slope_gauged = 0.0;
  /// Residuals at round-off; the slope is then meaningless and reported as such.
  bool raw_exact = false;
  bool gauged_exact = false;

  /// "epsilon,k,t,residual_raw,residual_gauged"
  std::string csv(bool header = true) const;
};

/// For every amplitude eps: integrate eps * profile to t_probe under `flow`,
/// then evaluate the raw and gauged residual norms there. Amplitudes must be
/// a geometric ladder of at least four values.
CubicScalingResult cubic_scaling_test(const RealField& profile, std::vector<double> amplitudes, int k,
                                      double t_probe, const SolverConfig& solver,
                                      FlowTag flow = FlowTag::third_order_bo);

}  // namespace bo3
