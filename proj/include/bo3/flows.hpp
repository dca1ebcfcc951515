#pragma once

// Right-hand sides and exact linear propagators for the evolution equations.
//
//   airy                 phi_t = phi_xxx
//   benjamin_ono         phi_t = -H phi_xx + phi phi_x
//   third_order_bo       phi_t = phi_xxx - 3/4 phi^2 phi_x - 3/4 phi_x H phi_x
//                                - 3/4 phi H phi_xx - 3/4 H(phi_xx phi + phi_x^2)
//   linearized_tbo       v_t = v_xxx + (derivative of the cubic/quadratic part)
//   adjoint_linearized   w_t = w_xxx + (formal adjoint coupling)
//
// Every product is computed on the 2n padded grid, which is exact for the
// quadratic and cubic terms that occur.

#include <memory>
#include <string>

#include "bo3/spectral.hpp"

namespace bo3 {

struct Trajectory;

enum class FlowTag { airy, benjamin_ono, third_order_bo, linearized_tbo, adjoint_linearized_tbo };

struct FlowKind {
  FlowTag tag = FlowTag::third_order_bo;
  /// Required for the two linearized kinds.
  std::shared_ptr<const Trajectory> background;

  static FlowKind airy() { return {FlowTag::airy, nullptr}; }
  static FlowKind benjamin_ono() { return {FlowTag::benjamin_ono, nullptr}; }
  static FlowKind third_order_bo() { return {FlowTag::third_order_bo, nullptr}; }
  static FlowKind linearized(std::shared_ptr<const Trajectory> bg) { return {FlowTag::linearized_tbo, std::move(bg)}; }
  static FlowKind adjoint(std::shared_ptr<const Trajectory> bg) {
    return {FlowTag::adjoint_linearized_tbo, std::move(bg)};
  }
};

std::string to_string(FlowTag tag);
FlowTag flow_tag_from_string(const std::string& name);
bool is_linearized(FlowTag tag) noexcept;

/// Relative spectral energy allowed in the top third of the modes before a
/// resolution warning is raised.
inline constexpr double kTailTolerance = 1e-8;

struct Diagnostics {
  bool resolution_warning = false;
  double tail_fraction = 0.0;
};

/// Fraction of spectral energy in modes with |m| > n/3.
double tail_fraction(const Spectrum& c) noexcept;
double tail_fraction(const RealField& f) noexcept;

/// Exact solution of phi_t = phi_xxx: multiplier exp(-i xi^3 t).
RealField airy_propagate(const RealField& f, double t);
ComplexField airy_propagate(const ComplexField& f, double t);

RealField bo_rhs(const RealField& phi, Diagnostics* diag = nullptr);
RealField tbo_rhs(const RealField& phi, Diagnostics* diag = nullptr);
/// phi_xxx - 3/4 phi^2 phi_x - 3/4 [phi H phi_x + H(phi phi_x)]_x, evaluated
/// independently of tbo_rhs and used to cross-check it.
RealField tbo_rhs_conservative(const RealField& phi);
RealField linearized_tbo_rhs(const RealField& v, const RealField& phi, Diagnostics* diag = nullptr);
RealField adjoint_linearized_rhs(const RealField& w, const RealField& phi, Diagnostics* diag = nullptr);

}  // namespace bo3
