#include "bo3/flows.hpp"

#include <cmath>

#include "kernels.hpp"

namespace bo3 {

std::string to_string(FlowTag tag) {
  switch (tag) {
    case FlowTag::airy: return "airy";
    case FlowTag::benjamin_ono: return "benjamin_ono";
    case FlowTag::third_order_bo: return "third_order_bo";
    case FlowTag::linearized_tbo: return "linearized_tbo";
    case FlowTag::adjoint_linearized_tbo: return "adjoint_linearized_tbo";
  }
  return "unknown";
}

FlowTag flow_tag_from_string(const std::string& name) {
  for (FlowTag t : {FlowTag::airy, FlowTag::benjamin_ono, FlowTag::third_order_bo, FlowTag::linearized_tbo,
                    FlowTag::adjoint_linearized_tbo})
    if (to_string(t) == name) return t;
  throw PreconditionError("unknown flow kind '" + name + "'");
}

bool is_linearized(FlowTag tag) noexcept {
  return tag == FlowTag::linearized_tbo || tag == FlowTag::adjoint_linearized_tbo;
}

double tail_fraction(const Spectrum& c) noexcept {
  const long n = static_cast<long>(c.size());
  double total = 0.0, tail = 0.0;
  for (long m = 0; m < n; ++m) {
    const long s = m < n / 2 ? m : m - n;
    const double e = std::norm(c[static_cast<std::size_t>(m)]);
    total += e;
    if (3 * std::abs(s) > n) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double tail_fraction(const RealField& f) noexcept { return tail_fraction(f.spectrum()); }

namespace {

void check_tail(const RealField& f, Diagnostics* diag) {
  if (!diag) return;
  const double t = tail_fraction(f);
  diag->tail_fraction = std::max(diag->tail_fraction, t);
  if (t > kTailTolerance) diag->resolution_warning = true;
}

void require_same_grid(const RealField& a, const RealField& b, const char* where) {
  if (!same_grid(a.grid(), b.grid())) throw PreconditionError(std::string(where) + ": fields live on different grids");
}

RealField with_linear_part(const RealField& phi, FlowTag tag, Spectrum nl) {
  const Grid& g = phi.grid();
  for (std::size_t m = 0; m < nl.size(); ++m)
    nl[m] += detail::Kernel::linear_symbol(tag, g.wavenumber(m)) * phi.spectrum()[m];
  nl[g.nyquist_index()] = Complex{};
  return RealField::from_spectrum(phi.grid_ptr(), std::move(nl));
}

}  // namespace

RealField airy_propagate(const RealField& f, double t) {
  return apply_real_symbol(f, [t](double xi) { return std::exp(Complex(0.0, -xi * xi * xi * t)); });
}

ComplexField airy_propagate(const ComplexField& f, double t) {
  return apply_symbol(f, [t](double xi) { return std::exp(Complex(0.0, -xi * xi * xi * t)); });
}

RealField bo_rhs(const RealField& phi, Diagnostics* diag) {
  require_mean_zero(phi, "bo_rhs");
  check_tail(phi, diag);
  detail::Kernel k(phi.grid_ptr());
  Spectrum nl(phi.size());
  k.bo(phi.spectrum(), nl);
  return with_linear_part(phi, FlowTag::benjamin_ono, std::move(nl));
}

RealField tbo_rhs(const RealField& phi, Diagnostics* diag) {
  require_mean_zero(phi, "tbo_rhs");
  check_tail(phi, diag);
  detail::Kernel k(phi.grid_ptr());
  Spectrum nl(phi.size());
  k.tbo(phi.spectrum(), nl);
  return with_linear_part(phi, FlowTag::third_order_bo, std::move(nl));
}

RealField tbo_rhs_conservative(const RealField& phi) {
  const RealField px = derivative(phi);
  const RealField cubic = product(phi, phi, px);
  const RealField bracket = product(phi, hilbert(px)) + hilbert(product(phi, px));
  return derivative(phi, 3) - 0.75 * cubic - 0.75 * derivative(bracket);
}

RealField linearized_tbo_rhs(const RealField& v, const RealField& phi, Diagnostics* diag) {
  require_same_grid(v, phi, "linearized_tbo_rhs");
  require_mean_zero(v, "linearized_tbo_rhs");
  require_mean_zero(phi, "linearized_tbo_rhs");
  check_tail(v, diag);
  check_tail(phi, diag);
  const RealField px = derivative(phi), pxx = derivative(phi, 2);
  const RealField vx = derivative(v), vxx = derivative(v, 2);
  const RealField local = 2.0 * product(phi, px, v) + product(phi, phi, vx) + product(vx, hilbert(px)) +
                          product(px, hilbert(vx)) + product(v, hilbert(pxx)) + product(phi, hilbert(vxx));
  const RealField inside = product(vxx, phi) + product(pxx, v) + 2.0 * product(vx, px);
  return derivative(v, 3) - 0.75 * (local + hilbert(inside));
}

RealField adjoint_linearized_rhs(const RealField& w, const RealField& phi, Diagnostics* diag) {
  require_same_grid(w, phi, "adjoint_linearized_rhs");
  require_mean_zero(phi, "adjoint_linearized_rhs");
  check_tail(w, diag);
  check_tail(phi, diag);
  const RealField px = derivative(phi);
  const RealField wx = derivative(w);
  return derivative(w, 3) + 1.5 * product(phi, px, w) - 0.75 * derivative(product(phi, phi, w)) -
         0.75 * product(wx, hilbert(px)) - 0.75 * derivative(hilbert(product(wx, phi))) -
         0.75 * product(hilbert(derivative(w, 2)), phi);
}

}  // namespace bo3
