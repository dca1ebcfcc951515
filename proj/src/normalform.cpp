#include "bo3/normalform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "bo3/fit.hpp"

namespace bo3 {

namespace {

const Complex I(0.0, 1.0);

ComplexField plus_band(const RealField& f, int k) { return project_band(f, DyadicBand{k, Half::plus}); }

ComplexField unimodular(const RealField& phase, double sign) {
  std::vector<Complex> v(phase.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::exp(Complex(0.0, sign * phase[j]));
  return ComplexField(phase.grid_ptr(), std::move(v));
}

double l2(const ComplexField& f) { return f.l2_norm(); }

}  // namespace

RealField gauge_phase(const RealField& phi) { return -0.5 * antiderivative(phi); }

ComplexField bk_bilinear(const RealField& u, const RealField& v, int k) {
  if (k < 1) throw PreconditionError("bk: band index must be >= 1");
  if (!u.grid().band_resolved(k)) throw PreconditionError("bk: band beyond grid resolution");
  require_mean_zero(u, "bk");
  require_mean_zero(v, "bk");
  const RealField iu = antiderivative(u), iv = antiderivative(v);
  const RealField sym1 = 0.5 * (product(u, iv) + product(v, iu));
  const RealField sym2 = 0.5 * (product(hilbert(u), iv) + product(hilbert(v), iu));
  const ComplexField para =
      Complex(0.5) * (product(antiderivative(project_below(u, k)), plus_band(v, k)) +
                      product(antiderivative(project_below(v, k)), plus_band(u, k)));
  return Complex(0.25) * (I * plus_band(sym1, k) - plus_band(sym2, k) - (2.0 * I) * para);
}

ComplexField bk(const RealField& phi, int k) { return bk_bilinear(phi, phi, k); }

RealField b0(const RealField& phi) {
  require_mean_zero(phi, "b0");
  const RealField high = phi - project_band(phi, 0);
  const RealField ih = antiderivative(high);
  return -0.25 * project_band(product(ih, hilbert(phi)) + hilbert(product(ih, phi)), 0);
}

ComplexField bk_lin(const RealField& phi, const RealField& v, int k) {
  const ComplexField low = product(antiderivative(project_range(v, 0, k)), plus_band(phi, k));
  return Complex(2.0) * bk_bilinear(v, phi, k) + (0.5 * I) * low;
}

BandTransform band_transform(const RealField& phi, int k) {
  ComplexField pk = plus_band(phi, k);
  ComplexField b = bk(phi, k);
  ComplexField tilde = pk + b;
  RealField phase = project_below(gauge_phase(phi), k);
  ComplexField psi = pointwise(tilde, unimodular(phase, -1.0));
  return BandTransform{k, std::move(pk), std::move(b), std::move(tilde), std::move(phase), std::move(psi)};
}

namespace {

RealField flow_rhs(const RealField& phi, FlowTag flow) {
  switch (flow) {
    case FlowTag::airy: return derivative(phi, 3);
    case FlowTag::third_order_bo: return tbo_rhs(phi);
    default: break;
  }
  throw PreconditionError("band residuals are defined for the airy and third_order_bo flows");
}

}  // namespace

ComplexField raw_band_residual(const RealField& phi, int k, FlowTag flow) {
  const RealField nonlinear = flow_rhs(phi, flow) - derivative(phi, 3);
  return plus_band(nonlinear, k);
}

ComplexField gauged_band_residual(const RealField& phi, int k, FlowTag flow) {
  const BandTransform bt = band_transform(phi, k);
  const RealField n = flow_rhs(phi, flow);
  const ComplexField gauge = unimodular(bt.phase, -1.0);
  const ComplexField d_tilde = plus_band(n, k) + Complex(2.0) * bk_bilinear(phi, n, k);
  const RealField d_phase = project_below(-0.5 * antiderivative_unchecked(n), k);
  const ComplexField d_psi = pointwise(d_tilde, gauge) - I * pointwise(bt.psi, ComplexField(d_phase));
  return d_psi - derivative(bt.psi, 3);
}

EnergySeries airy_residual(const Trajectory& traj, int k) {
  if (traj.frames.size() < 3) throw PreconditionError("airy_residual needs at least three frames");
  const auto& fr = traj.frames;
  const double delta = fr[1].t - fr[0].t;
  for (std::size_t i = 1; i < fr.size(); ++i)
    if (std::abs((fr[i].t - fr[i - 1].t) - delta) > 1e-9 * std::max(1.0, std::abs(delta)))
      throw PreconditionError("airy_residual needs uniformly spaced frames");

  std::vector<ComplexField> raw, psi;
  for (const auto& f : fr) {
    raw.push_back(plus_band(f.field, k));
    psi.push_back(band_transform(f.field, k).psi);
  }
  EnergySeries s;
  std::vector<double> r_raw, r_gauged;
  for (std::size_t i = 1; i + 1 < fr.size(); ++i) {
    s.times.push_back(fr[i].t);
    auto residual = [&](const std::vector<ComplexField>& u) {
      const ComplexField diff = airy_propagate(u[i + 1], -delta) - airy_propagate(u[i - 1], delta);
      return l2(Complex(1.0 / (2.0 * delta)) * diff);
    };
    r_raw.push_back(residual(raw));
    r_gauged.push_back(residual(psi));
  }
  s.add("residual_raw", std::move(r_raw));
  s.add("residual_gauged", std::move(r_gauged));
  return s;
}

std::string CubicScalingResult::csv(bool header) const {
  std::ostringstream out;
  if (header) out << "epsilon,k,t,residual_raw,residual_gauged\n";
  char buf[160];
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g\n", amplitudes[i], k, t_probe, raw[i], gauged[i]);
    out << buf;
  }
  return out.str();
}

CubicScalingResult cubic_scaling_test(const RealField& profile, std::vector<double> amplitudes, int k,
                                      double t_probe, const SolverConfig& solver, FlowTag flow) {
  if (amplitudes.size() < 4) throw PreconditionError("cubic_scaling_test needs at least four amplitudes");
  std::sort(amplitudes.begin(), amplitudes.end());
  const double ratio = amplitudes[1] / amplitudes[0];
  for (std::size_t i = 1; i < amplitudes.size(); ++i)
    if (!(amplitudes[i - 1] > 0.0) || std::abs(amplitudes[i] / amplitudes[i - 1] - ratio) > 1e-6 * ratio)
      throw PreconditionError("cubic_scaling_test: amplitudes must form a positive geometric ladder");
  if (!profile.grid().band_resolved(k) || k < 1) throw PreconditionError("cubic_scaling_test: band not resolved");
  if (flow != FlowTag::airy && flow != FlowTag::third_order_bo)
    throw PreconditionError("cubic_scaling_test runs the airy or third_order_bo flow");
  if (tail_fraction(profile) > solver.tau_tail)
    throw PreconditionError("cubic_scaling_test: profile is not resolution-safe");

  CubicScalingResult res;
  res.k = k;
  res.t_probe = t_probe;
  res.amplitudes = amplitudes;
  for (double eps : amplitudes) {
    RealField phi = eps * profile;
    if (t_probe != 0.0) {
      SolverConfig c = solver;
      c.t_start = 0.0;
      c.t_end = t_probe;
      c.snapshot_stride = std::max<std::size_t>(1, c.step_count());
      phi = integrate(FlowKind{flow, nullptr}, phi, c).frames.back().field;
    }
    res.raw.push_back(raw_band_residual(phi, k, flow).l2_norm());
    res.gauged.push_back(gauged_band_residual(phi, k, flow).l2_norm());
  }

  auto slope = [&](const std::vector<double>& r, bool& exact) {
    const double scale = derivative(plus_band(amplitudes.back() * profile, k), 3).l2_norm();
    exact = std::all_of(r.begin(), r.end(), [&](double x) { return x <= 1e-12 * std::max(scale, 1e-300); });
    if (exact) return std::numeric_limits<double>::quiet_NaN();
    if (std::any_of(r.begin(), r.end(), [](double x) { return !(x > 0.0); }))
      throw PreconditionError("cubic_scaling_test: degenerate fit (zero residual)");
    return fit_loglog(amplitudes, r).slope;
  };
  res.slope_raw = slope(res.raw, res.raw_exact);
  res.slope_gauged = slope(res.gauged, res.gauged_exact);
  return res;
}

}  // namespace bo3
