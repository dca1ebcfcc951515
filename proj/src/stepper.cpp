#include "bo3/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "bo3/fit.hpp"
#include "kernels.hpp"

namespace bo3 {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("solver: dt must be positive");
  if (!std::isfinite(t_start) || !std::isfinite(t_end)) throw PreconditionError("solver: times must be finite");
  if (snapshot_stride < 1) throw PreconditionError("solver: snapshot_stride must be >= 1");
  if (!(tau_tail > 0.0)) throw PreconditionError("solver: tau_tail must be positive");
}

std::size_t SolverConfig::step_count() const {
  const double span = std::abs(t_end - t_start);
  if (span == 0.0) return 0;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
}

const Frame& Trajectory::nearest(double t) const {
  if (frames.empty()) throw PreconditionError("trajectory has no frames");
  auto it = std::lower_bound(frames.begin(), frames.end(), t, [](const Frame& f, double v) { return f.t < v; });
  if (it == frames.end()) return frames.back();
  if (it != frames.begin() && std::abs(std::prev(it)->t - t) < std::abs(it->t - t)) return *std::prev(it);
  return *it;
}

namespace {

/// Linear propagator factors exp(h * Lambda(xi)) for the step sizes in use.
class Propagator {
 public:
  Propagator(const Grid& g, FlowTag tag) : sym_(g.size()) {
    for (std::size_t m = 0; m < g.size(); ++m) sym_[m] = detail::Kernel::linear_symbol(tag, g.wavenumber(m));
    sym_[g.nyquist_index()] = Complex{};
  }

  void prepare(double h) {
    if (h == h_) return;
    h_ = h;
    full_.resize(sym_.size());
    half_.resize(sym_.size());
    for (std::size_t m = 0; m < sym_.size(); ++m) {
      full_[m] = std::exp(sym_[m] * h);
      half_[m] = std::exp(sym_[m] * (0.5 * h));
    }
  }

  Complex factor(std::size_t m, double t) const { return std::exp(sym_[m] * t); }
  const Spectrum& full() const { return full_; }
  const Spectrum& half() const { return half_; }

 private:
  Spectrum sym_, full_, half_;
  double h_ = std::numeric_limits<double>::quiet_NaN();
};

bool finite(const Spectrum& c) {
  double s = 0.0;
  for (const Complex& z : c) s += std::norm(z);
  return std::isfinite(s);
}

/// Right-hand side of the interaction-free formulation: N(t, u).
using NonlinearFn = std::function<void(double, const Spectrum&, Spectrum&)>;

/// One IF-RK4 step of size h from (t, u) in place.
class Rk4 {
 public:
  Rk4(const Grid& g, FlowTag tag) : prop_(g, tag), n_(g.size()), k1_(n_), k2_(n_), k3_(n_), k4_(n_), tmp_(n_) {}

  void step(const NonlinearFn& f, double t, double h, Spectrum& u) {
    prop_.prepare(h);
    const Spectrum& E = prop_.full();
    const Spectrum& Eh = prop_.half();
    f(t, u, k1_);
    for (std::size_t m = 0; m < n_; ++m) tmp_[m] = Eh[m] * (u[m] + 0.5 * h * k1_[m]);
    f(t + 0.5 * h, tmp_, k2_);
    for (std::size_t m = 0; m < n_; ++m) tmp_[m] = Eh[m] * u[m] + 0.5 * h * k2_[m];
    f(t + 0.5 * h, tmp_, k3_);
    for (std::size_t m = 0; m < n_; ++m) tmp_[m] = E[m] * u[m] + h * Eh[m] * k3_[m];
    f(t + h, tmp_, k4_);
    for (std::size_t m = 0; m < n_; ++m)
      u[m] = E[m] * u[m] + (h / 6.0) * (E[m] * k1_[m] + 2.0 * Eh[m] * (k2_[m] + k3_[m]) + k4_[m]);
  }

 private:
  Propagator prop_;
  std::size_t n_;
  Spectrum k1_, k2_, k3_, k4_, tmp_;
};

void record_frame(Trajectory& traj, const GridPtr& g, double t, const Spectrum& u) {
  const RealField f = RealField::from_spectrum(g, u);
  const double tail = tail_fraction(f);
  if (tail > traj.config.tau_tail) traj.warnings.push_back({t, "resolution", tail});
  traj.frames.push_back({t, f});
}

void finish(Trajectory& traj) {
  if (traj.frames.size() > 1 && traj.frames.front().t > traj.frames.back().t) {
    std::reverse(traj.frames.begin(), traj.frames.end());
    std::reverse(traj.warnings.begin(), traj.warnings.end());
  }
}

void check_finite(const Spectrum& u, double t) {
  if (!finite(u)) throw BlowUpError(t);
}

}  // namespace

// ---- background interpolation ------------------------------------------------

struct BackgroundSampler::Impl {
  GridPtr grid;
  std::vector<double> times;
  std::vector<Spectrum> w, dw;
  Spectrum sym;
};

BackgroundSampler::BackgroundSampler(const Trajectory& bg) : impl_(std::make_unique<Impl>()) {
  if (bg.frames.empty()) throw PreconditionError("background trajectory has no frames");
  if (bg.tag != FlowTag::third_order_bo) throw PreconditionError("background must be a third-order trajectory");
  auto& I = *impl_;
  I.grid = bg.frames.front().field.grid_ptr();
  const std::size_t n = I.grid->size();
  I.sym.resize(n);
  for (std::size_t m = 0; m < n; ++m) I.sym[m] = detail::Kernel::linear_symbol(FlowTag::third_order_bo, I.grid->wavenumber(m));
  I.sym[I.grid->nyquist_index()] = Complex{};
  detail::Kernel kernel(I.grid, bg.config.dealias);
  Spectrum nl(n);
  for (const Frame& f : bg.frames) {
    kernel.tbo(f.field.spectrum(), nl);
    Spectrum w(n), dw(n);
    for (std::size_t m = 0; m < n; ++m) {
      const Complex back = std::exp(-I.sym[m] * f.t);
      w[m] = back * f.field.spectrum()[m];
      dw[m] = back * nl[m];
    }
    I.times.push_back(f.t);
    I.w.push_back(std::move(w));
    I.dw.push_back(std::move(dw));
  }
}

BackgroundSampler::~BackgroundSampler() = default;
BackgroundSampler::BackgroundSampler(BackgroundSampler&&) noexcept = default;
BackgroundSampler& BackgroundSampler::operator=(BackgroundSampler&&) noexcept = default;

bool BackgroundSampler::covers(double t) const noexcept {
  const double slack = 1e-9 * std::max(1.0, std::abs(impl_->times.back()));
  return t >= impl_->times.front() - slack && t <= impl_->times.back() + slack;
}

Spectrum BackgroundSampler::spectrum_at(double t) const {
  const auto& I = *impl_;
  if (!covers(t)) throw PreconditionError("background trajectory does not cover t = " + std::to_string(t));
  const std::size_t n = I.grid->size();
  Spectrum out(n);
  if (I.times.size() == 1) {
    for (std::size_t m = 0; m < n; ++m) out[m] = std::exp(I.sym[m] * t) * I.w[0][m];
    return out;
  }
  auto it = std::upper_bound(I.times.begin(), I.times.end(), t);
  std::size_t b = static_cast<std::size_t>(std::distance(I.times.begin(), it));
  b = std::clamp<std::size_t>(b, 1, I.times.size() - 1);
  const std::size_t a = b - 1;
  const double h = I.times[b] - I.times[a];
  const double s = std::clamp((t - I.times[a]) / h, 0.0, 1.0);
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  for (std::size_t m = 0; m < n; ++m) {
    const Complex w = h00 * I.w[a][m] + h10 * h * I.dw[a][m] + h01 * I.w[b][m] + h11 * h * I.dw[b][m];
    out[m] = std::exp(I.sym[m] * t) * w;
  }
  return out;
}

RealField BackgroundSampler::at(double t) const { return RealField::from_spectrum(impl_->grid, spectrum_at(t)); }

// ---- integration ----------------------------------------------------------------

Trajectory integrate(const FlowKind& kind, const RealField& f0, const SolverConfig& config) {
  config.validate();
  const FlowTag tag = kind.tag;
  if (tag == FlowTag::benjamin_ono || tag == FlowTag::third_order_bo || tag == FlowTag::linearized_tbo)
    require_mean_zero(f0, "integrate(" + to_string(tag) + ")");

  std::unique_ptr<BackgroundSampler> sampler;
  if (is_linearized(tag)) {
    if (!kind.background) throw PreconditionError(to_string(tag) + " needs a background trajectory");
    if (!same_grid(kind.background->frames.front().field.grid(), f0.grid()))
      throw PreconditionError("background trajectory lives on a different grid");
    sampler = std::make_unique<BackgroundSampler>(*kind.background);
    if (!sampler->covers(config.t_start) || !sampler->covers(config.t_end))
      throw PreconditionError("background trajectory does not cover the integration window");
  }

  Trajectory traj;
  traj.tag = tag;
  traj.config = config;
  const GridPtr& g = f0.grid_ptr();
  const std::size_t n = g->size();
  const std::size_t steps = config.step_count();
  const double h = steps ? (config.t_end - config.t_start) / static_cast<double>(steps) : 0.0;

  Spectrum u = f0.spectrum();
  u[g->nyquist_index()] = Complex{};
  record_frame(traj, g, config.t_start, u);

  if (tag == FlowTag::airy) {
    for (std::size_t i = config.snapshot_stride; ; i += config.snapshot_stride) {
      const std::size_t s = std::min(i, steps);
      if (s == 0) break;
      const double t = config.t_start + static_cast<double>(s) * h;
      record_frame(traj, g, t, airy_propagate(f0, t - config.t_start).spectrum());
      if (s == steps) break;
    }
    finish(traj);
    return traj;
  }

  detail::Kernel kernel(g, config.dealias);
  Rk4 rk(*g, tag);
  Spectrum bg(n);
  const NonlinearFn rhs = [&](double t, const Spectrum& state, Spectrum& out) {
    if (sampler) {
      bg = sampler->spectrum_at(t);
      kernel.nonlinear(tag, &bg, state, out);
    } else {
      kernel.nonlinear(tag, nullptr, state, out);
    }
  };

  double t = config.t_start;
  for (std::size_t i = 1; i <= steps; ++i) {
    rk.step(rhs, t, h, u);
    t = config.t_start + static_cast<double>(i) * h;
    check_finite(u, t);
    if (i % config.snapshot_stride == 0 || i == steps) record_frame(traj, g, t, u);
  }
  finish(traj);
  return traj;
}

std::pair<Trajectory, Trajectory> integrate_linearized_pair(const RealField& phi0, const RealField& v0,
                                                            const SolverConfig& config) {
  config.validate();
  if (!same_grid(phi0.grid(), v0.grid())) throw PreconditionError("integrate_linearized_pair: grid mismatch");
  require_mean_zero(phi0, "integrate_linearized_pair");
  require_mean_zero(v0, "integrate_linearized_pair");

  const GridPtr& g = phi0.grid_ptr();
  const std::size_t n = g->size();
  Trajectory tp, tv;
  tp.tag = FlowTag::third_order_bo;
  tv.tag = FlowTag::linearized_tbo;
  tp.config = tv.config = config;

  const std::size_t steps = config.step_count();
  const double h = steps ? (config.t_end - config.t_start) / static_cast<double>(steps) : 0.0;
  Spectrum p = phi0.spectrum(), v = v0.spectrum();
  p[g->nyquist_index()] = v[g->nyquist_index()] = Complex{};
  record_frame(tp, g, config.t_start, p);
  record_frame(tv, g, config.t_start, v);

  detail::Kernel kernel(g, config.dealias);
  Propagator prop(*g, FlowTag::third_order_bo);
  Spectrum kp[4] = {Spectrum(n), Spectrum(n), Spectrum(n), Spectrum(n)};
  Spectrum kv[4] = {Spectrum(n), Spectrum(n), Spectrum(n), Spectrum(n)};
  Spectrum sp(n), sv(n);

  auto eval = [&](const Spectrum& a, const Spectrum& b, int k) {
    kernel.tbo(a, kp[k]);
    kernel.linearized(a, b, kv[k]);
  };

  double t = config.t_start;
  for (std::size_t i = 1; i <= steps; ++i) {
    prop.prepare(h);
    const Spectrum& E = prop.full();
    const Spectrum& Eh = prop.half();
    eval(p, v, 0);
    for (std::size_t m = 0; m < n; ++m) {
      sp[m] = Eh[m] * (p[m] + 0.5 * h * kp[0][m]);
      sv[m] = Eh[m] * (v[m] + 0.5 * h * kv[0][m]);
    }
    eval(sp, sv, 1);
    for (std::size_t m = 0; m < n; ++m) {
      sp[m] = Eh[m] * p[m] + 0.5 * h * kp[1][m];
      sv[m] = Eh[m] * v[m] + 0.5 * h * kv[1][m];
    }
    eval(sp, sv, 2);
    for (std::size_t m = 0; m < n; ++m) {
      sp[m] = E[m] * p[m] + h * Eh[m] * kp[2][m];
      sv[m] = E[m] * v[m] + h * Eh[m] * kv[2][m];
    }
    eval(sp, sv, 3);
    for (std::size_t m = 0; m < n; ++m) {
      p[m] = E[m] * p[m] + (h / 6.0) * (E[m] * kp[0][m] + 2.0 * Eh[m] * (kp[1][m] + kp[2][m]) + kp[3][m]);
      v[m] = E[m] * v[m] + (h / 6.0) * (E[m] * kv[0][m] + 2.0 * Eh[m] * (kv[1][m] + kv[2][m]) + kv[3][m]);
    }
    t = config.t_start + static_cast<double>(i) * h;
    check_finite(p, t);
    check_finite(v, t);
    if (i % config.snapshot_stride == 0 || i == steps) {
      record_frame(tp, g, t, p);
      record_frame(tv, g, t, v);
    }
  }
  finish(tp);
  finish(tv);
  return {std::move(tp), std::move(tv)};
}

ConvergenceReport convergence_order(const FlowKind& kind, const RealField& f0, double t_end,
                                    std::vector<double> dt_list) {
  if (dt_list.size() < 3) throw PreconditionError("convergence_order needs at least three step sizes");
  std::sort(dt_list.begin(), dt_list.end(), std::greater<>());
  const double ratio = dt_list[0] / dt_list[1];
  for (std::size_t i = 1; i + 1 < dt_list.size(); ++i)
    if (std::abs(dt_list[i] / dt_list[i + 1] - ratio) > 1e-6 * ratio)
      throw PreconditionError("convergence_order: step sizes must form a geometric ladder");

  auto final_field = [&](double dt) {
    SolverConfig c;
    c.dt = dt;
    c.t_start = 0.0;
    c.t_end = t_end;
    c.snapshot_stride = std::numeric_limits<std::size_t>::max() / 2;
    return integrate(kind, f0, c).frames.back().field;
  };

  const RealField reference = final_field(dt_list.back() / 8.0);
  ConvergenceReport rep;
  rep.dts = dt_list;
  for (double dt : dt_list) rep.errors.push_back(max_difference(final_field(dt), reference));

  const double scale = std::max(reference.sup_norm(), f0.sup_norm());
  const double roundoff = 1e-12 * std::max(scale, 1e-300);
  rep.exact = std::all_of(rep.errors.begin(), rep.errors.end(), [&](double e) { return e <= roundoff; });
  if (rep.exact) {
    rep.order = std::numeric_limits<double>::infinity();
    return rep;
  }
  for (std::size_t i = 1; i < rep.errors.size(); ++i)
    if (!(rep.errors[i] < rep.errors[i - 1]) || !(rep.errors[i] > 0.0)) rep.non_monotone = true;
  if (rep.non_monotone) {
    rep.order = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.order = fit_loglog(rep.dts, rep.errors).slope;
  return rep;
}

void write_trajectory(const std::string& directory, const Trajectory& traj) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  nlohmann::json manifest;
  manifest["flow"] = to_string(traj.tag);
  manifest["config"] = {{"dt", traj.config.dt},
                        {"t_start", traj.config.t_start},
                        {"t_end", traj.config.t_end},
                        {"snapshot_stride", traj.config.snapshot_stride},
                        {"dealias", traj.config.dealias},
                        {"tau_tail", traj.config.tau_tail}};
  nlohmann::json frames = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06zu.dat", i);
    write_snapshot((fs::path(directory) / name).string(), traj.frames[i].field, traj.frames[i].t);
    frames.push_back({{"t", traj.frames[i].t}, {"file", name}});
  }
  manifest["frames"] = frames;
  nlohmann::json warnings = nlohmann::json::array();
  for (const auto& w : traj.warnings) warnings.push_back({{"t", w.t}, {"kind", w.kind}, {"value", w.value}});
  manifest["warnings"] = warnings;
  std::ofstream(fs::path(directory) / "manifest.json") << manifest.dump(2) << "\n";
}

}  // namespace bo3
