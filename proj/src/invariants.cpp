#include "bo3/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bo3 {

namespace {

double sign_of(Hierarchy h) { return h == Hierarchy::third_order_bo ? 1.0 : -1.0; }

}  // namespace

double e0(const RealField& phi) { return inner(phi, phi); }

double e1(const RealField& phi, Hierarchy h) {
  const RealField sq = product(phi, phi);
  return inner(phi, hilbert(derivative(phi))) + sign_of(h) / 3.0 * inner(sq, phi);
}

double e2(const RealField& phi, Hierarchy h) {
  const RealField px = derivative(phi);
  const RealField sq = product(phi, phi);
  return inner(px, px) + sign_of(h) * 0.75 * inner(sq, hilbert(px)) + inner(sq, sq) / 8.0;
}

double edge_fraction(const RealField& f, double window) {
  const Grid& g = f.grid();
  const double cut = (0.5 - window) * g.length();
  double total = 0.0, sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    total += f[j] * f[j];
    if (std::abs(g.x(j)) >= cut) {
      sum += f[j];
      sq += f[j] * f[j];
      ++count;
    }
  }
  if (total == 0.0 || count == 0) return 0.0;
  const double mean = sum / static_cast<double>(count);
  const double centred = std::max(0.0, sq - static_cast<double>(count) * mean * mean);
  return centred / total;
}

namespace {

WeightedField weighted(RealField field, const RealField& phi) {
  const double edge = edge_fraction(phi);
  return WeightedField{std::move(field), edge, edge > kEdgeTolerance};
}

}  // namespace

WeightedField l_vector_field(const RealField& phi, double t) {
  const auto x = phi.grid().coordinates();
  return weighted(pointwise(phi, x) + (3.0 * t) * derivative(phi, 2), phi);
}

WeightedField l_nonlinear(const RealField& phi, double t) {
  const auto x = phi.grid().coordinates();
  const RealField px = derivative(phi);
  const RealField bracket = product(phi, hilbert(px)) + hilbert(product(phi, px));
  const RealField out = pointwise(phi, x) + (3.0 * t) * derivative(phi, 2) - (0.75 * t) * product(phi, phi, phi) -
                        (2.25 * t) * bracket;
  return weighted(out, phi);
}

RealField high_part(const RealField& f, double t, double c) {
  if (!(t > 0.0)) throw PreconditionError("high-frequency cutoff needs t > 0");
  const double scale = std::cbrt(t) / c;
  return apply_real_symbol(f, [scale](double xi) { return Complex(1.0 - partition_bump(xi * scale)); });
}

ModifiedEnergy modified_energy(const RealField& y, const RealField& phi, double t, double c) {
  if (!(t > 0.0)) throw PreconditionError("modified_energy needs t > 0");
  require_mean_zero(y, "modified_energy");
  require_mean_zero(phi, "modified_energy");
  ModifiedEnergy e;
  e.quadratic = inner(y, y);
  const RealField a = abs_derivative_power(high_part(y, t, c), -0.5);
  const RealField ph = high_part(phi, t, c);
  e.cubic = -inner(product(a, hilbert(a)), hilbert(ph));
  return e;
}

// ---- series ----------------------------------------------------------------

std::size_t EnergySeries::index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw PreconditionError("unknown channel '" + name + "'");
  return static_cast<std::size_t>(std::distance(names.begin(), it));
}

const std::vector<double>& EnergySeries::channel(const std::string& name) const { return channels[index(name)]; }

void EnergySeries::add(const std::string& name, std::vector<double> values) {
  if (values.size() != times.size()) throw PreconditionError("channel length does not match time count");
  names.push_back(name);
  channels.push_back(std::move(values));
}

double EnergySeries::drift(const std::string& name) const {
  const auto& v = channel(name);
  if (v.empty()) return 0.0;
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x - v.front()));
  return v.front() != 0.0 ? worst / std::abs(v.front()) : worst;
}

std::string EnergySeries::csv() const {
  std::ostringstream out;
  out << "t";
  for (const auto& n : names) out << "," << n;
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", times[i]);
    out << buf;
    for (const auto& ch : channels) {
      std::snprintf(buf, sizeof buf, "%.17g", ch[i]);
      out << "," << buf;
    }
    out << "\n";
  }
  return out.str();
}

void EnergySeries::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << csv();
}

namespace {

bool parse_sobolev(const std::string& name, double& s, bool& homogeneous) {
  std::string rest;
  if (name.rfind("Hdot", 0) == 0) {
    homogeneous = true;
    rest = name.substr(4);
  } else if (name.size() > 1 && name[0] == 'H') {
    homogeneous = false;
    rest = name.substr(1);
  } else {
    return false;
  }
  if (rest.empty()) return false;
  try {
    std::size_t used = 0;
    s = std::stod(rest, &used);
    return used == rest.size();
  } catch (const std::exception&) {
    return false;
  }
}

double evaluate(const std::string& name, const RealField& f, double t) {
  if (name == "E0") return e0(f);
  if (name == "E1") return e1(f);
  if (name == "E2") return e2(f);
  if (name == "E1_bo") return e1(f, Hierarchy::benjamin_ono);
  if (name == "E2_bo") return e2(f, Hierarchy::benjamin_ono);
  if (name == "L2") return f.l2_norm();
  if (name == "sup") return f.sup_norm();
  if (name == "l_norm") return l_vector_field(f, t).field.l2_norm();
  if (name == "lnl_half_norm") return sobolev_norm(l_nonlinear(f, t).field, 0.5, true);
  if (name == "edge") return edge_fraction(f);
  double s = 0.0;
  bool hom = false;
  if (parse_sobolev(name, s, hom)) return sobolev_norm(f, s, hom);
  throw PreconditionError("unknown channel '" + name + "'");
}

}  // namespace

EnergySeries track(const Trajectory& traj, const std::vector<std::string>& channels) {
  EnergySeries s;
  for (const auto& f : traj.frames) s.times.push_back(f.t);
  for (const auto& name : channels) {
    std::vector<double> v;
    v.reserve(traj.frames.size());
    for (const auto& f : traj.frames) v.push_back(evaluate(name, f.field, f.t));
    s.add(name, std::move(v));
  }
  return s;
}

EnergySeries track_linearized(const Trajectory& phi, const Trajectory& v, const std::vector<std::string>& channels) {
  if (phi.frames.size() != v.frames.size()) throw PreconditionError("track_linearized: frame counts differ");
  EnergySeries s;
  for (const auto& f : v.frames) s.times.push_back(f.t);
  const std::size_t n = v.frames.size();
  std::vector<RealField> ys;
  std::vector<ModifiedEnergy> me(n);
  std::vector<bool> have(n, false);
  for (std::size_t i = 0; i < n; ++i) ys.push_back(abs_derivative_power(v.frames[i].field, -0.5));
  auto energy = [&](std::size_t i) -> const ModifiedEnergy& {
    if (!have[i]) {
      const double t = v.frames[i].t;
      if (t > 0.0) {
        me[i] = modified_energy(ys[i], phi.frames[i].field, t);
      } else {
        me[i].quadratic = inner(ys[i], ys[i]);
      }
      have[i] = true;
    }
    return me[i];
  };
  for (const auto& name : channels) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = v.frames[i].t;
      if (name == "y_l2") out[i] = ys[i].l2_norm();
      else if (name == "v_l2") out[i] = v.frames[i].field.l2_norm();
      else if (name == "E2_quad") out[i] = energy(i).quadratic;
      else if (name == "E3") out[i] = energy(i).cubic;
      else if (name == "modified_energy") out[i] = energy(i).total();
      else if (name == "E3_scaled") out[i] = t > 0.0 ? energy(i).cubic / std::pow(t, 1.0 / 12.0) : 0.0;
      else throw PreconditionError("unknown channel '" + name + "'");
    }
    s.add(name, std::move(out));
  }
  return s;
}

}  // namespace bo3
