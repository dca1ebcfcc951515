#include "bo3/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bo3/flows.hpp"
#include "bo3/invariants.hpp"

namespace bo3 {

double jbracket(double x, double t) {
  if (!(t > 0.0)) throw PreconditionError("jbracket needs t > 0");
  return std::sqrt(x * x + std::pow(t, 2.0 / 3.0));
}

std::string to_string(Region r) {
  switch (r) {
    case Region::hyperbolic: return "hyperbolic";
    case Region::self_similar: return "self_similar";
    case Region::elliptic: return "elliptic";
  }
  return "?";
}

double RegionMask::threshold() const { return c_region * std::cbrt(t); }

std::size_t RegionMask::count(Region r) const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), r)); }

RegionMask classify(const GridPtr& grid, double t, double c_region) {
  if (!(t > 0.0)) throw PreconditionError("classify needs t > 0");
  if (!(c_region > 0.0)) throw PreconditionError("classify needs c_region > 0");
  RegionMask m{grid, t, c_region, {}};
  const double b = m.threshold();
  m.labels.resize(grid->size());
  for (std::size_t j = 0; j < grid->size(); ++j) {
    const double x = grid->x(j);
    m.labels[j] = x >= b ? Region::hyperbolic : (x <= -b ? Region::elliptic : Region::self_similar);
  }
  return m;
}

namespace {

std::vector<DecayRow> frame_rows(const RegionMask& mask, const RealField& phi, const RealField& px, double delta,
                                 double sign) {
  const double t = mask.t;
  const Grid& g = phi.grid();
  const double t13 = std::cbrt(t);
  const char* names[] = {"all", "hyperbolic", "self_similar", "elliptic"};
  std::vector<DecayRow> rows(4);
  for (int r = 0; r < 4; ++r) {
    rows[r].t = t;
    rows[r].region = names[r];
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.x(j);
    const double b = jbracket(x, t);
    const double a = std::abs(phi[j]), ax = std::abs(px[j]);
    const double wphi = std::pow(t, 0.25) * std::pow(b, 0.25 - sign * delta) * a;
    const double wphix = std::pow(t, 0.75) * std::pow(b, -0.25 - sign * delta) * ax;
    double ephi = 0.0, ephix = 0.0;
    const Region reg = mask.labels[j];
    if (reg == Region::elliptic && b / t13 >= 2.0) {
      const double lg = std::log(b / t13);
      ephi = b * a / lg;
      ephix = std::sqrt(t * b) * ax / lg;
    }
    for (int r : {0, 1 + static_cast<int>(reg)}) {
      rows[r].weighted_phi_sup = std::max(rows[r].weighted_phi_sup, wphi);
      rows[r].weighted_phix_sup = std::max(rows[r].weighted_phix_sup, wphix);
      rows[r].elliptic_phi_over_log = std::max(rows[r].elliptic_phi_over_log, ephi);
      rows[r].elliptic_phix_over_log = std::max(rows[r].elliptic_phix_over_log, ephix);
    }
  }
  return rows;
}

}  // namespace

DecayReport decay_weights(const Trajectory& traj, double delta, double c_region) {
  if (!(delta >= 0.0)) throw PreconditionError("decay_weights needs delta >= 0");
  DecayReport rep;
  rep.delta = delta;
  rep.c_region = c_region;
  std::vector<double> ts, sphi, sphix;
  for (const auto& f : traj.frames) {
    if (!(f.t > 0.0)) {
      rep.skipped_times.push_back(f.t);
      continue;
    }
    if (edge_fraction(f.field) > kEdgeTolerance) rep.edge_warnings.push_back(f.t);
    const RegionMask mask = classify(f.field.grid_ptr(), f.t, c_region);
    const RealField px = derivative(f.field);
    for (auto& r : frame_rows(mask, f.field, px, delta, 1.0)) rep.rows.push_back(std::move(r));
    for (auto& r : frame_rows(mask, f.field, px, delta, -1.0)) rep.alternate_rows.push_back(std::move(r));
    double hp = 0.0, hpx = 0.0;
    for (std::size_t j = 0; j < mask.labels.size(); ++j) {
      if (mask.labels[j] != Region::hyperbolic) continue;
      hp = std::max(hp, std::abs(f.field[j]));
      hpx = std::max(hpx, std::abs(px[j]));
    }
    if (hp > 0.0 && hpx > 0.0) {
      ts.push_back(f.t);
      sphi.push_back(hp);
      sphix.push_back(hpx);
    }
  }
  if (ts.size() >= 2) {
    rep.phi_fit = fit_loglog(ts, sphi);
    rep.phix_fit = fit_loglog(ts, sphix);
  }
  return rep;
}

double DecayReport::max_channel(const std::string& channel, bool alternate) const {
  double worst = 0.0;
  for (const auto& r : alternate ? alternate_rows : rows) {
    if (r.region != "all") continue;
    double v = 0.0;
    if (channel == "weighted_phi_sup") v = r.weighted_phi_sup;
    else if (channel == "weighted_phix_sup") v = r.weighted_phix_sup;
    else if (channel == "elliptic_phi_over_log") v = r.elliptic_phi_over_log;
    else if (channel == "elliptic_phix_over_log") v = r.elliptic_phix_over_log;
    else throw PreconditionError("unknown decay channel '" + channel + "'");
    worst = std::max(worst, v);
  }
  return worst;
}

std::string DecayReport::csv(bool alternate) const {
  std::ostringstream out;
  out << "t,region,weighted_phi_sup,weighted_phix_sup,elliptic_phi_over_log,elliptic_phix_over_log\n";
  char buf[200];
  for (const auto& r : alternate ? alternate_rows : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g,%.17g\n", r.t, r.region.c_str(), r.weighted_phi_sup,
                  r.weighted_phix_sup, r.elliptic_phi_over_log, r.elliptic_phix_over_log);
    out << buf;
  }
  return out.str();
}

DecayFit airy_decay_fit(const RealField& f0, const std::vector<double>& times) {
  if (times.size() < 2) throw PreconditionError("airy_decay_fit needs at least two times");
  for (double t : times)
    if (!(t > 0.0)) throw PreconditionError("airy_decay_fit needs positive times");
  require_mean_zero(f0, "airy_decay_fit");
  const bool localized = edge_fraction(f0) <= kEdgeTolerance;
  DecayFit out;
  out.times = times;
  for (double t : times) {
    const RealField phi = airy_propagate(f0, t);
    if (localized) {
      const double edge = edge_fraction(phi);
      if (edge > kEdgeTolerance) throw WrapAroundError(t, edge);
    }
    out.sup.push_back(phi.sup_norm());
  }
  out.fit = fit_loglog(out.times, out.sup);
  return out;
}

double bilinear_strichartz_ratio(int j, int k, const RealField& f, const RealField& g, double t_end,
                                 std::size_t samples) {
  if (!(std::abs(j - k) > 2 || j == k))
    throw PreconditionError("bilinear_strichartz_ratio needs |j - k| > 2 or j = k");
  if (!(t_end > 0.0)) throw PreconditionError("bilinear_strichartz_ratio needs t_end > 0");
  if (samples < 64) throw PreconditionError("bilinear_strichartz_ratio needs at least 64 samples");
  if (!same_grid(f.grid(), g.grid())) throw PreconditionError("bilinear_strichartz_ratio: fields on different grids");
  const RealField pf = project_band(f, j);
  const RealField pg = project_band(g, k);
  const double nf = pf.l2_norm(), ng = pg.l2_norm();
  if (nf == 0.0 || ng == 0.0) return 0.0;
  const double h = 2.0 * t_end / static_cast<double>(samples - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = -t_end + h * static_cast<double>(i);
    const RealField prod = product(airy_propagate(pf, t), airy_propagate(pg, t));
    const double w = (i == 0 || i + 1 == samples) ? 0.5 : 1.0;
    sum += w * inner(prod, prod);
  }
  return std::sqrt(h * sum) * std::ldexp(1.0, std::max(j, k)) / (nf * ng);
}

}  // namespace bo3
