#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "bo3/expcli.hpp"
#include "bo3/fit.hpp"

namespace bo3 {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

struct Series {
  std::string label;
  std::vector<double> x, y;
};

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    std::string known;
    for (const auto& c : columns) known += (known.empty() ? "" : ", ") + c;
    throw std::invalid_argument("unknown column '" + name + "' (columns: " + known + ")");
  }
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    try {
      out.push_back(std::stod(r.at(c)));
    } catch (const std::exception&) {
      throw std::invalid_argument("column '" + name + "' holds a non-numeric value");
    }
  }
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.columns.empty()) {
      t.columns = split(line);
      continue;
    }
    auto row = split(line);
    if (row.size() != t.columns.size())
      throw std::invalid_argument("'" + path + "': row " + std::to_string(t.rows.size() + 1) + " has " +
                                  std::to_string(row.size()) + " cells, expected " + std::to_string(t.columns.size()));
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty() || t.rows.empty()) throw std::invalid_argument("'" + path + "' has no data rows");
  return t;
}

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
  if (table.rows.empty()) throw std::invalid_argument("nothing to plot: the table is empty");
  if (spec.y.empty()) throw std::invalid_argument("no y column given");
  const auto xs = table.numbers(spec.x);

  std::vector<Series> series;
  for (const auto& ycol : spec.y) {
    const auto ys = table.numbers(ycol);
    if (spec.group.empty()) {
      series.push_back({ycol, xs, ys});
      continue;
    }
    const std::size_t gc = table.column(spec.group);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const std::string& key = table.rows[i][gc];
      auto [it, fresh] = index.emplace(key, series.size());
      if (fresh) series.push_back({ycol + " (" + spec.group + "=" + key + ")", {}, {}});
      series[it->second].x.push_back(xs[i]);
      series[it->second].y.push_back(ys[i]);
    }
  }

  // Drop points that cannot be drawn on the chosen axes.
  for (auto& s : series) {
    Series kept{s.label, {}, {}};
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const bool ok = std::isfinite(s.x[i]) && std::isfinite(s.y[i]) && (!spec.loglog || (s.x[i] > 0 && s.y[i] > 0));
      if (ok) {
        kept.x.push_back(s.x[i]);
        kept.y.push_back(s.y[i]);
      }
    }
    s = std::move(kept);
  }
  std::size_t points = 0;
  for (const auto& s : series) points += s.x.size();
  if (points == 0) throw std::invalid_argument(spec.loglog ? "no positive points to draw on log-log axes" : "no finite points");

  auto tx = [&](double v) { return spec.loglog ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, tx(s.y[i]));
      y1 = std::max(y1, tx(s.y[i]));
    }
  if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double W = 720, H = 480, left = 80, right = 200, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + (1.0 - (v - y0) / (y1 - y0)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!spec.title.empty())
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
        << "</text>\n";

  for (int i = 0; i <= 5; ++i) {
    const double vx = x0 + (x1 - x0) * i / 5.0, vy = y0 + (y1 - y0) * i / 5.0;
    const std::string lx = spec.loglog ? "1e" + num(vx, 3) : num(vx);
    const std::string ly = spec.loglog ? "1e" + num(vy, 3) : num(vy);
    svg << "<line x1=\"" << px(vx) << "\" y1=\"" << top + ph << "\" x2=\"" << px(vx) << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(vx) << "\" y=\"" << top + ph + 20 << "\" text-anchor=\"middle\">" << lx << "</text>\n";
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << py(vy) << "\" x2=\"" << left << "\" y2=\"" << py(vy)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << py(vy) + 4 << "\" text-anchor=\"end\">" << ly << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << escape(spec.x)
      << (spec.loglog ? " (log)" : "") << "</text>\n";

  double legend_y = top + 10;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& se = series[s];
    if (se.x.empty()) continue;
    const char* color = kColors[s % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < se.x.size(); ++i) svg << (i ? " " : "") << px(tx(se.x[i])) << "," << py(tx(se.y[i]));
    svg << "\"/>\n";
    for (std::size_t i = 0; i < se.x.size(); ++i)
      svg << "<circle cx=\"" << px(tx(se.x[i])) << "\" cy=\"" << py(tx(se.y[i])) << "\" r=\"2.5\" fill=\"" << color
          << "\"/>\n";
    std::string label = se.label;
    if (spec.loglog && se.x.size() >= 2) {
      const LineFit f = fit_loglog(se.x, se.y);
      label += ", slope " + num(f.slope, 3);
    }
    svg << "<text x=\"" << left + pw + 10 << "\" y=\"" << legend_y << "\" fill=\"" << color << "\">" << escape(label)
        << "</text>\n";
    legend_y += 16;
  }

  if (spec.loglog) {
    // Guides pass through the centre of the data box.
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    for (double slope : spec.guides) {
      const double ya = cy + slope * (x0 - cx), yb = cy + slope * (x1 - cx);
      svg << "<line x1=\"" << px(x0) << "\" y1=\"" << py(ya) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(yb)
          << "\" stroke=\"gray\" stroke-dasharray=\"6,4\" clip-path=\"url(#plotarea)\"/>\n";
      svg << "<text x=\"" << left + pw + 10 << "\" y=\"" << legend_y << "\" fill=\"gray\">guide slope " << num(slope, 3)
          << "</text>\n";
      legend_y += 16;
    }
  }
  svg << "<defs><clipPath id=\"plotarea\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
      << "\" height=\"" << ph << "\"/></clipPath></defs>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bo3
