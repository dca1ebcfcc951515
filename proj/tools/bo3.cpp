#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bo3/expcli.hpp"

namespace fs = std::filesystem;
using bo3::ConfigError;

namespace {

constexpr int kUsage = 3;

bo3::ExperimentConfig load(const std::string& path, const std::vector<std::string>& sets) {
  nlohmann::json doc = bo3::load_json(path);
  for (const auto& s : sets) bo3::apply_override(doc, s);
  return bo3::parse_config(doc);
}

void print_verdicts(const bo3::RunResult& r) {
  for (const auto& v : r.verdicts) {
    std::printf("  %-4s %-34s %.6g", v.pass ? "ok" : "FAIL", v.name.c_str(), v.value);
    if (v.relation == "in" || v.relation == "exact")
      std::printf("  in [%.6g, %.6g]%s\n", v.threshold, v.threshold_hi, v.relation == "exact" ? " (exact)" : "");
    else
      std::printf("  %s %.6g\n", v.relation.c_str(), v.threshold);
  }
  for (const auto& w : r.warnings) std::printf("  warning: %s\n", w.c_str());
}

std::vector<double> guides_beside(const std::string& csv) {
  const fs::path manifest = fs::path(csv).parent_path() / "manifest.json";
  std::ifstream in(manifest);
  if (!in) return {};
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.contains("summary") && doc["summary"].contains("plot_guides"))
      return doc["summary"]["plot_guides"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bo3: pseudo-spectral lab for the third-order Benjamin-Ono equation"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config, "Experiment config (JSON)")->required();
  run->add_option("--set", sets, "Override a config entry, e.g. --set solver.dt=5e-5");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config, "Experiment config (JSON)")->required();
  validate->add_option("--set", sets, "Override a config entry");

  std::string csv, out, group, title;
  std::string xcol;
  std::vector<std::string> ycols;
  std::vector<double> guides;
  bool loglog = false;
  auto* plot = app.add_subcommand("plot", "Render columns of a result CSV as SVG");
  plot->add_option("csv", csv, "CSV file")->required();
  plot->add_option("--x", xcol, "Column for the horizontal axis")->required();
  plot->add_option("--y", ycols, "Column(s) for the vertical axis")->required();
  plot->add_flag("--loglog", loglog, "Logarithmic axes with fitted slopes");
  plot->add_option("--group", group, "Draw one series per value of this column");
  plot->add_option("--guide", guides, "Reference slope (log-log); defaults to the run's plot_guides");
  plot->add_option("--title", title, "Plot title");
  plot->add_option("-o,--output", out, "SVG path (default: CSV path with .svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*validate) {
      const auto cfg = load(config, sets);
      std::printf("%s: valid %s config (n=%zu, L=%.6g)\n", config.c_str(), bo3::to_string(cfg.experiment).c_str(),
                  cfg.grid.n, cfg.grid.length);
      return 0;
    }
    if (*run) {
      const auto cfg = load(config, sets);
      const std::string dir = bo3::output_directory(cfg);
      std::printf("%s -> %s\n", bo3::to_string(cfg.experiment).c_str(), dir.c_str());
      std::fflush(stdout);
      const bo3::RunResult r = bo3::run_experiment(cfg, dir);
      print_verdicts(r);
      if (fs::exists(fs::path(dir) / "manifest.json")) {
        std::ifstream in(fs::path(dir) / "manifest.json");
        const auto m = nlohmann::json::parse(in);
        if (m.contains("error")) std::printf("  error: %s\n", m["error"].get<std::string>().c_str());
      }
      std::printf("status: %s\n", bo3::to_string(r.status).c_str());
      return bo3::exit_code(r.status);
    }
    if (*plot) {
      const bo3::CsvTable table = bo3::read_csv(csv);
      bo3::PlotSpec spec{xcol, ycols, loglog, group, guides.empty() ? guides_beside(csv) : guides, title};
      if (!loglog) spec.guides.clear();
      const std::string path = out.empty() ? fs::path(csv).replace_extension(".svg").string() : out;
      std::ofstream o(path);
      if (!o) throw std::invalid_argument("cannot write '" + path + "'");
      o << bo3::render_svg(table, spec);
      std::printf("%s\n", path.c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "bo3: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "bo3: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bo3: %s\n", e.what());
    return 1;
  }
  return kUsage;
}
