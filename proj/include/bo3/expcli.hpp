#pragma once

// Experiment runner: JSON configuration, named initial data, the canonical
// experiment suites, result files and SVG plots.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bo3/spectral.hpp"
#include "bo3/stepper.hpp"

namespace bo3 {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  conserve,
  scaling,
  airy_decay,
  strichartz,
  normalform_scaling,
  linearized_l2,
  lnl_conservation,
  decay_profile,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);
const std::vector<std::string>& experiment_names();

/// Named initial data. Every profile is mean-free on the grid.
///   gaussian_bump        A exp(-(x-c)^2 / (2w^2))
///   sech_bump            A sech((x-c)/w)
///   gaussian_derivative  A ((x-c)/w) exp(1/2 - (x-c)^2 / (2w^2))   (sup = A)
///   two_mode             A [cos(k1 x) + cos(k2 x)], k from `wavenumbers`
///                        (default 1, 2), times the Gaussian envelope when w > 0
///   wave_packet          A exp(-(x-c)^2 / (2w^2)) sum_k cos(k (x-c))
///   random_bandlimited   random spectrum on |xi| <= bandlimit from `seed`,
///                        scaled to sup = A
/// A positive `bandlimit` Xi multiplies the spectrum by psi(2 xi / Xi), which
/// is 1 on |xi| <= Xi/2 and vanishes beyond Xi.
struct DataSpec {
  std::string profile = "gaussian_derivative";
  double amplitude = 0.05;
  double center = 0.0;
  double width = 5.0;
  double bandlimit = 0.0;
  std::vector<double> wavenumbers;
};

RealField make_profile(const GridPtr& grid, const DataSpec& spec, std::uint64_t seed);

struct GridSpec {
  std::size_t n = 0;
  double length = 0.0;
};

struct AnalysisSpec {
  double delta = 0.05;
  double c_region = 1.0;
  std::vector<double> amplitudes;
  std::vector<double> dt_ladder;
  std::vector<int> bands;
  double t_probe = 0.0;
  double t_min = 1.0;
  std::size_t time_count = 25;
  double lambda = 2.0;
  int band_j = 1;
  std::size_t samples = 256;
  /// Strichartz time window; 0 picks L / (24 * 4^max(j,k)) per pair.
  double window = 0.0;
  std::size_t trials = 20;
  DataSpec perturbation;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::conserve;
  GridSpec grid;
  DataSpec data;
  SolverConfig solver;
  AnalysisSpec analysis;
  std::uint64_t seed = 1;
  std::string output;
  /// The document the config was parsed from (after overrides).
  nlohmann::json source;
};

nlohmann::json load_json(const std::string& path);
/// Applies "a.b.c=value" to a JSON document. The value is parsed as a JSON
/// scalar when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);
/// Parses and checks every precondition that can be decided before running.
/// Throws ConfigError listing all problems.
ExperimentConfig parse_config(const nlohmann::json& doc);

enum class Status { pass = 0, fail = 1, degraded = 2 };
std::string to_string(Status s);
int exit_code(Status s);

struct Verdict {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "in", "exact"
  double threshold = 0.0;
  double threshold_hi = 0.0;
  bool pass = false;
};

struct RunResult {
  Status status = Status::pass;
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;
  std::vector<std::string> files;
  nlohmann::json summary = nlohmann::json::object();
};

/// Directory the results go to: $BO3_OUT when set, else the config's output
/// entry, else "out/<experiment>".
std::string output_directory(const ExperimentConfig& cfg);

/// Runs the experiment, writes its CSV files and manifest.json into `dir`.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& dir);

// ---- plotting ---------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

struct PlotSpec {
  std::string x;
  std::vector<std::string> y;
  bool loglog = false;
  /// Split rows into one series per distinct value of this column.
  std::string group;
  /// Reference slopes drawn as dashed guide lines (log-log only).
  std::vector<double> guides;
  std::string title;
};

std::string render_svg(const CsvTable& table, const PlotSpec& spec);

}  // namespace bo3
