#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bo3/expcli.hpp"
#include "bo3/flows.hpp"

using namespace bo3;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_conserve() {
  return json::parse(R"({
    "experiment": "conserve",
    "grid": {"n": 256, "L_pi": 64},
    "data": {"profile": "gaussian_derivative", "amplitude": 0.05, "width": 3},
    "solver": {"dt": 1e-3, "t_end": 0.2, "snapshot_stride": 50},
    "analysis": {"dt_ladder": [0.1, 0.05, 0.025]}
  })");
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bo3_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, Defaults) {
  const ExperimentConfig c = parse_config(small_conserve());
  EXPECT_EQ(c.experiment, Experiment::conserve);
  EXPECT_EQ(c.grid.n, 256u);
  EXPECT_NEAR(c.grid.length, 64 * M_PI, 1e-12);
  EXPECT_EQ(c.seed, 1u);
}

TEST(Config, MissingNIsRejected) {
  json doc = small_conserve();
  doc["grid"].erase("n");
  try {
    parse_config(doc);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("grid.n"), std::string::npos);
  }
}

TEST(Config, CollectsEveryProblem) {
  json doc = small_conserve();
  doc["grid"]["n"] = 100;
  doc["solver"]["dt"] = -1;
  doc["data"]["profile"] = "triangle";
  doc["extra"] = 1;
  try {
    parse_config(doc);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* part : {"power of two", "solver", "triangle", "extra"})
      EXPECT_NE(msg.find(part), std::string::npos) << part;
  }
}

TEST(Config, ExperimentPreconditions) {
  json doc = json::parse(R"({"experiment": "airy_decay", "grid": {"n": 4096, "L": 200},
                             "data": {"profile": "gaussian_bump", "amplitude": 1, "width": 0.25, "bandlimit": 8}})");
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = json::parse(R"({"experiment": "normalform_scaling", "grid": {"n": 256, "L_pi": 64},
                        "analysis": {"amplitudes": [0.01, 0.02, 0.04]}})");
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = json::parse(R"({"experiment": "strichartz", "grid": {"n": 256, "L_pi": 16},
                        "analysis": {"band_j": 1, "bands": [2, 9]}})");
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, Overrides) {
  json doc = small_conserve();
  apply_override(doc, "solver.dt=5e-4");
  apply_override(doc, "data.profile=sech_bump");
  apply_override(doc, "analysis.new_key=true");
  EXPECT_EQ(doc["solver"]["dt"].get<double>(), 5e-4);
  EXPECT_EQ(doc["data"]["profile"].get<std::string>(), "sech_bump");
  EXPECT_TRUE(doc["analysis"]["new_key"].get<bool>());
  EXPECT_THROW(apply_override(doc, "solver.dt"), ConfigError);
  EXPECT_THROW(apply_override(doc, "solver.dt.x=1"), ConfigError);
}

TEST(Profiles, MeanFreeAndScaled) {
  auto g = Grid::make(512, 64 * M_PI);
  for (const char* name : {"gaussian_bump", "sech_bump", "gaussian_derivative", "two_mode", "wave_packet",
                           "random_bandlimited"}) {
    DataSpec d{name, 0.3, 1.0, 2.0, 2.0, {1.5}};
    if (std::string(name) == "two_mode") d.wavenumbers = {1.0, 2.0};
    const RealField f = make_profile(g, d, 7);
    EXPECT_LT(std::abs(f.mean()), 1e-14) << name;
    EXPECT_GT(f.sup_norm(), 0.0) << name;
    EXPECT_LT(tail_fraction(f), 1e-20) << name;
  }
  DataSpec rnd{"random_bandlimited", 0.3, 0, 0, 2.0, {}};
  EXPECT_NEAR(make_profile(g, rnd, 1).sup_norm(), 0.3, 1e-12);
  EXPECT_EQ(max_difference(make_profile(g, rnd, 1), make_profile(g, rnd, 1)), 0.0);
  EXPECT_GT(max_difference(make_profile(g, rnd, 1), make_profile(g, rnd, 2)), 0.0);
}

TEST(Run, ZeroAmplitudeConserveIsExact) {
  json doc = small_conserve();
  doc["data"]["amplitude"] = 0.0;
  const fs::path dir = scratch("zero");
  const RunResult r = run_experiment(parse_config(doc), dir.string());
  EXPECT_EQ(r.status, Status::pass);
  for (const auto& v : r.verdicts) {
    if (v.name.find("drift") != std::string::npos) EXPECT_EQ(v.value, 0.0) << v.name;
    EXPECT_TRUE(v.pass) << v.name;
  }
  fs::remove_all(dir);
}

TEST(Run, ManifestRoundTripAndDeterminism) {
  const json doc = small_conserve();
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const RunResult ra = run_experiment(parse_config(doc), a.string());
  run_experiment(parse_config(doc), b.string());
  ASSERT_EQ(ra.status, Status::pass);
  for (const auto& f : ra.files) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  const json manifest = json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["config"], doc);
  EXPECT_EQ(manifest["status"], "pass");
  EXPECT_EQ(manifest["files"].size(), ra.files.size());
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, OutputDirectory) {
  ExperimentConfig c = parse_config(small_conserve());
  ::unsetenv("BO3_OUT");
  EXPECT_EQ(output_directory(c), "out/conserve");
  c.output = "elsewhere";
  EXPECT_EQ(output_directory(c), "elsewhere");
  ::setenv("BO3_OUT", "/tmp/override", 1);
  EXPECT_EQ(output_directory(c), "/tmp/override");
  ::unsetenv("BO3_OUT");
}

TEST(Plot, Errors) {
  const fs::path dir = scratch("plot");
  fs::create_directories(dir);
  std::ofstream(dir / "empty.csv") << "";
  EXPECT_THROW(read_csv((dir / "empty.csv").string()), std::invalid_argument);
  std::ofstream(dir / "header.csv") << "a,b\n";
  EXPECT_THROW(read_csv((dir / "header.csv").string()), std::invalid_argument);
  std::ofstream(dir / "ok.csv") << "a,b\n1,2\n2,4\n";
  const CsvTable t = read_csv((dir / "ok.csv").string());
  EXPECT_THROW(render_svg(t, PlotSpec{"a", {"zzz"}, false, "", {}, ""}), std::invalid_argument);
  fs::remove_all(dir);
}

TEST(Plot, LogLogSlopesAndGuides) {
  CsvTable t;
  t.columns = {"epsilon", "k", "raw", "gauged"};
  for (int k : {1, 2})
    for (double e : {0.01, 0.02, 0.04, 0.08})
      t.rows.push_back({std::to_string(e), std::to_string(k), std::to_string(e * e), std::to_string(e * e * e)});
  const std::string svg = render_svg(t, PlotSpec{"epsilon", {"raw", "gauged"}, true, "k", {2.0, 3.0}, "residuals"});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("slope 2"), std::string::npos);
  EXPECT_NE(svg.find("slope 3"), std::string::npos);
  EXPECT_NE(svg.find("guide slope 2"), std::string::npos);
  EXPECT_NE(svg.find("guide slope 3"), std::string::npos);
  EXPECT_NE(svg.find("raw (k=1)"), std::string::npos);
}

TEST(Plot, LinearDriftPlot) {
  CsvTable t;
  t.columns = {"t", "E0"};
  for (int i = 0; i < 5; ++i) t.rows.push_back({std::to_string(0.1 * i), std::to_string(1.0 + 1e-14 * i)});
  const std::string svg = render_svg(t, PlotSpec{"t", {"E0"}, false, "", {}, ""});
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_EQ(svg.find("slope"), std::string::npos);
}
