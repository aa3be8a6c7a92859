#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dissipgate/cli.hpp"

namespace dg = dissipgate;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "dissipgate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return dg::run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("dgcli-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  EXPECT_TRUE(in.good()) << p;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// CSV body split into lines, with '#' metadata separated out
struct Csv {
  std::vector<std::string> meta, lines;  // lines[0] is the header
  std::vector<std::vector<double>> rows;
};

Csv parse_csv(const fs::path& p) {
  Csv csv;
  std::ifstream in(p);
  EXPECT_TRUE(in.good()) << p;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      csv.meta.push_back(line);
      continue;
    }
    csv.lines.push_back(line);
    if (csv.lines.size() == 1) continue;  // header
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    csv.rows.push_back(row);
  }
  return csv;
}

}  // namespace

TEST(ConfigTest, UnknownKeysRejectedEverywhere) {
  dg::RunConfig cfg;
  EXPECT_THROW(dg::apply_config(cfg, dg::Json{{"gait", "nor"}}),
               std::invalid_argument);
  EXPECT_THROW(
      dg::apply_config(cfg, dg::Json{{"params", dg::Json{{"gg", 1.0}}}}),
      std::invalid_argument);
  EXPECT_THROW(
      dg::apply_config(cfg, dg::Json{{"noise", dg::Json{{"t3", 1.0}}}}),
      std::invalid_argument);
  EXPECT_THROW(
      dg::apply_config(cfg, dg::Json{{"sweep", dg::Json{{"axes", "r"}}}}),
      std::invalid_argument);
  dg::apply_config(cfg, dg::Json{{"gate", "nor"},
                                 {"params", dg::Json{{"omega", 0.2}}},
                                 {"noise", dg::Json{{"enabled", false}}}});
  EXPECT_EQ(cfg.gate, "nor");
  EXPECT_DOUBLE_EQ(cfg.params.omega, 0.2);
  EXPECT_FALSE(cfg.noise_enabled);
}

TEST(ConfigTest, ResolvedEchoReparsesToItself) {
  dg::RunConfig a;
  a.params.r = 0.44;
  a.params.omega = 0.11;
  a.axis2 = "gamma";
  a.start = std::vector<double>{0.1};
  const dg::Json j1 = dg::resolved_json(a);
  dg::RunConfig b;
  dg::apply_config(b, j1);
  const dg::Json j2 = dg::resolved_json(b);
  EXPECT_EQ(j1.dump(), j2.dump());
}

TEST(ConfigTest, ThreadCountResolution) {
  setenv("DISSIPGATE_THREADS", "3", 1);
  EXPECT_EQ(dg::detail::thread_count(0), 3);
  EXPECT_EQ(dg::detail::thread_count(2), 2);  // explicit request wins
  unsetenv("DISSIPGATE_THREADS");
  EXPECT_GE(dg::detail::thread_count(0), 1);
}

TEST(CliTest, ExitCodesForConfigAndNumericFailures) {
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_EQ(run({}), 2);                            // missing subcommand
  EXPECT_EQ(run({"--gate", "nand", "selftest"}), 2);  // unknown gate
  EXPECT_EQ(run({"--omega", "-1", "selftest"}), 2);   // invalid parameter
  EXPECT_EQ(run({"--preset", "lab-x", "selftest"}), 2);
  EXPECT_EQ(run({"--gate", "nor", "sweep"}), 2);  // sweeps need OR schemes
  EXPECT_EQ(run({"--config", "/nonexistent/cfg.json", "selftest"}), 2);

  // every optimize evaluation hits an unphysical t2 > 2 t1: numeric failure
  const fs::path dir = fresh_dir("exit3");
  const fs::path cfgp = dir / "cfg.json";
  {
    std::ofstream out(cfgp);
    out << R"({"optimize": {"free": ["t2"], "min": [3000], "max": [5000],)"
        << R"( "coarse": 2, "max_evals": 3}})";
  }
  EXPECT_EQ(run({"--config", cfgp.string(), "--out", (dir / "o").string(),
                 "optimize"}),
            3);
  // same free list with mismatched bounds is a config error instead
  {
    std::ofstream out(cfgp);
    out << R"({"optimize": {"free": ["t2", "omega"], "min": [3000],)"
        << R"( "max": [5000]}})";
  }
  EXPECT_EQ(run({"--config", cfgp.string(), "--out", (dir / "o").string(),
                 "optimize"}),
            2);
}

TEST(CliTest, UndrivenGateGivesFlatQuarterSeries) {
  const fs::path dir = fresh_dir("flat");
  ASSERT_EQ(run({"--omega", "0", "--no-noise", "simulate", "--points", "24",
                 "--t-final", "50", "--out", dir.string()}),
            0);
  const Csv csv = parse_csv(dir / "simulate.csv");
  EXPECT_EQ(csv.lines.front(), "time_ns,pe_00,pe_01,pe_10,pe_11,pe_avg");
  ASSERT_EQ(csv.rows.size(), 24u);
  for (const auto& row : csv.rows) {
    ASSERT_EQ(row.size(), 6u);
    EXPECT_NEAR(row[2], 1.0, 1e-8);   // |01> sits on the wrong output
    EXPECT_NEAR(row[5], 0.25, 1e-8);  // average stays at 1/4
  }
}

TEST(CliTest, SimulateSummaryMatchesCsvRecomputation) {
  const fs::path dir = fresh_dir("sim");
  ASSERT_EQ(
      run({"--preset", "paper-hardware", "simulate", "--out", dir.string()}),
      0);
  const Csv csv = parse_csv(dir / "simulate.csv");
  ASSERT_EQ(csv.rows.size(), 200u);
  double best = 1e9, t_best = 0.0;
  for (const auto& row : csv.rows) {
    const double avg = 0.25 * (row[1] + row[2] + row[3] + row[4]);
    EXPECT_NEAR(avg, row[5], 1e-9);
    if (row[5] < best) {
      best = row[5];
      t_best = row[0];
    }
  }
  dg::Json summary;
  std::ifstream(dir / "simulate_summary.json") >> summary;
  // the summary optimum refines the grid quadratically; it may only improve
  EXPECT_LE(summary["min_error"].get<double>(), best + 1e-12);
  EXPECT_NEAR(summary["min_error"].get<double>(), best, 1e-4);
  EXPECT_NEAR(summary["t_opt_ns"].get<double>(), t_best,
              0.2 * t_best + 1e-12);
  EXPECT_NEAR(summary["min_error"].get<double>(), 0.022366, 2e-4);
  EXPECT_NEAR(summary["photons"]["01"].get<double>(), 1.9627, 2e-2);
  EXPECT_NEAR(summary["photons_avg"].get<double>(), 1.0688, 2e-2);
}

TEST(CliTest, RoundTripByteIdenticalModuloTimestamp) {
  const fs::path dir = fresh_dir("rt");
  ASSERT_EQ(run({"--gate", "nor", "--t2", "2", "simulate", "--points", "24",
                 "--out", dir.string()}),
            0);
  const std::string first = slurp(dir / "simulate.csv");

  std::string config_line;
  {
    std::stringstream ss(first);
    std::string line;
    while (std::getline(ss, line))
      if (line.rfind("# config: ", 0) == 0) config_line = line.substr(10);
  }
  ASSERT_FALSE(config_line.empty());
  const fs::path cfgp = fs::temp_directory_path() / "dgcli-rt.json";
  std::ofstream(cfgp) << config_line;

  fs::remove_all(dir);
  ASSERT_EQ(run({"--config", cfgp.string(), "simulate"}), 0);
  const std::string second = slurp(dir / "simulate.csv");

  const auto strip_stamp = [](const std::string& text) {
    std::stringstream in(text), out;
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("# generated:", 0) != 0) out << line << "\n";
    return out.str();
  };
  EXPECT_EQ(strip_stamp(first), strip_stamp(second));
}

TEST(CliTest, SweepTableShape) {
  const fs::path dir = fresh_dir("sweep");
  ASSERT_EQ(run({"--no-noise", "sweep", "--axis", "r", "--min", "0.4", "--max",
                 "0.5", "--points", "2", "--out", dir.string()}),
            0);
  const Csv csv = parse_csv(dir / "sweep.csv");
  EXPECT_EQ(csv.lines.front(),
            "r,drive_omega,min_error,t_opt_ns,boundary,failed");
  ASSERT_EQ(csv.rows.size(), 2u);
  for (const auto& row : csv.rows) {
    EXPECT_GT(row[2], 0.0);
    EXPECT_LT(row[2], 1.0);
    EXPECT_EQ(row[5], 0.0);  // no failures
  }
  EXPECT_DOUBLE_EQ(csv.rows[0][0], 0.4);
  EXPECT_DOUBLE_EQ(csv.rows[1][0], 0.5);
  dg::Json summary;
  std::ifstream(dir / "sweep_summary.json") >> summary;
  EXPECT_GE(summary["best_index"].get<int>(), 0);
}

TEST(CliTest, AnalyticTableColumnsTrackSimulation) {
  const fs::path dir = fresh_dir("onetable");
  ASSERT_EQ(run({"analytic", "--omega-scan", "0.1:0.2:3", "--out",
                 dir.string()}),
            0);
  const Csv csv = parse_csv(dir / "analytic.csv");
  EXPECT_EQ(csv.lines.front(),
            "omega,t_opt_analytic,t_opt_full,pe_analytic,pe_full");
  ASSERT_EQ(csv.rows.size(), 3u);
  for (const auto& row : csv.rows) {
    EXPECT_NEAR(row[1], row[2], 0.25 * row[2]);  // times agree to 25%
    EXPECT_GT(row[3], 0.0);
    EXPECT_LT(row[3], 0.1);
    EXPECT_GT(row[4], 0.0);
    EXPECT_LT(row[4], 0.1);
  }
  EXPECT_EQ(run({"analytic", "--omega-scan", "0.1:0.2", "--out",
                 dir.string()}),
            2);  // malformed scan spec
}

TEST(CliTest, PhotonsCommandMatchesKnownCounts) {
  const fs::path dir = fresh_dir("ph");
  ASSERT_EQ(run({"--no-noise", "photons", "--out", dir.string()}), 0);
  const Csv csv = parse_csv(dir / "photons.csv");
  EXPECT_EQ(csv.lines.front(), "input,photons");
  ASSERT_EQ(csv.rows.size(), 4u);
  dg::Json summary;
  std::ifstream(dir / "photons_summary.json") >> summary;
  EXPECT_NEAR(summary["photons"]["00"].get<double>(), 0.3462, 1e-2);
  EXPECT_NEAR(summary["photons"]["01"].get<double>(), 1.9625, 1e-2);
  EXPECT_NEAR(summary["photons"]["10"].get<double>(), 1.9625, 1e-2);
  EXPECT_LT(summary["photons"]["11"].get<double>(), 1e-6);
  EXPECT_NEAR(summary["photons_avg"].get<double>(), 1.0678, 2e-2);
  EXPECT_NEAR(summary["t_opt_ns"].get<double>(), 48.527, 0.2);
}
