#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fvvisc_cli/app.hpp"
#include "fvvisc_cli/checks.hpp"
#include "fvvisc_cli/config.hpp"

using namespace fvvisc;
using namespace fvvisc::cli;
namespace fs = std::filesystem;

namespace {

EnvLookup env_from(std::map<std::string, std::string> vars) {
  auto shared = std::make_shared<std::map<std::string, std::string>>(std::move(vars));
  return [shared](const char* name) -> const char* {
    const auto it = shared->find(name);
    return it == shared->end() ? nullptr : it->second.c_str();
  };
}

const EnvLookup kNoEnv = [](const char*) -> const char* { return nullptr; };

StudyConfig reparse(const StudyConfig& cfg) {
  StudyConfig out = default_config("study-1d");
  std::istringstream in(to_config_text(cfg));
  parse_config(in, out);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fvvisc_test_" + name);
  fs::remove_all(dir);
  return dir;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args, const EnvLookup& env = kNoEnv) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err, env);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Config, DefaultsMatchStudySetups) {
  const StudyConfig s1 = default_config("study-1d");
  EXPECT_EQ(s1.grids, (std::vector<Index>{7, 11, 15, 19, 23, 31, 47, 63}));
  EXPECT_FALSE(s1.regular);
  EXPECT_EQ(s1.strategies.size(), 5u);
  const StudyConfig s2 = default_config("study-1d-omega");
  EXPECT_TRUE(s2.regular);
  EXPECT_EQ(s2.omegas, (std::vector<double>{0.5, 0.6, 0.75, 1.0}));
  const StudyConfig s3 = default_config("study-3d");
  EXPECT_EQ(s3.problem, Problem::NS3D);
  EXPECT_EQ(s3.grids, (std::vector<Index>{7, 11, 15}));
  EXPECT_EQ(s3.flow.mach, 0.1);
  EXPECT_EQ(s3.flow.reynolds, 0.1);
  EXPECT_EQ(s3.flow.t_inf, 300.0);
  EXPECT_THROW(default_config("plot"), ConfigError);
}

TEST(Config, EveryCommandRoundTrips) {
  for (const char* cmd : {"study-1d", "study-1d-omega", "study-3d", "solve", "mesh-export", "selftest"}) {
    const StudyConfig cfg = default_config(cmd);
    EXPECT_EQ(reparse(cfg), cfg) << cmd;
  }
}

TEST(Config, RandomConfigsRoundTrip) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 4);
  const char* names[] = {"lr-average", "arithmetic", "inverse-distance", "one-sided-left", "one-sided-right"};
  for (int trial = 0; trial < 200; ++trial) {
    StudyConfig cfg = default_config("study-1d");
    cfg.problem = trial % 2 ? Problem::NS3D : Problem::Diffusion1D;
    cfg.grids = {3 + pick(rng), 9 + pick(rng)};
    cfg.regular = u(rng) < 0.5;
    cfg.strategies = {ReconstructionStrategy::parse(names[pick(rng)]), ReconstructionStrategy::weighted(u(rng))};
    cfg.omegas = {u(rng), u(rng) / 3.0};
    cfg.perturbation = 0.49 * u(rng);
    cfg.seed = rng();
    cfg.flow.mach = u(rng) + 1e-3;
    cfg.flow.alpha = 4.0 / 3.0 + u(rng);
    cfg.solver.target_drop = 1.0 + 1e-9 * u(rng);
    cfg.solver.cfl_max = 1e6 * (1.0 + u(rng));
    cfg.solver.absolute_tolerance = 1e-300 * u(rng);
    cfg.output = "out dir " + std::to_string(trial);
    cfg.volume_weighted = u(rng) < 0.5;
    cfg.unpinned_only = u(rng) < 0.5;
    cfg.jobs = pick(rng);
    ASSERT_EQ(reparse(cfg), cfg) << to_config_text(cfg);
  }
}

TEST(Config, EveryKeyIsWritten) {
  const std::string text = to_config_text(default_config("study-3d"));
  for (const std::string& key : config_keys()) EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
  EXPECT_NE(std::find(config_keys().begin(), config_keys().end(), "solver.max_iterations"), config_keys().end());
}

TEST(Config, ParseErrorsCarryLineNumbers) {
  StudyConfig cfg = default_config("study-1d");
  std::istringstream bad_key("# comment\n\nseed = 3\nsolver.bogus = 1\n");
  try {
    parse_config(bad_key, cfg, "cfg.txt");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.txt:4"), std::string::npos) << e.what();
  }
  EXPECT_EQ(cfg.seed, 3u);
  std::istringstream no_eq("grids 7,11\n");
  EXPECT_THROW(parse_config(no_eq, cfg), ConfigError);
  std::istringstream bad_value("solver.max_iterations = many\n");
  EXPECT_THROW(parse_config(bad_value, cfg), ConfigError);
  std::istringstream bad_omega("omegas = 0.5,1.5\n");
  EXPECT_THROW(parse_config(bad_omega, cfg), ConfigError);
}

TEST(Config, UnknownStrategyListsValidNames) {
  StudyConfig cfg = default_config("study-1d");
  try {
    set_key(cfg, "strategies", "arithmetic,harmonic");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("inverse-distance"), std::string::npos);
  }
}

TEST(Config, EnvironmentNames) {
  EXPECT_EQ(environment_name("solver.max_iterations"), "FVVISC_SOLVER_MAX_ITERATIONS");
  EXPECT_EQ(environment_name("output"), "FVVISC_OUTPUT");
}

TEST(Config, PrecedenceFlagOverEnvOverFileOverDefault) {
  const fs::path dir = scratch("precedence");
  fs::create_directories(dir);
  const std::string file = (dir / "study.cfg").string();
  std::ofstream(file) << "seed = 5\nperturbation = 0.2\njobs = 2\n";
  const auto env = env_from({{"FVVISC_SEED", "6"}, {"FVVISC_PERTURBATION", "0.25"}});
  const std::vector<std::pair<std::string, std::string>> flags{{"seed", "7"}};

  EXPECT_EQ(build_config("study-1d", std::nullopt, kNoEnv, {}).seed, 1u);
  EXPECT_EQ(build_config("study-1d", file, kNoEnv, {}).seed, 5u);
  EXPECT_EQ(build_config("study-1d", file, env, {}).seed, 6u);
  const StudyConfig all = build_config("study-1d", file, env, flags);
  EXPECT_EQ(all.seed, 7u);
  EXPECT_EQ(all.perturbation, 0.25);
  EXPECT_EQ(all.jobs, 2);
  EXPECT_EQ(build_config("study-1d", file, kNoEnv, flags).seed, 7u);
  EXPECT_THROW(build_config("study-1d", (dir / "missing.cfg").string(), kNoEnv, {}), ConfigError);
}

TEST(Bands, ExpectedBands) {
  const auto lr = ReconstructionStrategy::lr_average();
  const auto left = ReconstructionStrategy::one_sided_left();
  EXPECT_EQ(expected_band("study-1d", lr).lo, 1.8);
  EXPECT_EQ(expected_band("study-1d", left).hi, 1.2);
  EXPECT_EQ(expected_band("study-1d-omega", ReconstructionStrategy::weighted(0.5)).lo, 1.9);
  EXPECT_EQ(expected_band("study-1d-omega", ReconstructionStrategy::weighted(0.75)).lo, 0.8);
  EXPECT_EQ(expected_band("study-3d", lr).hi, 2.3);
}

TEST(Bands, ViolationsAreReported) {
  ConvergenceRecord good, bad;
  good.strategy = "arithmetic";
  bad.strategy = "one-sided-left";
  good.variables = bad.variables = {"u"};
  good.rows = {{"a", 10, 0.1, {1e-2}, 1, false, ""}, {"b", 20, 0.05, {2.5e-3}, 1, false, ""}};
  bad.rows = good.rows;
  const std::vector<ConvergenceRecord> records{good, bad};
  const std::vector<ReconstructionStrategy> strategies{ReconstructionStrategy::arithmetic(),
                                                       ReconstructionStrategy::one_sided_left()};
  const auto v = band_violations("study-1d", records, strategies);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("one-sided-left"), std::string::npos);
}

TEST(Cli, StudyWritesArtifactsAndEffectiveConfig) {
  const fs::path dir = scratch("study");
  const CliRun r = run({"study-1d", "--grids", "7,11,15", "--strategies", "arithmetic,weighted:0.25",
                     "--output", dir.string(), "--jobs", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  for (const char* f : {"study-1d.csv", "study-1d_summary.csv", "study-1d_arithmetic.csv",
                        "study-1d_weighted-0.25.csv", "study-1d_config.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  StudyConfig parsed = default_config("study-1d");
  load_config_file((dir / "study-1d_config.txt").string(), parsed);
  std::vector<std::pair<std::string, std::string>> flags{{"grids", "7,11,15"},
                                                         {"strategies", "arithmetic,weighted:0.25"},
                                                         {"output", dir.string()},
                                                         {"jobs", "2"}};
  EXPECT_EQ(parsed, build_config("study-1d", std::nullopt, kNoEnv, flags));
  EXPECT_NE(r.out.find("arithmetic"), std::string::npos);
}

TEST(Cli, EnvironmentSetsOutputDirectory) {
  const fs::path dir = scratch("envout");
  const CliRun r = run({"study-1d", "--grids", "7,11", "--strategies", "arithmetic"},
                    env_from({{"FVVISC_OUTPUT", dir.string()}}));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "study-1d.csv"));
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run({"study-1d", "--strategies", "harmonic"}).code, kExitConfig);
  const CliRun r = run({"study-1d", "--strategies", "harmonic"});
  EXPECT_NE(r.err.find("lr-average"), std::string::npos);
  EXPECT_EQ(run({"study-1d", "--set", "solver.nothing=1"}).code, kExitConfig);
  EXPECT_EQ(run({"study-1d", "--set", "novalue"}).code, kExitConfig);
  EXPECT_EQ(run({"study-1d", "--config", "/nonexistent/file.cfg"}).code, kExitConfig);
  EXPECT_EQ(run({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"study-3d", "--set", "flow.gamma=0.9"}).code, kExitConfig);
}

TEST(Cli, BandViolationExitsFourAndTakesPrecedence) {
  const fs::path dir = scratch("band");
  const CliRun r = run({"study-1d", "--strategies", "one-sided-right", "--output", dir.string(),
                     "--check-orders"});
  EXPECT_EQ(r.code, kExitBand) << r.out << r.err;
  EXPECT_NE(r.err.find("band violation"), std::string::npos);
  const CliRun unchecked = run({"study-1d", "--strategies", "one-sided-right", "--output", dir.string()});
  EXPECT_EQ(unchecked.code, 0) << unchecked.err;
}

TEST(Cli, SolveFailureExitsThreeWithHistory) {
  const fs::path dir = scratch("solve_fail");
  const CliRun r = run({"solve", "--n", "15", "--strategy", "arithmetic", "--set", "solver.max_iterations=2",
                     "--output", dir.string()});
  EXPECT_EQ(r.code, kExitSolver) << r.err;
  EXPECT_TRUE(fs::exists(dir / "solve_history.csv"));
}

TEST(Cli, SolveWritesSolution) {
  const fs::path dir = scratch("solve_ok");
  const CliRun r = run({"solve", "--n", "15", "--strategy", "lr-average", "--output", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "solve_solution.csv"));
  std::ifstream in(dir / "solve_history.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "iteration,res_0,cfl");
}

TEST(Cli, MeshExportWritesVtk) {
  const fs::path dir = scratch("mesh");
  const CliRun r = run({"mesh-export", "--n", "3", "--output", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "mesh_n3.vtk");
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "# vtk DataFile Version 2.0");
}

TEST(Cli, SelftestPasses) {
  const CliRun r = run({"selftest"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Checks, AllPropertyChecksPass) {
  for (const CheckResult& c : run_property_checks()) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}
