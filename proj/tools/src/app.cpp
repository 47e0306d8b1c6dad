#include "fvvisc_cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fvvisc/diffusion1d.hpp"
#include "fvvisc/errors.hpp"
#include "fvvisc/mesh.hpp"
#include "fvvisc/ns3d.hpp"
#include "fvvisc_cli/checks.hpp"

namespace fvvisc::cli {

namespace fs = std::filesystem;

StudyConfig build_config(const std::string& command, const std::optional<std::string>& config_path,
                         const EnvLookup& env,
                         std::span<const std::pair<std::string, std::string>> flags) {
  StudyConfig cfg = default_config(command);
  if (config_path) load_config_file(*config_path, cfg);
  if (env) apply_environment(cfg, env);
  for (const auto& [key, value] : flags) {
    try {
      set_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("command line: " + std::string(e.what()));
    }
  }
  return cfg;
}

OrderBand expected_band(const std::string& command, const ReconstructionStrategy& strategy) {
  using Kind = ReconstructionStrategy::Kind;
  const bool first_order = strategy.kind == Kind::OneSidedLeft || strategy.kind == Kind::OneSidedRight ||
                           (strategy.kind == Kind::Weighted && strategy.omega != 0.5);
  if (command == "study-3d") return {1.7, 2.3};
  if (command == "study-1d-omega" && !first_order) return {1.9, 2.1};
  return first_order ? OrderBand{0.8, 1.2} : OrderBand{1.8, 2.2};
}

std::vector<std::string> band_violations(const std::string& command,
                                         std::span<const ConvergenceRecord> records,
                                         std::span<const ReconstructionStrategy> strategies) {
  std::vector<std::string> out;
  for (std::size_t s = 0; s < records.size(); ++s) {
    const OrderBand band = expected_band(command, strategies[s]);
    std::ostringstream msg;
    msg << records[s].strategy << ": ";
    try {
      const double order = observed_order(records[s], 0).global;
      if (band.contains(order)) continue;
      msg << "order " << std::setprecision(4) << order;
    } catch (const Error& e) {
      msg << "no order (" << e.what() << ")";
    }
    msg << " outside [" << band.lo << ", " << band.hi << "]";
    out.push_back(msg.str());
  }
  return out;
}

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
};

std::string file_token(std::string name) {
  std::replace(name.begin(), name.end(), ':', '-');
  return name;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << std::setprecision(16);
  return f;
}

fs::path prepare_output(const StudyConfig& cfg, const std::string& command) {
  const fs::path dir(cfg.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + cfg.output + "': " + ec.message());
  open_output(dir / (command + "_config.txt")) << to_config_text(cfg);
  return dir;
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<ReconstructionStrategy> study_strategies(const std::string& command,
                                                     const StudyConfig& cfg) {
  if (command != "study-1d-omega") return cfg.strategies;
  std::vector<ReconstructionStrategy> out;
  for (double w : cfg.omegas) out.push_back(ReconstructionStrategy::weighted(w));
  return out;
}

int run_study(const std::string& command, const StudyConfig& cfg, bool check_orders, Context& ctx) {
  const auto strategies = study_strategies(command, cfg);
  if (strategies.empty()) throw ConfigError("no strategies selected");
  if (cfg.grids.size() < 2) throw ConfigError("a study needs at least two grids");
  const fs::path dir = prepare_output(cfg, command);

  std::vector<ConvergenceRecord> records;
  std::vector<std::string> comments{"command: " + command};
  if (cfg.problem == Problem::Diffusion1D) {
    Study1DOptions o;
    o.grids = cfg.grids;
    o.regular = cfg.regular;
    o.perturbation = cfg.perturbation;
    o.seed = cfg.seed;
    o.strategies = strategies;
    o.alpha = cfg.flow.alpha;
    o.solver = cfg.solver;
    o.volume_weighted = cfg.volume_weighted;
    o.jobs = resolve_jobs(cfg.jobs);
    records = run_study_1d(o);
    comments.push_back(std::string("grid: ") + (cfg.regular ? "regular" : "irregular") +
                       ", perturbation " + std::to_string(cfg.perturbation) + ", seed " +
                       std::to_string(cfg.seed));
  } else {
    Study3DOptions o;
    o.grids = cfg.grids;
    o.perturbation = cfg.perturbation;
    o.seed = cfg.seed;
    o.strategies = strategies;
    o.flow = cfg.flow;
    o.solver = cfg.solver;
    o.volume_weighted = cfg.volume_weighted;
    o.unpinned_only = cfg.unpinned_only;
    o.jobs = resolve_jobs(cfg.jobs);
    records = run_study_3d(o);
    comments.push_back("tet mesh: perturbation " + std::to_string(cfg.perturbation) + ", seed " +
                       std::to_string(cfg.seed) + ", error cells " +
                       (cfg.unpinned_only ? "unpinned" : "all"));
  }

  {
    auto all = open_output(dir / (command + ".csv"));
    write_study_csv(all, records, comments);
    auto summary = open_output(dir / (command + "_summary.csv"));
    write_summary_csv(summary, records, comments);
  }
  for (std::size_t s = 0; s < records.size(); ++s) {
    auto f = open_output(dir / (command + "_" + file_token(records[s].strategy) + ".csv"));
    write_study_csv(f, std::span(records).subspan(s, 1), comments);
  }

  bool any_failed = false;
  ctx.out << std::left << std::setw(20) << "strategy" << std::setw(6) << "var" << std::setw(10)
          << "order" << "finest error\n";
  for (const auto& rec : records) {
    for (const auto& row : rec.rows) {
      if (!row.failed) continue;
      any_failed = true;
      ctx.err << "failed: " << rec.strategy << ' ' << row.grid_label << ": " << row.failure << '\n';
    }
    const auto ok = rec.successful_rows();
    for (std::size_t v = 0; v < rec.variables.size(); ++v) {
      ctx.out << std::setw(20) << rec.strategy << std::setw(6) << rec.variables[v] << std::setw(10);
      try {
        ctx.out << std::fixed << std::setprecision(3) << observed_order(rec, v).global;
      } catch (const Error&) {
        ctx.out << "n/a";
      }
      ctx.out << std::defaultfloat << std::setprecision(6);
      if (ok.empty()) {
        ctx.out << "n/a\n";
      } else {
        ctx.out << ok.back()->l1_error[v] << '\n';
      }
    }
  }
  ctx.out << std::right << "wrote " << (dir / (command + ".csv")).string() << '\n';

  if (check_orders) {
    const auto violations = band_violations(command, records, strategies);
    for (const auto& v : violations) ctx.err << "band violation: " << v << '\n';
    if (!violations.empty()) return kExitBand;
  }
  return any_failed ? kExitSolver : kExitOk;
}

void write_history(const fs::path& dir, const IterationHistory& history) {
  auto f = open_output(dir / "solve_history.csv");
  write_history_csv(f, history);
}

int run_solve(const StudyConfig& cfg, Context& ctx) {
  if (cfg.strategies.empty()) throw ConfigError("no strategy selected");
  const ReconstructionStrategy strategy = cfg.strategies.front();
  const Index n = cfg.grids.front();
  const fs::path dir = prepare_output(cfg, "solve");
  try {
    if (cfg.problem == Problem::Diffusion1D) {
      Diffusion1DProblem problem(generate_grid_1d(n, cfg.regular, cfg.perturbation, cfg.seed),
                                 strategy, cfg.flow.alpha);
      const auto sol = solve_diffusion_1d(problem, cfg.solver);
      write_history(dir, sol.history);
      const auto exact = problem.exact_cell_values();
      auto f = open_output(dir / "solve_solution.csv");
      f << "x,u,u_exact\n";
      for (Index j = 0; j < problem.size(); ++j) {
        const auto i = static_cast<std::size_t>(j);
        f << problem.grid().center(j) << ',' << sol.u[i] << ',' << exact[i] << '\n';
      }
      ctx.out << "converged in " << sol.iterations << " iterations; L1 error "
              << l1_error(sol.u, exact) << '\n';
    } else {
      NS3DProblem problem(generate_tet_mesh(n, cfg.perturbation, cfg.seed), strategy, cfg.flow);
      const auto sol = solve_ns3d(problem, cfg.solver);
      write_history(dir, sol.history);
      const auto exact = problem.exact_states();
      auto f = open_output(dir / "solve_solution.csv");
      f << "cell,x,y,z,rho,u,v,w,T,rho_exact,u_exact,v_exact,w_exact,T_exact\n";
      std::vector<CellField> fields{{"rho", {}}, {"T", {}}, {"rho_error", {}}};
      for (Index j = 0; j < problem.size(); ++j) {
        const auto i = static_cast<std::size_t>(j);
        const Vec3& x = problem.mesh().cell(j).centroid;
        f << j << ',' << x.x() << ',' << x.y() << ',' << x.z();
        for (int v = 0; v < 5; ++v) f << ',' << sol.w[i][v];
        for (int v = 0; v < 5; ++v) f << ',' << exact[i][v];
        f << '\n';
        fields[0].values.push_back(sol.w[i][0]);
        fields[1].values.push_back(sol.w[i][4]);
        fields[2].values.push_back(sol.w[i][0] - exact[i][0]);
      }
      auto vtk = open_output(dir / "solve_solution.vtk");
      write_vtk(vtk, problem.mesh(), fields);
      const auto err = l1_error(sol.w, exact);
      ctx.out << "converged in " << sol.iterations << " iterations; L1 density error " << err[0]
              << '\n';
    }
  } catch (const NonConvergence& e) {
    write_history(dir, e.history());
    ctx.err << "solver did not converge: " << e.what() << '\n';
    return kExitSolver;
  } catch (const SolverDivergence& e) {
    write_history(dir, e.history());
    ctx.err << "solver diverged: " << e.what() << '\n';
    return kExitSolver;
  }
  ctx.out << "wrote " << (dir / "solve_history.csv").string() << '\n';
  return kExitOk;
}

int run_mesh_export(const StudyConfig& cfg, Context& ctx) {
  const Index n = cfg.grids.front();
  const fs::path dir = prepare_output(cfg, "mesh-export");
  const Mesh3D mesh = generate_tet_mesh(n, cfg.perturbation, cfg.seed);
  std::vector<CellField> fields{{"volume", {}}, {"boundary_adjacent", {}}, {"rho_exact", {}},
                                {"T_exact", {}}};
  for (Index j = 0; j < mesh.num_cells(); ++j) {
    const TetCell& c = mesh.cell(j);
    const Vec5 w = manufactured_primitive(c.centroid);
    fields[0].values.push_back(c.volume);
    fields[1].values.push_back(mesh.boundary_adjacent(j) ? 1.0 : 0.0);
    fields[2].values.push_back(w[0]);
    fields[3].values.push_back(w[4]);
  }
  const fs::path path = dir / ("mesh_n" + std::to_string(n) + ".vtk");
  auto f = open_output(path);
  write_vtk(f, mesh, fields);
  ctx.out << "wrote " << path.string() << " (" << mesh.num_cells() << " cells)\n";
  return kExitOk;
}

int run_selftest(Context& ctx) {
  bool ok = true;
  for (const CheckResult& r : run_property_checks()) {
    ctx.out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitFailure;
}

struct Flags {
  std::string config;
  std::vector<std::string> sets;
  std::string grids, strategies, omegas, output, problem, strategy;
  std::uint64_t seed = 0;
  int jobs = 0;
  Index n = 0;
  double perturbation = 0.0;
  bool regular = false;
  bool full = false;
  bool check_orders = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "key = value configuration file");
  sub->add_option("--set", f.sets, "override one key, e.g. --set solver.max_iterations=200");
  sub->add_option("--output,-o", f.output, "output directory");
  sub->add_option("--seed", f.seed, "grid perturbation seed");
  sub->add_option("--perturbation", f.perturbation, "grid perturbation amplitude");
  sub->add_option("--jobs,-j", f.jobs, "concurrent runs (0 = all cores)");
}

void add_study(CLI::App* sub, Flags& f) {
  sub->add_option("--grids", f.grids, "comma-separated grid sizes");
  sub->add_flag("--check-orders", f.check_orders, "exit 4 when an order leaves its band");
}

std::vector<std::pair<std::string, std::string>> collect_flags(CLI::App* sub, const Flags& f) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  auto given = [sub](const char* name) {
    try {
      return sub->get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--problem")) out.emplace_back("problem", f.problem);
  if (given("--full")) out.emplace_back("grids", "7,11,15,23,31");
  if (given("--grids")) out.emplace_back("grids", f.grids);
  if (given("--n")) out.emplace_back("grids", std::to_string(f.n));
  if (given("--regular")) out.emplace_back("regular", "true");
  if (given("--strategies")) out.emplace_back("strategies", f.strategies);
  if (given("--strategy")) out.emplace_back("strategies", f.strategy);
  if (given("--omegas")) out.emplace_back("omegas", f.omegas);
  if (given("--output")) out.emplace_back("output", f.output);
  if (given("--seed")) out.emplace_back("seed", std::to_string(f.seed));
  if (given("--perturbation")) {
    std::ostringstream s;
    s << std::setprecision(17) << f.perturbation;
    out.emplace_back("perturbation", s.str());
  }
  if (given("--jobs")) out.emplace_back("jobs", std::to_string(f.jobs));
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
  Context ctx{out, err};
  Flags f;
  CLI::App app{"Finite-volume viscous-flux face reconstruction studies", "fvvisc"};
  app.require_subcommand(1, 1);

  auto* s1 = app.add_subcommand("study-1d", "1D nonlinear diffusion order study");
  add_common(s1, f);
  add_study(s1, f);
  s1->add_flag("--regular", f.regular, "uniform grids");
  s1->add_option("--strategies", f.strategies, "comma-separated strategy names");

  auto* s2 = app.add_subcommand("study-1d-omega", "1D weighted-average omega study");
  add_common(s2, f);
  add_study(s2, f);
  s2->add_flag("--regular", f.regular, "uniform grids (the default)");
  s2->add_option("--omegas", f.omegas, "comma-separated weights in [0, 1]");

  auto* s3 = app.add_subcommand("study-3d", "3D manufactured-solution order study");
  add_common(s3, f);
  add_study(s3, f);
  s3->add_option("--strategies", f.strategies, "comma-separated strategy names");
  s3->add_flag("--full", f.full, "grids 7,11,15,23,31");

  auto* s4 = app.add_subcommand("solve", "single solve with iteration history");
  add_common(s4, f);
  s4->add_option("--problem", f.problem, "diffusion1d or ns3d");
  s4->add_option("--n", f.n, "grid size");
  s4->add_option("--strategy", f.strategy, "strategy name");
  s4->add_flag("--regular", f.regular, "uniform 1D grid");

  auto* s5 = app.add_subcommand("mesh-export", "write a perturbed tet mesh as legacy VTK");
  add_common(s5, f);
  s5->add_option("--n", f.n, "cells per direction");

  auto* s6 = app.add_subcommand("selftest", "run the invariant suite");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    if (sub == s6) return run_selftest(ctx);
    std::optional<std::string> config_path;
    if (sub->get_option("--config")->count() > 0) config_path = f.config;
    const auto flags = collect_flags(sub, f);
    const StudyConfig cfg = build_config(command, config_path, env, flags);
    cfg.flow.validate();
    cfg.solver.validate();
    if (cfg.jobs < 0) throw ConfigError("jobs must be >= 0");
    if (cfg.grids.empty()) throw ConfigError("no grids selected");
    if (sub == s4) return run_solve(cfg, ctx);
    if (sub == s5) return run_mesh_export(cfg, ctx);
    return run_study(command, cfg, f.check_orders, ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace fvvisc::cli
