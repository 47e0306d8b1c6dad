#include "fvvisc/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

#include "fvvisc/diffusion1d.hpp"
#include "fvvisc/errors.hpp"
#include "fvvisc/mesh.hpp"
#include "fvvisc/ns3d.hpp"

namespace fvvisc {

double l1_error(std::span<const double> solution, std::span<const double> exact,
                std::span<const double> volumes) {
  if (solution.size() != exact.size()) {
    throw InvalidArgument("l1_error: solution and exact arrays differ in length");
  }
  if (!volumes.empty() && volumes.size() != solution.size()) {
    throw InvalidArgument("l1_error: volume array differs in length");
  }
  if (solution.empty()) throw InvalidArgument("l1_error: empty arrays");
  double sum = 0.0;
  double weight = 0.0;
  for (std::size_t j = 0; j < solution.size(); ++j) {
    const double w = volumes.empty() ? 1.0 : volumes[j];
    sum += w * std::abs(solution[j] - exact[j]);
    weight += w;
  }
  return sum / weight;
}

std::vector<double> l1_error(std::span<const Vec5> solution, std::span<const Vec5> exact,
                             std::span<const double> volumes) {
  std::vector<double> out(5);
  std::vector<double> a(solution.size());
  std::vector<double> b(exact.size());
  for (int v = 0; v < 5; ++v) {
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = solution[j][v];
    for (std::size_t j = 0; j < b.size(); ++j) b[j] = exact[j][v];
    out[static_cast<std::size_t>(v)] = l1_error(a, b, volumes);
  }
  return out;
}

double effective_spacing(Index cells, int dimension) {
  if (cells <= 0 || dimension < 1) throw InvalidArgument("effective_spacing: invalid arguments");
  return std::pow(static_cast<double>(cells), -1.0 / static_cast<double>(dimension));
}

void ConvergenceRecord::sort_rows() {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.h_eff > b.h_eff; });
}

std::vector<const ConvergenceRow*> ConvergenceRecord::successful_rows() const {
  std::vector<const ConvergenceRow*> out;
  for (const ConvergenceRow& r : rows) {
    if (!r.failed) out.push_back(&r);
  }
  return out;
}

OrderEstimate observed_order(std::span<const double> h, std::span<const double> error) {
  if (h.size() != error.size()) throw InvalidArgument("observed_order: size mismatch");
  if (h.size() < 2) throw InvalidArgument("observed_order: need at least two rows");
  for (std::size_t i = 0; i < error.size(); ++i) {
    if (!(error[i] > 0.0)) {
      throw DegenerateOrder("observed_order: zero error on row " + std::to_string(i));
    }
    if (!(h[i] > 0.0)) throw InvalidArgument("observed_order: nonpositive spacing");
  }
  OrderEstimate est;
  est.pairwise.assign(h.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i < h.size(); ++i) {
    est.pairwise[i] = std::log(error[i - 1] / error[i]) / std::log(h[i - 1] / h[i]);
  }
  const std::size_t rows = h.size();
  const std::size_t fit = std::max<std::size_t>(2, (rows + 1) / 2);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = rows - fit; i < rows; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(fit);
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw InvalidArgument("observed_order: repeated spacing");
  est.global = (m * sxy - sx * sy) / denom;
  est.fit_rows = static_cast<int>(fit);
  return est;
}

OrderEstimate observed_order(const ConvergenceRecord& record, std::size_t variable) {
  std::vector<double> h;
  std::vector<double> e;
  for (const ConvergenceRow* r : record.successful_rows()) {
    if (variable >= r->l1_error.size()) throw InvalidArgument("observed_order: bad variable index");
    h.push_back(r->h_eff);
    e.push_back(r->l1_error[variable]);
  }
  return observed_order(h, e);
}

namespace {

// Runs tasks on up to `jobs` threads; results land in caller-owned slots, so
// the outcome does not depend on scheduling.
void run_tasks(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& t : pool) t.join();
}

void mark_failed(ConvergenceRow& row, const std::exception& e) {
  row.failed = true;
  row.failure = e.what();
  row.l1_error.clear();
}

}  // namespace

std::vector<ConvergenceRecord> run_study_1d(const Study1DOptions& options) {
  if (options.grids.empty() || options.strategies.empty()) {
    throw InvalidArgument("run_study_1d: need at least one grid and one strategy");
  }
  std::vector<ConvergenceRecord> records(options.strategies.size());
  for (std::size_t s = 0; s < records.size(); ++s) {
    records[s].strategy = options.strategies[s].name();
    records[s].dimension = 1;
    records[s].variables = {"u"};
    records[s].rows.resize(options.grids.size());
  }
  const std::size_t ng = options.grids.size();
  run_tasks(records.size() * ng, options.jobs, [&](std::size_t task) {
    const std::size_t s = task / ng;
    const std::size_t g = task % ng;
    const Index n = options.grids[g];
    ConvergenceRow& row = records[s].rows[g];
    row.grid_label = "n=" + std::to_string(n);
    row.cells = n;
    row.h_eff = effective_spacing(n, 1);
    try {
      Diffusion1DProblem problem(
          generate_grid_1d(n, options.regular, options.perturbation, options.seed),
          options.strategies[s], options.alpha);
      const Diffusion1DSolution sol = solve_diffusion_1d(problem, options.solver);
      const std::vector<double> exact = problem.exact_cell_values();
      const auto widths = problem.grid().widths();
      row.l1_error = {options.volume_weighted ? l1_error(sol.u, exact, widths)
                                              : l1_error(sol.u, exact)};
      row.iterations = sol.iterations;
    } catch (const std::exception& e) {
      mark_failed(row, e);
    }
  });
  for (auto& r : records) r.sort_rows();
  return records;
}

std::vector<ConvergenceRecord> run_study_3d(const Study3DOptions& options) {
  if (options.grids.empty() || options.strategies.empty()) {
    throw InvalidArgument("run_study_3d: need at least one grid and one strategy");
  }
  std::vector<ConvergenceRecord> records(options.strategies.size());
  for (std::size_t s = 0; s < records.size(); ++s) {
    records[s].strategy = options.strategies[s].name();
    records[s].dimension = 3;
    records[s].variables = {"rho", "u", "v", "w", "T"};
    records[s].rows.resize(options.grids.size());
  }
  const std::size_t ng = options.grids.size();
  run_tasks(records.size() * ng, options.jobs, [&](std::size_t task) {
    const std::size_t s = task / ng;
    const std::size_t g = task % ng;
    const Index n = options.grids[g];
    ConvergenceRow& row = records[s].rows[g];
    row.grid_label = "n=" + std::to_string(n);
    try {
      NS3DProblem problem(generate_tet_mesh(n, options.perturbation, options.seed),
                          options.strategies[s], options.flow);
      row.cells = problem.size();
      row.h_eff = effective_spacing(row.cells, 3);
      const NS3DSolution sol = solve_ns3d(problem, options.solver);
      std::vector<Vec5> exact = problem.exact_states();
      std::vector<Vec5> solution = sol.w;
      std::vector<double> volumes;
      if (options.unpinned_only) {
        std::vector<Vec5> a, b;
        for (Index j = 0; j < problem.size(); ++j) {
          if (problem.pinned(j)) continue;
          a.push_back(solution[static_cast<std::size_t>(j)]);
          b.push_back(exact[static_cast<std::size_t>(j)]);
          volumes.push_back(problem.mesh().cell(j).volume);
        }
        solution = std::move(a);
        exact = std::move(b);
      } else {
        for (const TetCell& c : problem.mesh().cells()) volumes.push_back(c.volume);
      }
      if (!options.volume_weighted) volumes.clear();
      row.l1_error = l1_error(solution, exact, volumes);
      row.iterations = sol.iterations;
    } catch (const std::exception& e) {
      mark_failed(row, e);
      if (row.cells == 0) row.cells = 6 * n * n * n;
      row.h_eff = effective_spacing(row.cells, 3);
    }
  });
  for (auto& r : records) r.sort_rows();
  return records;
}

namespace {

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

}  // namespace

void write_study_csv(std::ostream& out, std::span<const ConvergenceRecord> records,
                     const std::vector<std::string>& comments) {
  write_comments(out, comments);
  for (const auto& rec : records) {
    for (const auto& row : rec.rows) {
      if (row.failed) out << "# failed: " << rec.strategy << ' ' << row.grid_label << ": " << row.failure << '\n';
    }
  }
  out << "strategy,grid_label,N,h_eff,var,l1_error,pair_order\n";
  out << std::setprecision(10);
  for (const auto& rec : records) {
    for (std::size_t v = 0; v < rec.variables.size(); ++v) {
      const ConvergenceRow* prev = nullptr;
      for (const auto& row : rec.rows) {
        out << rec.strategy << ',' << row.grid_label << ',' << row.cells << ',' << row.h_eff << ','
            << rec.variables[v] << ',';
        if (row.failed) {
          out << "nan,\n";
          continue;
        }
        const double e = row.l1_error[v];
        out << e << ',';
        if (prev != nullptr && e > 0.0 && prev->l1_error[v] > 0.0) {
          out << std::log(prev->l1_error[v] / e) / std::log(prev->h_eff / row.h_eff);
        }
        out << '\n';
        prev = &row;
      }
    }
  }
}

void write_summary_csv(std::ostream& out, std::span<const ConvergenceRecord> records,
                       const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "strategy,var,global_order,fit_rows,finest_h,finest_error\n";
  out << std::setprecision(10);
  for (const auto& rec : records) {
    const auto ok = rec.successful_rows();
    for (std::size_t v = 0; v < rec.variables.size(); ++v) {
      out << rec.strategy << ',' << rec.variables[v] << ',';
      try {
        const OrderEstimate est = observed_order(rec, v);
        out << est.global << ',' << est.fit_rows << ',';
      } catch (const Error&) {
        out << "nan,0,";
      }
      if (ok.empty()) {
        out << "nan,nan\n";
      } else {
        out << ok.back()->h_eff << ',' << ok.back()->l1_error[v] << '\n';
      }
    }
  }
}

}  // namespace fvvisc
