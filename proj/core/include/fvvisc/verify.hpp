#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fvvisc/physics.hpp"
#include "fvvisc/recon.hpp"
#include "fvvisc/solver.hpp"
#include "fvvisc/types.hpp"

namespace fvvisc {

/// (1/N) sum |u_j - u_e(x_j)|, or the volume-weighted mean when `volumes` is
/// non-empty. Throws InvalidArgument on length mismatch.
double l1_error(std::span<const double> solution, std::span<const double> exact,
                std::span<const double> volumes = {});

/// Per-variable version for 5-component states.
std::vector<double> l1_error(std::span<const Vec5> solution, std::span<const Vec5> exact,
                             std::span<const double> volumes = {});

/// N^(-1/d).
double effective_spacing(Index cells, int dimension);

struct ConvergenceRow {
  std::string grid_label;
  Index cells = 0;
  double h_eff = 0.0;
  std::vector<double> l1_error;  // one per variable; empty when failed
  int iterations = 0;
  bool failed = false;
  std::string failure;
};

/// Rows of one strategy, ordered by decreasing h_eff.
struct ConvergenceRecord {
  std::string strategy;
  int dimension = 1;
  std::vector<std::string> variables;
  std::vector<ConvergenceRow> rows;

  void sort_rows();
  std::vector<const ConvergenceRow*> successful_rows() const;
};

struct OrderEstimate {
  /// pairwise[i] is the order between successful rows i-1 and i; pairwise[0] is NaN.
  std::vector<double> pairwise;
  /// Least-squares slope of log e against log h over the finest rows.
  double global = 0.0;
  int fit_rows = 0;
};

/// Orders from (h, e) pairs sorted by decreasing h. The global slope uses the
/// finest max(2, ceil(rows/2)) rows. Throws DegenerateOrder on a zero error
/// and InvalidArgument with fewer than two rows.
OrderEstimate observed_order(std::span<const double> h, std::span<const double> error);

/// Same over the successful rows of a record for one variable.
OrderEstimate observed_order(const ConvergenceRecord& record, std::size_t variable);

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

struct Study1DOptions {
  std::vector<Index> grids{7, 11, 15, 19, 23, 31, 47, 63};
  bool regular = false;
  double perturbation = 0.3;
  std::uint64_t seed = 1;
  std::vector<ReconstructionStrategy> strategies;
  double alpha = kAlphaDamping;
  SolverConfig solver;
  bool volume_weighted = false;
  int jobs = 1;
};

struct Study3DOptions {
  std::vector<Index> grids{7, 11, 15};
  double perturbation = 0.3;
  std::uint64_t seed = 1;
  std::vector<ReconstructionStrategy> strategies;
  FlowConfig flow;
  SolverConfig solver;
  bool volume_weighted = false;
  /// Average over every cell (pinned cells contribute zero) or only over
  /// unpinned cells.
  bool unpinned_only = false;
  int jobs = 1;
};

/// One record per strategy, in the order given. Solver failures are caught
/// and recorded on the row.
std::vector<ConvergenceRecord> run_study_1d(const Study1DOptions& options);
std::vector<ConvergenceRecord> run_study_3d(const Study3DOptions& options);

/// strategy,grid_label,N,h_eff,var,l1_error,pair_order with '#' comment lines.
void write_study_csv(std::ostream& out, std::span<const ConvergenceRecord> records,
                     const std::vector<std::string>& comments = {});

/// strategy,var,global_order,fit_rows,finest_h,finest_error.
void write_summary_csv(std::ostream& out, std::span<const ConvergenceRecord> records,
                       const std::vector<std::string>& comments = {});

}  // namespace fvvisc
