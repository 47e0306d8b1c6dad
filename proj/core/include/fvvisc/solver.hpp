#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "fvvisc/errors.hpp"
#include "fvvisc/types.hpp"

namespace fvvisc {

struct SolverConfig {
  double target_drop = 8.0;      // orders of magnitude of L1 residual reduction
  int max_iterations = 5000;
  double cfl_start = 10.0;
  double cfl_max = 1e6;
  double cfl_growth = 2.0;       // geometric ramp factor per iteration
  int linear_sweeps = 15;        // symmetric Gauss-Seidel sweeps per iteration
  double absolute_tolerance = 0.0;

  void validate() const;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct IterationRecord {
  int iteration = 0;
  std::vector<double> l1_residual;  // one entry per equation
  double cfl = 0.0;

  double max_norm() const {
    return l1_residual.empty() ? 0.0 : *std::max_element(l1_residual.begin(), l1_residual.end());
  }
};

using IterationHistory = std::vector<IterationRecord>;

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, IterationHistory history)
      : Error(what), history_(std::move(history)) {}
  const IterationHistory& history() const noexcept { return history_; }

 private:
  IterationHistory history_;
};

class SolverDivergence : public Error {
 public:
  SolverDivergence(const std::string& what, IterationHistory history)
      : Error(what), history_(std::move(history)) {}
  const IterationHistory& history() const noexcept { return history_; }

 private:
  IterationHistory history_;
};

/// CSV with columns iteration, res_0..res_{B-1}, cfl.
void write_history_csv(std::ostream& out, const IterationHistory& history);

// ---------------------------------------------------------------------------
// Block sparse matrix with Gauss-Seidel relaxation
// ---------------------------------------------------------------------------

template <int B>
class BlockSparseMatrix {
 public:
  using Block = Eigen::Matrix<double, B, B>;
  using Vector = Eigen::Matrix<double, B, 1>;

  /// coupling[j] lists the off-diagonal columns of row j.
  explicit BlockSparseMatrix(const std::vector<std::vector<Index>>& coupling) {
    offsets_.reserve(coupling.size() + 1);
    offsets_.push_back(0);
    for (std::size_t j = 0; j < coupling.size(); ++j) {
      std::vector<Index> row(coupling[j]);
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      for (Index k : row) {
        if (k == static_cast<Index>(j) || k < 0 || k >= static_cast<Index>(coupling.size())) {
          throw InvalidArgument("BlockSparseMatrix: invalid coupling entry");
        }
        columns_.push_back(k);
      }
      offsets_.push_back(static_cast<Index>(columns_.size()));
    }
    diagonal_.assign(coupling.size(), Block::Zero());
    inverse_.assign(coupling.size(), Block::Zero());
    off_.assign(columns_.size(), Block::Zero());
  }

  Index rows() const noexcept { return static_cast<Index>(diagonal_.size()); }

  void set_zero() {
    std::fill(diagonal_.begin(), diagonal_.end(), Block::Zero());
    std::fill(off_.begin(), off_.end(), Block::Zero());
  }

  Block& diagonal(Index row) { return diagonal_[static_cast<std::size_t>(row)]; }
  const Block& diagonal(Index row) const { return diagonal_[static_cast<std::size_t>(row)]; }

  /// Off-diagonal block (row, col); throws InvalidArgument if not in the pattern.
  Block& off_diagonal(Index row, Index col) {
    const auto b = columns_.begin() + offsets_[static_cast<std::size_t>(row)];
    const auto e = columns_.begin() + offsets_[static_cast<std::size_t>(row) + 1];
    const auto it = std::lower_bound(b, e, col);
    if (it == e || *it != col) throw InvalidArgument("BlockSparseMatrix: entry not in pattern");
    return off_[static_cast<std::size_t>(it - columns_.begin())];
  }

  Block& at(Index row, Index col) { return row == col ? diagonal(row) : off_diagonal(row, col); }

  /// y = A x.
  void multiply(std::span<const Vector> x, std::span<Vector> y) const {
    for (std::size_t j = 0; j < diagonal_.size(); ++j) {
      Vector acc = diagonal_[j] * x[j];
      for (auto s = static_cast<std::size_t>(offsets_[j]);
           s < static_cast<std::size_t>(offsets_[j + 1]); ++s) {
        acc.noalias() += off_[s] * x[static_cast<std::size_t>(columns_[s])];
      }
      y[j] = acc;
    }
  }

  /// Inverts diagonal blocks; must be called after assembly and before relaxation.
  /// Returns false if a diagonal block is singular.
  bool factor() {
    for (std::size_t j = 0; j < diagonal_.size(); ++j) {
      if constexpr (B == 1) {
        if (diagonal_[j](0, 0) == 0.0) return false;
        inverse_[j](0, 0) = 1.0 / diagonal_[j](0, 0);
      } else {
        Eigen::FullPivLU<Block> lu(diagonal_[j]);
        if (!lu.isInvertible()) return false;
        inverse_[j] = lu.inverse();
      }
    }
    return true;
  }

  /// Symmetric (forward then backward) block Gauss-Seidel on A x = b.
  /// Rows flagged in `fixed` keep x = 0.
  void symmetric_gauss_seidel(std::span<const Vector> rhs, std::span<Vector> x, int sweeps,
                              std::span<const std::uint8_t> fixed) const {
    const auto n = diagonal_.size();
    auto relax = [&](std::size_t j) {
      if (fixed[j]) {
        x[j].setZero();
        return;
      }
      Vector r = rhs[j];
      for (auto s = static_cast<std::size_t>(offsets_[j]);
           s < static_cast<std::size_t>(offsets_[j + 1]); ++s) {
        const auto k = static_cast<std::size_t>(columns_[s]);
        if (!fixed[k]) r.noalias() -= off_[s] * x[k];
      }
      x[j] = inverse_[j] * r;
    };
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      for (std::size_t j = 0; j < n; ++j) relax(j);
      for (std::size_t j = n; j-- > 0;) relax(j);
    }
  }

 private:
  std::vector<Index> offsets_;
  std::vector<Index> columns_;
  std::vector<Block> diagonal_;
  std::vector<Block> inverse_;
  std::vector<Block> off_;
};

// ---------------------------------------------------------------------------
// Nonlinear system interface and driver
// ---------------------------------------------------------------------------

/// Steady discrete system R(u) = 0 with B unknowns per cell.
template <int B>
class NonlinearSystem {
 public:
  using Vector = Eigen::Matrix<double, B, 1>;

  virtual ~NonlinearSystem() = default;

  virtual Index size() const = 0;

  /// Pinned cells hold prescribed values; the solver never changes them.
  virtual bool pinned(Index j) const = 0;

  /// Off-diagonal sparsity of the approximate Jacobian.
  virtual std::vector<std::vector<Index>> coupling() const = 0;

  virtual void residual(std::span<const Vector> u, std::span<Vector> res) const = 0;

  /// Low-order approximation of dR/du plus a pseudo-time diagonal at `cfl`.
  virtual void jacobian(std::span<const Vector> u, double cfl, BlockSparseMatrix<B>& jac) const = 0;

  /// Whether u is an acceptable iterate (e.g. positive density and temperature).
  virtual bool admissible(std::span<const Vector> /*u*/) const { return true; }
};

template <int B>
struct SolveResult {
  std::vector<Eigen::Matrix<double, B, 1>> solution;
  IterationHistory history;
  int iterations = 0;
  int nonmonotone_steps = 0;  // residual increases after the first 10 iterations
};

/// Per-equation mean absolute residual over unpinned cells.
template <int B>
std::vector<double> l1_residual_norms(const NonlinearSystem<B>& system,
                                      std::span<const Eigen::Matrix<double, B, 1>> res) {
  std::vector<double> norms(B, 0.0);
  std::size_t count = 0;
  for (Index j = 0; j < system.size(); ++j) {
    if (system.pinned(j)) continue;
    ++count;
    for (int e = 0; e < B; ++e) norms[static_cast<std::size_t>(e)] += std::abs(res[static_cast<std::size_t>(j)][e]);
  }
  if (count > 0) {
    for (double& v : norms) v /= static_cast<double>(count);
  }
  return norms;
}

/// Implicit defect correction: u <- u + du with (J~ + V/dt) du = -R(u),
/// J~ a low-order Jacobian, solved by symmetric Gauss-Seidel sweeps. Stops when
/// max_e L1(R_e) has dropped by target_drop orders from the initial guess or
/// fallen below absolute_tolerance. Throws NonConvergence or SolverDivergence.
template <int B>
SolveResult<B> solve_defect_correction(
    const NonlinearSystem<B>& system, std::vector<Eigen::Matrix<double, B, 1>> u,
    const SolverConfig& cfg, const std::function<void(const IterationRecord&)>& observer = {}) {
  using Vector = Eigen::Matrix<double, B, 1>;
  constexpr double kMaxGrowth = 2.0;
  constexpr double kMinCflFraction = 1e-6;
  cfg.validate();
  const auto n = static_cast<std::size_t>(system.size());
  if (u.size() != n) throw InvalidArgument("solve_defect_correction: initial guess has wrong size");

  std::vector<std::uint8_t> fixed(n, 0);
  for (std::size_t j = 0; j < n; ++j) fixed[j] = system.pinned(static_cast<Index>(j)) ? 1 : 0;

  SolveResult<B> result;
  std::vector<Vector> res(n, Vector::Zero());
  system.residual(u, res);
  auto norms = l1_residual_norms<B>(system, res);
  double norm0 = *std::max_element(norms.begin(), norms.end());
  double norm = norm0;
  double cfl = cfg.cfl_start;
  result.history.push_back({0, norms, cfl});
  if (observer) observer(result.history.back());
  if (!std::isfinite(norm0)) {
    throw SolverDivergence("defect correction: initial residual is not finite", result.history);
  }

  const double target = norm0 * std::pow(10.0, -cfg.target_drop);
  auto done = [&](double v) { return v <= cfg.absolute_tolerance || v <= target; };
  if (done(norm)) {
    result.solution = std::move(u);
    return result;
  }

  BlockSparseMatrix<B> jac(system.coupling());
  std::vector<Vector> rhs(n), du(n), trial(n), res_trial(n), check(n);
  int consecutive_failures = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    jac.set_zero();
    system.jacobian(u, cfl, jac);
    if (!jac.factor()) {
      throw SolverDivergence("defect correction: singular diagonal block", result.history);
    }
    double rhs_norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      rhs[j] = fixed[j] ? Vector::Zero() : Vector(-res[j]);
      rhs_norm += rhs[j].cwiseAbs().sum();
      du[j].setZero();
    }
    jac.symmetric_gauss_seidel(rhs, du, cfg.linear_sweeps, fixed);

    jac.multiply(du, check);
    double lin_norm = 0.0;
    bool finite = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (fixed[j]) continue;
      lin_norm += (check[j] - rhs[j]).cwiseAbs().sum();
      finite = finite && du[j].allFinite();
    }
    if (!finite || lin_norm > 1e3 * rhs_norm) {
      throw SolverDivergence("defect correction: linear relaxation diverged at iteration " +
                                 std::to_string(it),
                             result.history);
    }

    // Backtrack on inadmissible states (nonpositive rho or T).
    double step = 1.0;
    bool accepted = false;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt, step *= 0.5) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = u[j] + step * du[j];
      if (!system.admissible(trial)) continue;
      try {
        system.residual(trial, res_trial);
      } catch (const Error&) {
        continue;
      }
      accepted = true;
    }
    if (!accepted) {
      if (++consecutive_failures > 12 || cfl <= kMinCflFraction * cfg.cfl_start) {
        throw SolverDivergence("defect correction: no admissible update at iteration " +
                                   std::to_string(it),
                               result.history);
      }
      cfl = std::max(cfl * 0.1, kMinCflFraction * cfg.cfl_start);
      continue;
    }

    auto new_norms = l1_residual_norms<B>(system, res_trial);
    const double new_norm = *std::max_element(new_norms.begin(), new_norms.end());
    // Reject updates that raise the residual sharply and retry with a smaller
    // pseudo-time step.
    if (!std::isfinite(new_norm) || new_norm > kMaxGrowth * norm) {
      if (++consecutive_failures > 12 || cfl <= kMinCflFraction * cfg.cfl_start) {
        result.history.push_back({it, new_norms, cfl});
        throw SolverDivergence("defect correction: residual blew up at iteration " +
                                   std::to_string(it),
                               result.history);
      }
      cfl = std::max(cfl * 0.1, kMinCflFraction * cfg.cfl_start);
      continue;
    }
    consecutive_failures = 0;
    std::swap(u, trial);
    std::swap(res, res_trial);
    if (it > 10 && new_norm > norm) ++result.nonmonotone_steps;

    result.history.push_back({it, new_norms, cfl});
    if (observer) observer(result.history.back());
    result.iterations = it;

    cfl = std::min(cfl * cfg.cfl_growth, cfg.cfl_max);
    norm = new_norm;
    if (done(norm)) {
      result.solution = std::move(u);
      return result;
    }
  }
  throw NonConvergence("defect correction: residual dropped " +
                           std::to_string(std::log10(norm0 / norm)) + " of " +
                           std::to_string(cfg.target_drop) + " orders in " +
                           std::to_string(cfg.max_iterations) + " iterations",
                       result.history);
}

}  // namespace fvvisc
