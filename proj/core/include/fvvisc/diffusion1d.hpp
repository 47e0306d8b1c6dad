#pragma once

#include <span>
#include <vector>

#include "fvvisc/mesh.hpp"
#include "fvvisc/recon.hpp"
#include "fvvisc/solver.hpp"

namespace fvvisc {

/// u_e = exp(2x), the exact solution of -(u^2 u_x)_x = f on [0, 1].
double diffusion_exact(double x);

/// f = -(nu u_e')' with nu = u_e^2, i.e. -12 exp(6x).
double diffusion_forcing(double x);

/// Steady nonlinear diffusion -(nu u_x)_x = f with nu = u^2 on a 1D grid.
///
/// Cell residual: Res_j = phi_{j+1/2} - phi_{j-1/2} - f(x_j) h_j, with the
/// diffusive flux phi = -nu_f (u_x)_f, the alpha-damped face derivative and a
/// face viscosity nu_f chosen by the strategy from u^2 values. The end cells
/// are pinned to u_e and have zero residual.
class Diffusion1DProblem final : public NonlinearSystem<1> {
 public:
  Diffusion1DProblem(Grid1D grid, ReconstructionStrategy strategy, double alpha = kAlphaDamping);

  const Grid1D& grid() const noexcept { return grid_; }
  const ReconstructionStrategy& strategy() const noexcept { return strategy_; }
  double alpha() const noexcept { return alpha_; }

  /// u_e at every cell center.
  std::vector<double> exact_cell_values() const;

  /// u = 1 in the interior, exact values in the end cells.
  std::vector<double> initial_guess() const;

  /// Pins the end cells to the exact solution.
  void apply_boundary_closure(std::span<double> u) const;

  /// Face viscosity at the face between cells j and j+1.
  double face_viscosity(std::span<const double> u, std::span<const double> grad, Index j) const;

  /// Diffusive flux phi at the face between cells j and j+1, for j = 0..n-2.
  std::vector<double> face_fluxes(std::span<const double> u) const;

  /// Residual with the boundary closure applied (Res_0 = Res_{n-1} = 0).
  std::vector<double> residual(std::span<const double> u) const;

  // NonlinearSystem<1>
  Index size() const override { return grid_.num_cells(); }
  bool pinned(Index j) const override { return j == 0 || j == grid_.num_cells() - 1; }
  std::vector<std::vector<Index>> coupling() const override;
  void residual(std::span<const Vector> u, std::span<Vector> res) const override;
  void jacobian(std::span<const Vector> u, double cfl, BlockSparseMatrix<1>& jac) const override;

 private:
  Grid1D grid_;
  ReconstructionStrategy strategy_;
  double alpha_;
};

/// Free-function form of Diffusion1DProblem::residual.
std::vector<double> residual_1d(const Diffusion1DProblem& problem, std::span<const double> u);

struct Diffusion1DSolution {
  std::vector<double> u;
  IterationHistory history;
  int iterations = 0;
};

/// Drives the problem from `initial` (or the default guess when empty) to
/// steady state with defect correction.
Diffusion1DSolution solve_diffusion_1d(const Diffusion1DProblem& problem, const SolverConfig& cfg,
                                       std::vector<double> initial = {});

}  // namespace fvvisc
