#include "fvvisc/diffusion1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "fvvisc/errors.hpp"

namespace fvvisc {

double diffusion_exact(double x) { return std::exp(2.0 * x); }

double diffusion_forcing(double x) { return -12.0 * std::exp(6.0 * x); }

Diffusion1DProblem::Diffusion1DProblem(Grid1D grid, ReconstructionStrategy strategy, double alpha)
    : grid_(std::move(grid)), strategy_(strategy), alpha_(alpha) {
  if (!(alpha_ > 0.0)) throw InvalidArgument("Diffusion1DProblem: alpha must be positive");
}

std::vector<double> Diffusion1DProblem::exact_cell_values() const {
  std::vector<double> u(static_cast<std::size_t>(grid_.num_cells()));
  for (Index j = 0; j < grid_.num_cells(); ++j) {
    u[static_cast<std::size_t>(j)] = diffusion_exact(grid_.center(j));
  }
  return u;
}

std::vector<double> Diffusion1DProblem::initial_guess() const {
  std::vector<double> u(static_cast<std::size_t>(grid_.num_cells()), 1.0);
  apply_boundary_closure(u);
  return u;
}

void Diffusion1DProblem::apply_boundary_closure(std::span<double> u) const {
  const Index n = grid_.num_cells();
  u[0] = diffusion_exact(grid_.center(0));
  u[static_cast<std::size_t>(n) - 1] = diffusion_exact(grid_.center(n - 1));
}

double Diffusion1DProblem::face_viscosity(std::span<const double> u, std::span<const double> grad,
                                          Index j) const {
  const auto a = static_cast<std::size_t>(j);
  const double xj = grid_.center(j);
  const double xk = grid_.center(j + 1);
  const double xf = grid_.face_between(j);
  double nu_left = 0.0;
  double nu_right = 0.0;
  if (strategy_.uses_reconstruction()) {
    const auto [ul, ur] = reconstruct_lr_1d(u[a], grad[a], xj, u[a + 1], grad[a + 1], xk, xf);
    nu_left = ul * ul;
    nu_right = ur * ur;
  }
  return face_scalar(strategy_, u[a] * u[a], u[a + 1] * u[a + 1], nu_left, nu_right,
                     std::abs(xf - xj), std::abs(xf - xk));
}

std::vector<double> Diffusion1DProblem::face_fluxes(std::span<const double> u) const {
  const Index n = grid_.num_cells();
  if (static_cast<Index>(u.size()) != n) {
    throw InvalidArgument("Diffusion1DProblem: solution size does not match cell count");
  }
  const std::vector<double> grad = gradient_1d(grid_, u);
  std::vector<double> flux(static_cast<std::size_t>(n) - 1);
  for (Index j = 0; j + 1 < n; ++j) {
    const auto a = static_cast<std::size_t>(j);
    const double xj = grid_.center(j);
    const double xk = grid_.center(j + 1);
    const double xf = grid_.face_between(j);
    const auto [ul, ur] = reconstruct_lr_1d(u[a], grad[a], xj, u[a + 1], grad[a + 1], xk, xf);
    const double ux = alpha_damped_face_derivative_1d(grad[a], grad[a + 1], ul, ur, xj, xk, alpha_);
    flux[a] = -face_viscosity(u, grad, j) * ux;
  }
  return flux;
}

std::vector<double> Diffusion1DProblem::residual(std::span<const double> u) const {
  const std::vector<double> flux = face_fluxes(u);
  const Index n = grid_.num_cells();
  std::vector<double> res(static_cast<std::size_t>(n), 0.0);
  for (Index j = 1; j + 1 < n; ++j) {
    const auto a = static_cast<std::size_t>(j);
    res[a] = flux[a] - flux[a - 1] - diffusion_forcing(grid_.center(j)) * grid_.width(j);
  }
  return res;
}

std::vector<double> residual_1d(const Diffusion1DProblem& problem, std::span<const double> u) {
  return problem.residual(u);
}

std::vector<std::vector<Index>> Diffusion1DProblem::coupling() const {
  // The alpha-damped flux at face j+1/2 reaches cells j-1 .. j+2.
  const Index n = grid_.num_cells();
  std::vector<std::vector<Index>> c(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    for (Index k = std::max<Index>(0, j - 2); k <= std::min<Index>(n - 1, j + 2); ++k) {
      if (k != j) c[static_cast<std::size_t>(j)].push_back(k);
    }
  }
  return c;
}

void Diffusion1DProblem::residual(std::span<const Vector> u, std::span<Vector> res) const {
  std::vector<double> flat(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) flat[j] = u[j][0];
  const std::vector<double> r = residual(flat);
  for (std::size_t j = 0; j < r.size(); ++j) res[j][0] = r[j];
}

namespace {

struct Stencil {
  std::array<Index, 2> cells;
  std::array<double, 2> coeffs;
};

// d(u_x)_j / du as a two-point stencil, matching gradient_1d.
Stencil gradient_stencil(const Grid1D& grid, Index j) {
  const Index n = grid.num_cells();
  const Index lo = j == 0 ? 0 : j - 1;
  const Index hi = j == n - 1 ? n - 1 : j + 1;
  const double inv = 1.0 / (grid.center(hi) - grid.center(lo));
  return {{lo, hi}, {-inv, inv}};
}

}  // namespace

void Diffusion1DProblem::jacobian(std::span<const Vector> u, double cfl,
                                  BlockSparseMatrix<1>& jac) const {
  // Exact linearization of the alpha-damped flux with the face viscosity frozen.
  std::vector<double> flat(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) flat[j] = u[j][0];
  const std::vector<double> grad = gradient_1d(grid_, flat);
  const Index n = grid_.num_cells();

  auto add = [&](Index row, Index col, double value) {
    if (pinned(row)) return;
    if (row == col) {
      jac.diagonal(row)(0, 0) += value;
    } else {
      jac.off_diagonal(row, col)(0, 0) += value;
    }
  };

  for (Index j = 0; j + 1 < n; ++j) {
    const double xj = grid_.center(j);
    const double xk = grid_.center(j + 1);
    const double xf = grid_.face_between(j);
    const double dx = xk - xj;
    const double nu = face_viscosity(flat, grad, j);
    const double damp = alpha_ / (2.0 * dx);
    // (u_x)_f = c_j g_j + c_k g_k + damp (u_k - u_j).
    const double c_j = 0.5 - damp * (xf - xj);
    const double c_k = 0.5 + damp * (xf - xk);

    std::array<std::pair<Index, double>, 6> terms{};
    std::size_t count = 0;
    const Stencil sj = gradient_stencil(grid_, j);
    const Stencil sk = gradient_stencil(grid_, j + 1);
    for (int i = 0; i < 2; ++i) {
      terms[count++] = {sj.cells[static_cast<std::size_t>(i)], c_j * sj.coeffs[static_cast<std::size_t>(i)]};
      terms[count++] = {sk.cells[static_cast<std::size_t>(i)], c_k * sk.coeffs[static_cast<std::size_t>(i)]};
    }
    terms[count++] = {j, -damp};
    terms[count++] = {j + 1, damp};

    // phi = -nu (u_x)_f enters Res_j with + and Res_{j+1} with -.
    for (const auto& [col, dux] : terms) {
      add(j, col, -nu * dux);
      add(j + 1, col, nu * dux);
    }
  }
  for (Index j = 0; j < n; ++j) {
    if (pinned(j)) {
      jac.diagonal(j)(0, 0) = 1.0;
      continue;
    }
    const double uj = flat[static_cast<std::size_t>(j)];
    jac.diagonal(j)(0, 0) += 2.0 * std::max(uj * uj, 1e-12) / (cfl * grid_.width(j));
  }
}

Diffusion1DSolution solve_diffusion_1d(const Diffusion1DProblem& problem, const SolverConfig& cfg,
                                       std::vector<double> initial) {
  if (initial.empty()) initial = problem.initial_guess();
  if (static_cast<Index>(initial.size()) != problem.size()) {
    throw InvalidArgument("solve_diffusion_1d: initial guess has wrong size");
  }
  problem.apply_boundary_closure(initial);
  std::vector<NonlinearSystem<1>::Vector> u0(initial.size());
  for (std::size_t j = 0; j < initial.size(); ++j) u0[j][0] = initial[j];
  auto result = solve_defect_correction<1>(problem, std::move(u0), cfg);
  Diffusion1DSolution out;
  out.u.resize(result.solution.size());
  for (std::size_t j = 0; j < out.u.size(); ++j) out.u[j] = result.solution[j][0];
  out.history = std::move(result.history);
  out.iterations = result.iterations;
  return out;
}

}  // namespace fvvisc
