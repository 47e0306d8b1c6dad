#pragma once

#include <array>
#include <span>
#include <vector>

#include "fvvisc/mesh.hpp"
#include "fvvisc/physics.hpp"
#include "fvvisc/recon.hpp"
#include "fvvisc/solver.hpp"

namespace fvvisc {

/// Constant part of the manufactured primitive state (rho, u, v, w, T).
Vec5 manufactured_base_state();

/// psi = 0.1 exp(0.5 (x + y + z)).
double manufactured_psi(const Vec3& x);

/// Manufactured primitive state: every variable is its constant plus psi.
PrimitiveState manufactured_solution(double x, double y, double z);
Vec5 manufactured_primitive(const Vec3& x);

/// Primitive state with its first and second derivatives.
struct ManufacturedField {
  Vec5 w;
  StateGradient grad;           // column v = grad(w_v)
  std::array<Mat3, 5> hessian;  // hessian[v](i, k) = d2 w_v / dx_i dx_k
};

ManufacturedField manufactured_field(const Vec3& x);

/// Divergence of the exact inviscid plus viscous flux at x, so that the
/// manufactured state solves div F = forcing.
Vec5 mms_forcing(const Vec3& x, const FlowConfig& cfg);
Vec5 mms_forcing(double x, double y, double z, const FlowConfig& cfg);

/// Physical total flux F . n of the manufactured field at x, with the face
/// velocity and temperature taken from the point itself.
Vec5 manufactured_normal_flux(const Vec3& x, const Vec3& unit_normal, const FlowConfig& cfg);

/// Cell-centered finite-volume discretization of the compressible
/// Navier-Stokes equations with manufactured forcing.
///
/// Res_j = sum over faces of (Roe flux + viscous flux) |n| - forcing(x_j) V_j.
/// Cells that own a boundary face are pinned to the manufactured state and
/// carry zero residual.
class NS3DProblem final : public NonlinearSystem<5> {
 public:
  NS3DProblem(Mesh3D mesh, ReconstructionStrategy strategy, FlowConfig cfg = {});

  const Mesh3D& mesh() const noexcept { return mesh_; }
  const ReconstructionStrategy& strategy() const noexcept { return strategy_; }
  const FlowConfig& config() const noexcept { return cfg_; }
  const LsqGradient3D& gradient_operator() const noexcept { return lsq_; }

  /// Forcing per cell, evaluated at the centroid (not yet multiplied by volume).
  std::span<const Vec5> forcing() const noexcept { return forcing_; }
  void set_forcing(std::vector<Vec5> forcing);

  std::vector<Vec5> exact_states() const;

  /// Free-stream constants in the interior, manufactured values in pinned cells.
  std::vector<Vec5> initial_guess() const;

  void apply_boundary_closure(std::span<Vec5> w) const;

  std::vector<StateGradient> gradients(std::span<const Vec5> w) const;

  /// Residual of every cell, boundary faces included, before the closure.
  /// Boundary faces carry the physical flux of the owner's reconstructed state.
  void raw_residual(std::span<const Vec5> w, std::span<const StateGradient> grads,
                    std::span<Vec5> res) const;

  /// Sum of boundary-face fluxes times area, for the conservation check.
  Vec5 boundary_flux_sum(std::span<const Vec5> w, std::span<const StateGradient> grads) const;

  /// Residual with the closure applied (pinned rows are zero).
  std::vector<Vec5> residual(std::span<const Vec5> w) const;

  // NonlinearSystem<5>
  Index size() const override { return mesh_.num_cells(); }
  bool pinned(Index j) const override { return mesh_.boundary_adjacent(j); }
  std::vector<std::vector<Index>> coupling() const override;
  void residual(std::span<const Vector> w, std::span<Vector> res) const override;
  void jacobian(std::span<const Vector> w, double cfl, BlockSparseMatrix<5>& jac) const override;
  bool admissible(std::span<const Vector> w) const override;

 private:
  Vec5 interior_flux(Index f, std::span<const Vec5> w, std::span<const StateGradient> grads) const;
  Vec5 boundary_flux(Index f, std::span<const Vec5> w, std::span<const StateGradient> grads) const;
  Vec5 compact_flux(const Vec5& w_j, const Vec5& w_k, const Vec3& unit_normal, double distance,
                    double mu) const;

  Mesh3D mesh_;
  ReconstructionStrategy strategy_;
  FlowConfig cfg_;
  LsqGradient3D lsq_;
  std::vector<Vec5> forcing_;
};

/// Residual for given states and precomputed gradients, closure applied.
std::vector<Vec5> residual_ns3d(const NS3DProblem& problem, std::span<const Vec5> states,
                                std::span<const StateGradient> gradients);

struct NS3DSolution {
  std::vector<Vec5> w;
  IterationHistory history;
  int iterations = 0;
};

NS3DSolution solve_ns3d(const NS3DProblem& problem, const SolverConfig& cfg,
                        std::vector<Vec5> initial = {});

}  // namespace fvvisc
