#include "fvvisc/ns3d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fvvisc/errors.hpp"

namespace fvvisc {

// ---------------------------------------------------------------------------
// Manufactured solution
// ---------------------------------------------------------------------------

Vec5 manufactured_base_state() {
  Vec5 w;
  w << 1.0, 0.3, 0.2, 0.1, 1.0;
  return w;
}

double manufactured_psi(const Vec3& x) { return 0.1 * std::exp(0.5 * x.sum()); }

Vec5 manufactured_primitive(const Vec3& x) {
  return manufactured_base_state() + Vec5::Constant(manufactured_psi(x));
}

PrimitiveState manufactured_solution(double x, double y, double z) {
  return PrimitiveState::from_vector(manufactured_primitive(Vec3(x, y, z)));
}

ManufacturedField manufactured_field(const Vec3& x) {
  const double psi = manufactured_psi(x);
  ManufacturedField m;
  m.w = manufactured_base_state() + Vec5::Constant(psi);
  m.grad = StateGradient::Constant(0.5 * psi);
  m.hessian.fill(Mat3::Constant(0.25 * psi));
  return m;
}

Vec5 manufactured_normal_flux(const Vec3& x, const Vec3& unit_normal, const FlowConfig& cfg) {
  const ManufacturedField m = manufactured_field(x);
  const Vec3 v = m.w.segment<3>(1);
  const double mu = sutherland_viscosity(m.w[4], cfg);
  return inviscid_normal_flux(m.w, unit_normal, cfg.gamma) +
         viscous_normal_flux(m.grad, v, mu, unit_normal, cfg);
}

Vec5 mms_forcing(const Vec3& x, const FlowConfig& cfg) {
  const ManufacturedField m = manufactured_field(x);
  const double g = cfg.gamma;
  const double rho = m.w[0];
  const Vec3 v = m.w.segment<3>(1);
  const double t = m.w[4];
  const Vec3 d_rho = m.grad.col(0);
  const Mat3 d_v = m.grad.block<3, 3>(0, 1).transpose();  // d_v(k, i) = d v_k / dx_i
  const Vec3 d_t = m.grad.col(4);

  Vec5 div = Vec5::Zero();

  // Inviscid part, expanded by the product rule.
  const double enthalpy = t / (g - 1.0) + 0.5 * v.squaredNorm();
  const Vec3 d_enthalpy = d_t / (g - 1.0) + d_v.transpose() * v;
  for (int i = 0; i < 3; ++i) {
    div[0] += d_rho[i] * v[i] + rho * d_v(i, i);
    for (int k = 0; k < 3; ++k) {
      div[1 + k] += d_rho[i] * v[i] * v[k] + rho * d_v(i, i) * v[k] + rho * v[i] * d_v(k, i);
    }
    div[4] += d_v(i, i) * rho * enthalpy + v[i] * d_rho[i] * enthalpy + v[i] * rho * d_enthalpy[i];
  }
  for (int k = 0; k < 3; ++k) div[1 + k] += (d_rho[k] * t + rho * d_t[k]) / g;

  // Viscous part: F_vis^i = (0, -tau e_i, -(tau e_i) . v - kappa dT/dx_i).
  const double mu = sutherland_viscosity(t, cfg);
  const double dmu = sutherland_viscosity_derivative(t, cfg);
  const double conduct = 1.0 / (cfg.prandtl * (g - 1.0));
  const Mat3 strain = d_v + d_v.transpose() - (2.0 / 3.0) * d_v.trace() * Mat3::Identity();
  const Mat3 tau = mu * strain;

  // d(div v) / dx_i.
  Vec3 d_div_v = Vec3::Zero();
  for (int m_ = 0; m_ < 3; ++m_) d_div_v += m.hessian[static_cast<std::size_t>(1 + m_)].col(m_);

  // div_tau[k] = sum_i d tau_ki / dx_i.
  Vec3 div_tau = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    const Mat3& hk = m.hessian[static_cast<std::size_t>(1 + k)];
    for (int i = 0; i < 3; ++i) {
      const double d_strain = hk(i, i) + m.hessian[static_cast<std::size_t>(1 + i)](k, i) -
                              (k == i ? (2.0 / 3.0) * d_div_v[i] : 0.0);
      div_tau[k] += dmu * d_t[i] * strain(k, i) + mu * d_strain;
    }
  }
  for (int k = 0; k < 3; ++k) div[1 + k] -= div_tau[k];

  double work = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) work += tau(k, i) * d_v(k, i);
  }
  const double laplace_t = m.hessian[4].trace();
  div[4] -= div_tau.dot(v) + work;
  div[4] -= conduct * (dmu * d_t.squaredNorm() + mu * laplace_t);
  return div;
}

Vec5 mms_forcing(double x, double y, double z, const FlowConfig& cfg) {
  return mms_forcing(Vec3(x, y, z), cfg);
}

// ---------------------------------------------------------------------------
// NS3DProblem
// ---------------------------------------------------------------------------

NS3DProblem::NS3DProblem(Mesh3D mesh, ReconstructionStrategy strategy, FlowConfig cfg)
    : mesh_(std::move(mesh)), strategy_(strategy), cfg_(cfg), lsq_(mesh_) {
  cfg_.validate();
  forcing_.reserve(static_cast<std::size_t>(mesh_.num_cells()));
  for (const TetCell& c : mesh_.cells()) forcing_.push_back(mms_forcing(c.centroid, cfg_));
}

void NS3DProblem::set_forcing(std::vector<Vec5> forcing) {
  if (static_cast<Index>(forcing.size()) != mesh_.num_cells()) {
    throw InvalidArgument("NS3DProblem: forcing size does not match cell count");
  }
  forcing_ = std::move(forcing);
}

std::vector<Vec5> NS3DProblem::exact_states() const {
  std::vector<Vec5> w;
  w.reserve(static_cast<std::size_t>(mesh_.num_cells()));
  for (const TetCell& c : mesh_.cells()) w.push_back(manufactured_primitive(c.centroid));
  return w;
}

std::vector<Vec5> NS3DProblem::initial_guess() const {
  std::vector<Vec5> w(static_cast<std::size_t>(mesh_.num_cells()), manufactured_base_state());
  apply_boundary_closure(w);
  return w;
}

void NS3DProblem::apply_boundary_closure(std::span<Vec5> w) const {
  for (Index j = 0; j < mesh_.num_cells(); ++j) {
    if (pinned(j)) w[static_cast<std::size_t>(j)] = manufactured_primitive(mesh_.cell(j).centroid);
  }
}

std::vector<StateGradient> NS3DProblem::gradients(std::span<const Vec5> w) const {
  return lsq_.compute(w);
}

Vec5 NS3DProblem::interior_flux(Index f, std::span<const Vec5> w,
                                std::span<const StateGradient> grads) const {
  const TriFace& face = mesh_.face(f);
  const auto j = static_cast<std::size_t>(face.owner);
  const auto k = static_cast<std::size_t>(face.neighbor);
  const Vec3& x_j = mesh_.cell(face.owner).centroid;
  const Vec3& x_k = mesh_.cell(face.neighbor).centroid;
  const Vec3& n = face.unit_normal;

  const FaceStates lr = reconstruct_lr(w[j], grads[j], x_j, w[k], grads[k], x_k, face.centroid);
  const double dist_j = (face.centroid - x_j).norm();
  const double dist_k = (face.centroid - x_k).norm();
  const double t_f =
      face_scalar(strategy_, w[j][4], w[k][4], lr.left[4], lr.right[4], dist_j, dist_k);
  if (!(t_f > 0.0)) {
    std::ostringstream msg;
    msg << "nonpositive face temperature " << t_f << " at face " << f << " (strategy "
        << strategy_.name() << ")";
    throw NonpositiveTemperature(msg.str());
  }
  const Vec3 v_f = face_vector(strategy_, w[j].segment<3>(1), w[k].segment<3>(1),
                               lr.left.segment<3>(1), lr.right.segment<3>(1), dist_j, dist_k);
  const double mu = sutherland_viscosity(t_f, cfg_);
  const StateGradient grad_f =
      alpha_damped_face_gradient(grads[j], grads[k], lr.left, lr.right, x_j, x_k, n, cfg_.alpha);
  return roe_flux(lr.left, lr.right, n, cfg_) + viscous_normal_flux(grad_f, v_f, mu, n, cfg_);
}

Vec5 NS3DProblem::boundary_flux(Index f, std::span<const Vec5> w,
                                std::span<const StateGradient> grads) const {
  const TriFace& face = mesh_.face(f);
  const auto j = static_cast<std::size_t>(face.owner);
  const Vec5 w_b = w[j] + grads[j].transpose() * (face.centroid - mesh_.cell(face.owner).centroid);
  const double mu = sutherland_viscosity(w_b[4], cfg_);
  return inviscid_normal_flux(w_b, face.unit_normal, cfg_.gamma) +
         viscous_normal_flux(grads[j], w_b.segment<3>(1), mu, face.unit_normal, cfg_);
}

void NS3DProblem::raw_residual(std::span<const Vec5> w, std::span<const StateGradient> grads,
                               std::span<Vec5> res) const {
  const auto n = static_cast<std::size_t>(mesh_.num_cells());
  if (w.size() != n || grads.size() != n || res.size() != n) {
    throw InvalidArgument("NS3DProblem: state, gradient or residual size does not match mesh");
  }
  for (std::size_t j = 0; j < n; ++j) res[j] = -forcing_[j] * mesh_.cells()[j].volume;
  for (Index f = 0; f < mesh_.num_faces(); ++f) {
    const TriFace& face = mesh_.face(f);
    if (face.is_boundary()) {
      res[static_cast<std::size_t>(face.owner)] += boundary_flux(f, w, grads) * face.area;
      continue;
    }
    const Vec5 flux = interior_flux(f, w, grads) * face.area;
    res[static_cast<std::size_t>(face.owner)] += flux;
    res[static_cast<std::size_t>(face.neighbor)] -= flux;
  }
}

Vec5 NS3DProblem::boundary_flux_sum(std::span<const Vec5> w,
                                    std::span<const StateGradient> grads) const {
  Vec5 sum = Vec5::Zero();
  for (Index f = 0; f < mesh_.num_faces(); ++f) {
    const TriFace& face = mesh_.face(f);
    if (face.is_boundary()) sum += boundary_flux(f, w, grads) * face.area;
  }
  return sum;
}

std::vector<Vec5> residual_ns3d(const NS3DProblem& problem, std::span<const Vec5> states,
                                std::span<const StateGradient> gradients) {
  std::vector<Vec5> res(states.size());
  problem.raw_residual(states, gradients, res);
  for (Index j = 0; j < problem.size(); ++j) {
    if (problem.pinned(j)) res[static_cast<std::size_t>(j)].setZero();
  }
  return res;
}

std::vector<Vec5> NS3DProblem::residual(std::span<const Vec5> w) const {
  return residual_ns3d(*this, w, gradients(w));
}

void NS3DProblem::residual(std::span<const Vector> w, std::span<Vector> res) const {
  const std::vector<Vec5> r = residual(w);
  std::copy(r.begin(), r.end(), res.begin());
}

bool NS3DProblem::admissible(std::span<const Vector> w) const {
  return std::all_of(w.begin(), w.end(),
                     [](const Vec5& s) { return s[0] > 0.0 && s[4] > 0.0 && s.allFinite(); });
}

std::vector<std::vector<Index>> NS3DProblem::coupling() const {
  std::vector<std::vector<Index>> c(static_cast<std::size_t>(mesh_.num_cells()));
  for (const TriFace& face : mesh_.faces()) {
    if (face.is_boundary()) continue;
    c[static_cast<std::size_t>(face.owner)].push_back(face.neighbor);
    c[static_cast<std::size_t>(face.neighbor)].push_back(face.owner);
  }
  return c;
}

Vec5 NS3DProblem::compact_flux(const Vec5& w_j, const Vec5& w_k, const Vec3& unit_normal,
                               double distance, double mu) const {
  // First-order Roe flux plus a thin-layer viscous flux with frozen mu.
  StateGradient grad = unit_normal * ((cfg_.alpha / distance) * (w_k - w_j)).transpose();
  const Vec3 v_f = 0.5 * (w_j.segment<3>(1) + w_k.segment<3>(1));
  return roe_flux(w_j, w_k, unit_normal, cfg_) + viscous_normal_flux(grad, v_f, mu, unit_normal, cfg_);
}

void NS3DProblem::jacobian(std::span<const Vector> w, double cfl, BlockSparseMatrix<5>& jac) const {
  const auto n = static_cast<std::size_t>(mesh_.num_cells());
  std::vector<double> spectral(n, 0.0);
  const double diffusivity = std::max(4.0 / 3.0, cfg_.gamma / cfg_.prandtl);

  for (Index f = 0; f < mesh_.num_faces(); ++f) {
    const TriFace& face = mesh_.face(f);
    const Index jo = face.owner;
    const auto j = static_cast<std::size_t>(jo);
    const Vec3& n_hat = face.unit_normal;
    const Vec3& x_j = mesh_.cell(jo).centroid;

    if (face.is_boundary()) {
      const double dist = 2.0 * std::abs((face.centroid - x_j).dot(n_hat));
      const double mu = sutherland_viscosity(w[j][4], cfg_);
      spectral[j] += face.area * (std::abs(w[j].segment<3>(1).dot(n_hat)) + std::sqrt(w[j][4]) +
                                  diffusivity * mu / (w[j][0] * dist));
      continue;
    }

    const Index ko = face.neighbor;
    const auto k = static_cast<std::size_t>(ko);
    const double dist = std::abs((mesh_.cell(ko).centroid - x_j).dot(n_hat));
    const double mu = sutherland_viscosity(0.5 * (w[j][4] + w[k][4]), cfg_);
    for (std::size_t c : {j, k}) {
      spectral[c] += face.area * (std::abs(w[c].segment<3>(1).dot(n_hat)) + std::sqrt(w[c][4]) +
                                  diffusivity * mu / (w[c][0] * dist));
    }

    // Forward differences of the compact flux in each state component.
    const Vec5 base = compact_flux(w[j], w[k], n_hat, dist, mu);
    Mat5 d_left;
    Mat5 d_right;
    for (int e = 0; e < 5; ++e) {
      const double h = 1e-7 * std::max(1.0, std::abs(w[j][e]));
      Vec5 wp = w[j];
      wp[e] += h;
      d_left.col(e) = (compact_flux(wp, w[k], n_hat, dist, mu) - base) / h;
      const double hk = 1e-7 * std::max(1.0, std::abs(w[k][e]));
      Vec5 wq = w[k];
      wq[e] += hk;
      d_right.col(e) = (compact_flux(w[j], wq, n_hat, dist, mu) - base) / hk;
    }
    d_left *= face.area;
    d_right *= face.area;
    if (!pinned(jo)) {
      jac.diagonal(jo) += d_left;
      jac.off_diagonal(jo, ko) += d_right;
    }
    if (!pinned(ko)) {
      jac.diagonal(ko) -= d_right;
      jac.off_diagonal(ko, jo) -= d_left;
    }
  }

  // Pseudo-time term (V / dt) dU/dw with dt = cfl V / sum(A lambda).
  for (Index j = 0; j < mesh_.num_cells(); ++j) {
    const auto s = static_cast<std::size_t>(j);
    if (pinned(j)) {
      jac.diagonal(j) = Mat5::Identity();
      continue;
    }
    jac.diagonal(j) += (spectral[s] / cfl) * conservative_jacobian(w[s], cfg_.gamma);
  }
}

NS3DSolution solve_ns3d(const NS3DProblem& problem, const SolverConfig& cfg,
                        std::vector<Vec5> initial) {
  if (initial.empty()) initial = problem.initial_guess();
  if (static_cast<Index>(initial.size()) != problem.size()) {
    throw InvalidArgument("solve_ns3d: initial guess has wrong size");
  }
  problem.apply_boundary_closure(initial);
  auto result = solve_defect_correction<5>(problem, std::move(initial), cfg);
  return {std::move(result.solution), std::move(result.history), result.iterations};
}

}  // namespace fvvisc
