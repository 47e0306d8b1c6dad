#include "fvvisc_cli/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "fvvisc/diffusion1d.hpp"
#include "fvvisc/mesh.hpp"
#include "fvvisc/ns3d.hpp"
#include "fvvisc/physics.hpp"
#include "fvvisc/recon.hpp"

namespace fvvisc::cli {

namespace {

std::string describe(const char* label, double value, double tol) {
  std::ostringstream s;
  s.precision(3);
  s << label << " = " << std::scientific << value << " (tol " << tol << ")";
  return s.str();
}

CheckResult bounded(std::string name, const char* label, double value, double tol) {
  return {std::move(name), value <= tol, describe(label, value, tol)};
}

double max_abs(std::span<const Vec5> a) {
  double m = 0.0;
  for (const Vec5& v : a) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

Vec5 sample_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  std::uniform_real_distribution<double> vel(-0.8, 0.8);
  Vec5 w;
  w << pos(rng), vel(rng), vel(rng), vel(rng), pos(rng);
  return w;
}

CheckResult lsq_exactness(const Mesh3D& mesh) {
  const Vec3 a(0.7, -1.3, 2.1);
  std::vector<double> field;
  for (const TetCell& c : mesh.cells()) field.push_back(3.0 + a.dot(c.centroid));
  const auto grads = lsq_gradient_3d(mesh, field);
  double err = 0.0;
  for (const Vec3& g : grads) err = std::max(err, (g - a).cwiseAbs().maxCoeff());
  return bounded("lsq gradient linear exactness", "max |grad - a|", err, 1e-12);
}

CheckResult roe_consistency() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  const FlowConfig cfg;
  double err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec5 w = sample_state(rng);
    const Vec3 n = Vec3(gauss(rng), gauss(rng), gauss(rng)).normalized();
    const Vec5 f = inviscid_normal_flux(w, n, cfg.gamma);
    const Vec5 diff = roe_flux(w, w, n, cfg) - f;
    err = std::max(err, diff.cwiseAbs().maxCoeff() / std::max(1.0, f.cwiseAbs().maxCoeff()));
  }
  return bounded("roe flux consistency", "max |F(w,w) - f(w)|", err, 1e-13);
}

CheckResult free_stream(const Mesh3D& mesh, const ReconstructionStrategy& strategy) {
  NS3DProblem problem(mesh, strategy);
  problem.set_forcing(std::vector<Vec5>(static_cast<std::size_t>(problem.size()), Vec5::Zero()));
  Vec5 w;
  w << 1.1, 0.3, -0.2, 0.15, 0.9;
  const std::vector<Vec5> states(static_cast<std::size_t>(problem.size()), w);
  const auto grads = problem.gradients(states);
  std::vector<Vec5> res(states.size());
  problem.raw_residual(states, grads, res);
  return bounded("free-stream preservation (" + strategy.name() + ")", "max |Res|", max_abs(res),
                 1e-13);
}

CheckResult closure(const Mesh3D& mesh, double length) {
  double defect = 0.0;
  for (Index j = 0; j < mesh.num_cells(); ++j) defect = std::max(defect, mesh.closure_defect(j));
  const double partition = std::abs(mesh.total_volume() - length * length * length);
  CheckResult r = bounded("geometric closure and volume partition", "max closure defect", defect,
                          1e-12);
  r.passed = r.passed && partition <= 1e-12;
  r.detail += "; " + describe("|sum V - L^3|", partition, 1e-12);
  return r;
}

CheckResult weighted_half_is_arithmetic(const Mesh3D& mesh, const Grid1D& grid) {
  std::vector<Vec5> states;
  for (const TetCell& c : mesh.cells()) states.push_back(manufactured_primitive(c.centroid));
  const NS3DProblem a(mesh, ReconstructionStrategy::arithmetic());
  const NS3DProblem b(mesh, ReconstructionStrategy::weighted(0.5));
  const auto ra = a.residual(states);
  const auto rb = b.residual(states);
  double diff = 0.0;
  for (std::size_t j = 0; j < ra.size(); ++j) diff = std::max(diff, (ra[j] - rb[j]).cwiseAbs().maxCoeff());

  std::vector<double> u;
  for (double x : grid.centers()) u.push_back(diffusion_exact(x) * (1.0 + 0.1 * std::sin(7.0 * x)));
  const auto r1 = residual_1d(Diffusion1DProblem(grid, ReconstructionStrategy::arithmetic()), u);
  const auto r2 = residual_1d(Diffusion1DProblem(grid, ReconstructionStrategy::weighted(0.5)), u);
  for (std::size_t j = 0; j < r1.size(); ++j) diff = std::max(diff, std::abs(r1[j] - r2[j]));
  return {"weighted(0.5) equals arithmetic", diff == 0.0, describe("max |Res_a - Res_w|", diff, 0.0)};
}

CheckResult equal_distance_idw(const Grid1D& uniform) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> q(-5.0, 5.0);
  std::uniform_real_distribution<double> d(1e-3, 10.0);
  const auto idw = ReconstructionStrategy::inverse_distance();
  const auto avg = ReconstructionStrategy::arithmetic();
  double diff = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double qj = q(rng), qk = q(rng), dist = d(rng);
    diff = std::max(diff, std::abs(face_scalar(idw, qj, qk, 0.0, 0.0, dist, dist) -
                                   face_scalar(avg, qj, qk, 0.0, 0.0, dist, dist)));
  }
  std::vector<double> u;
  for (double x : uniform.centers()) u.push_back(1.0 + x * x);
  const auto r1 = residual_1d(Diffusion1DProblem(uniform, idw), u);
  const auto r2 = residual_1d(Diffusion1DProblem(uniform, avg), u);
  for (std::size_t j = 0; j < r1.size(); ++j) diff = std::max(diff, std::abs(r1[j] - r2[j]));
  return bounded("inverse-distance with equal distances equals arithmetic", "max difference", diff,
                 1e-14);
}

CheckResult arithmetic_bounded() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> q(-10.0, 10.0);
  std::uniform_real_distribution<double> d(1e-3, 1.0);
  const auto avg = ReconstructionStrategy::arithmetic();
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double qj = q(rng), qk = q(rng);
    const double f = face_scalar(avg, qj, qk, q(rng), q(rng), d(rng), d(rng));
    if (f < std::min(qj, qk) || f > std::max(qj, qk)) ++violations;
    const double pj = std::abs(qj) + 1e-300, pk = std::abs(qk) + 1e-300;
    if (!(face_scalar(avg, pj, pk, -1.0, -1.0, d(rng), d(rng)) > 0.0)) ++violations;
  }
  return {"arithmetic boundedness and positivity", violations == 0,
          std::to_string(violations) + " violations in 1000 samples"};
}

CheckResult sutherland_reference() {
  const FlowConfig cfg;
  const double mu = sutherland_viscosity(1.0, cfg);
  const double expect = cfg.mach / cfg.reynolds;
  std::ostringstream s;
  s.precision(17);
  s << "mu(1) = " << mu << ", M/Re = " << expect;
  return {"sutherland mu(1) = M/Re", mu == expect, s.str()};
}

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& check) {
  try {
    return check();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<CheckResult> run_property_checks() {
  const double length = 0.5;
  const Mesh3D mesh = generate_tet_mesh(5, 0.3, 3, length);
  const Grid1D irregular = generate_grid_1d(23, false, 0.3, 5);
  const Grid1D uniform = generate_grid_1d(17, true);
  std::vector<CheckResult> out;
  out.push_back(guarded("lsq gradient linear exactness", [&] { return lsq_exactness(mesh); }));
  out.push_back(guarded("roe flux consistency", roe_consistency));
  for (const auto& s : {ReconstructionStrategy::lr_average(), ReconstructionStrategy::arithmetic(),
                        ReconstructionStrategy::inverse_distance()}) {
    out.push_back(guarded("free-stream preservation", [&] { return free_stream(mesh, s); }));
  }
  out.push_back(guarded("geometric closure", [&] { return closure(mesh, length); }));
  out.push_back(guarded("weighted(0.5) equals arithmetic",
                        [&] { return weighted_half_is_arithmetic(mesh, irregular); }));
  out.push_back(guarded("inverse-distance equal distances",
                        [&] { return equal_distance_idw(uniform); }));
  out.push_back(guarded("arithmetic boundedness", arithmetic_bounded));
  out.push_back(guarded("sutherland reference", sutherland_reference));
  return out;
}

}  // namespace fvvisc::cli
