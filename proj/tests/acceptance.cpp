// Acceptance runner: one PASS/FAIL line per criterion. With no argument every
// criterion runs; otherwise the arguments name criteria (c1 .. c6).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fvvisc/mesh.hpp"
#include "fvvisc/ns3d.hpp"
#include "fvvisc/physics.hpp"
#include "fvvisc/recon.hpp"
#include "fvvisc/verify.hpp"
#include "fvvisc_cli/checks.hpp"
#include "fvvisc_cli/config.hpp"

using namespace fvvisc;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& note) {
    passed = passed && ok;
    notes.push_back(std::string(ok ? "ok: " : "FAILED: ") + note);
  }
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double global_order(const ConvergenceRecord& rec, std::size_t var = 0) {
  try {
    return observed_order(rec, var).global;
  } catch (const Error&) {
    return std::nan("");
  }
}

std::string row_summary(const ConvergenceRecord& rec) {
  std::string out;
  for (const auto& r : rec.rows) {
    if (r.failed) out += " " + r.grid_label + ":failed";
  }
  return out;
}

void check_band(Outcome& o, const ConvergenceRecord& rec, double lo, double hi) {
  const double p = global_order(rec);
  o.require(p >= lo && p <= hi, rec.strategy + " order " + fmt(p) + " in [" + fmt(lo) + ", " +
                                    fmt(hi) + "]" + row_summary(rec));
}

// 1D irregular grids, n = 7 .. 63.
Outcome criterion1() {
  const cli::StudyConfig cfg = cli::default_config("study-1d");
  Study1DOptions o;
  o.grids = cfg.grids;
  o.regular = false;
  o.perturbation = cfg.perturbation;
  o.seed = cfg.seed;
  o.strategies = cfg.strategies;
  o.solver = cfg.solver;
  o.jobs = jobs();
  const auto records = run_study_1d(o);
  Outcome out;
  for (std::size_t s = 0; s < records.size(); ++s) {
    const auto kind = o.strategies[s].kind;
    const bool one_sided = kind == ReconstructionStrategy::Kind::OneSidedLeft ||
                           kind == ReconstructionStrategy::Kind::OneSidedRight;
    check_band(out, records[s], one_sided ? 0.8 : 1.8, one_sided ? 1.2 : 2.2);
  }
  return out;
}

// 1D regular grids, omega sweep.
Outcome criterion2() {
  const cli::StudyConfig cfg = cli::default_config("study-1d-omega");
  Study1DOptions o;
  o.grids = cfg.grids;
  o.regular = true;
  o.solver = cfg.solver;
  o.jobs = jobs();
  for (double w : cfg.omegas) o.strategies.push_back(ReconstructionStrategy::weighted(w));
  const auto records = run_study_1d(o);
  Outcome out;
  for (std::size_t s = 0; s < records.size(); ++s) {
    const bool half = o.strategies[s].omega == 0.5;
    check_band(out, records[s], half ? 1.9 : 0.8, half ? 2.1 : 1.2);
  }
  return out;
}

// 3D manufactured solution on n = 7, 11, 15.
Outcome criterion3() {
  const cli::StudyConfig cfg = cli::default_config("study-3d");
  Study3DOptions o;
  o.grids = {7, 11, 15};
  o.perturbation = cfg.perturbation;
  o.seed = cfg.seed;
  o.strategies = cfg.strategies;
  o.flow = cfg.flow;
  o.solver = cfg.solver;
  o.jobs = jobs();
  const auto records = run_study_3d(o);
  Outcome out;
  std::vector<double> finest;
  for (const auto& rec : records) {
    check_band(out, rec, 1.7, 2.3);
    const auto ok = rec.successful_rows();
    if (!ok.empty() && ok.back()->cells == 6 * 15 * 15 * 15) finest.push_back(ok.back()->l1_error[0]);
  }
  if (finest.size() == records.size()) {
    const auto [lo, hi] = std::minmax_element(finest.begin(), finest.end());
    const double spread = (*hi - *lo) / *lo;
    out.require(spread <= 0.05, "finest density errors within " + fmt(100.0 * spread, 3) +
                                    "% of each other (limit 5%)");
  } else {
    out.require(false, "finest grid failed for some strategy");
  }
  return out;
}

// Independent statement of the manufactured state and its gradient.
struct Mms {
  static constexpr double kBase[5] = {1.0, 0.3, 0.2, 0.1, 1.0};
  static double psi(const Vec3& x) { return 0.1 * std::exp(0.5 * (x.x() + x.y() + x.z())); }
  static Vec5 state(const Vec3& x) {
    Vec5 w;
    for (int v = 0; v < 5; ++v) w[v] = kBase[v] + psi(x);
    return w;
  }
  static StateGradient gradient(const Vec3& x) {
    return StateGradient::Constant(0.5 * psi(x));
  }
  static Vec5 flux(const Vec3& x, const Vec3& n, const FlowConfig& cfg) {
    const Vec5 w = state(x);
    const double mu = sutherland_viscosity(w[4], cfg);
    return inviscid_normal_flux(w, n, cfg.gamma) +
           viscous_normal_flux(gradient(x), Vec3(w.segment<3>(1)), mu, n, cfg);
  }
};

// Analytic forcing against a fourth-order central difference of the flux.
Outcome criterion4() {
  const FlowConfig cfg;
  const double h = 1e-4;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(0.0, 0.5);
  double worst = 0.0;
  double worst_state = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 x(coord(rng), coord(rng), coord(rng));
    Vec5 div = Vec5::Zero();
    for (int d = 0; d < 3; ++d) {
      const Vec3 e = Vec3::Unit(d);
      auto f = [&](double s) { return Mms::flux(x + s * e, e, cfg); };
      div += (-f(2 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2 * h)) / (12.0 * h);
    }
    const Vec5 analytic = mms_forcing(x, cfg);
    worst = std::max(worst, (analytic - div).cwiseAbs().maxCoeff() / div.cwiseAbs().maxCoeff());
    worst_state = std::max(worst_state, (manufactured_primitive(x) - Mms::state(x)).cwiseAbs().maxCoeff());
  }
  Outcome out;
  out.require(worst_state <= 1e-15, "manufactured state matches closed form (" + fmt(worst_state) + ")");
  out.require(worst <= 1e-7, "max relative forcing mismatch " + fmt(worst) + " <= 1e-7");
  return out;
}

Outcome criterion5() {
  Outcome out;
  for (const auto& r : cli::run_property_checks()) out.require(r.passed, r.name + ": " + r.detail);
  return out;
}

double smooth_temperature(const Vec3& x) {
  return 1.0 + 0.3 * std::sin(4.0 * x.x() + 1.0) * std::cos(3.0 * x.y()) + 0.2 * std::exp(2.0 * x.z());
}

// Face-value accuracy on perturbed tets, and linear exactness on uniform grids.
Outcome criterion6() {
  Outcome out;
  const std::vector<Index> sizes{4, 6, 8, 12, 16, 24, 32};
  std::vector<double> h, err_avg, err_lr;
  for (Index n : sizes) {
    const Mesh3D mesh = generate_tet_mesh(n, 0.3, 1);
    std::vector<double> t;
    for (const TetCell& c : mesh.cells()) t.push_back(smooth_temperature(c.centroid));
    const auto grad = lsq_gradient_3d(mesh, t);
    double sa = 0.0, sl = 0.0;
    int count = 0;
    for (const TriFace& f : mesh.faces()) {
      if (f.is_boundary()) continue;
      const auto j = static_cast<std::size_t>(f.owner);
      const auto k = static_cast<std::size_t>(f.neighbor);
      const Vec3& xj = mesh.cell(f.owner).centroid;
      const Vec3& xk = mesh.cell(f.neighbor).centroid;
      const double tl = t[j] + grad[j].dot(f.centroid - xj);
      const double tr = t[k] + grad[k].dot(f.centroid - xk);
      const double exact = smooth_temperature(f.centroid);
      sa += std::abs(face_scalar(ReconstructionStrategy::arithmetic(), t[j], t[k], tl, tr, xj, xk,
                                 f.centroid) - exact);
      sl += std::abs(face_scalar(ReconstructionStrategy::lr_average(), t[j], t[k], tl, tr, xj, xk,
                                 f.centroid) - exact);
      ++count;
    }
    h.push_back(effective_spacing(mesh.num_cells(), 3));
    err_avg.push_back(sa / count);
    err_lr.push_back(sl / count);
  }
  const OrderEstimate est_avg = observed_order(h, err_avg);
  const OrderEstimate est_lr = observed_order(h, err_lr);
  const double p_avg = est_avg.global;
  const double p_lr = est_lr.global;
  std::string pairs = "pairwise slopes (arithmetic/lr-average):";
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    pairs += " n=" + std::to_string(sizes[i]) + " " + fmt(est_avg.pairwise[i], 3) + "/" + fmt(est_lr.pairwise[i], 3);
  }
  out.notes.push_back(pairs);
  out.require(p_avg >= 1.0, "arithmetic face-value slope " + fmt(p_avg) + " >= 1");
  out.require(p_lr >= 2.0, "lr-average face-value slope " + fmt(p_lr) + " >= 2");

  const Grid1D grid = generate_grid_1d(16, true);
  double exact_err = 0.0, one_sided_err = 0.0;
  for (Index j = 0; j + 1 < grid.num_cells(); ++j) {
    const double qj = 3.0 * grid.center(j) - 0.7;
    const double qk = 3.0 * grid.center(j + 1) - 0.7;
    const double xf = grid.face_between(j);
    const double dj = xf - grid.center(j);
    const double dk = grid.center(j + 1) - xf;
    const double target = 3.0 * xf - 0.7;
    exact_err = std::max(exact_err, std::abs(face_scalar(ReconstructionStrategy::arithmetic(), qj,
                                                         qk, qj, qk, dj, dk) - target));
    one_sided_err = std::max(one_sided_err, std::abs(face_scalar(ReconstructionStrategy::one_sided_left(),
                                                                 qj, qk, qj, qk, dj, dk) - target));
  }
  out.require(exact_err <= 1e-13, "uniform-grid arithmetic linear error " + fmt(exact_err) + " <= 1e-13");
  out.require(one_sided_err > 0.0, "uniform-grid one-sided linear error " + fmt(one_sided_err) + " > 0");
  return out;
}

const std::map<std::string, std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::map<std::string, std::pair<std::string, std::function<Outcome()>>> table{
      {"c1", {"1D irregular-grid orders", criterion1}},
      {"c2", {"1D regular-grid omega study", criterion2}},
      {"c3", {"3D manufactured-solution orders", criterion3}},
      {"c4", {"forcing against FD divergence", criterion4}},
      {"c5", {"property suite", criterion5}},
      {"c6", {"face-value accuracy requirements", criterion6}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> selected(argv + 1, argv + argc);
  if (selected.empty()) {
    for (const auto& [key, value] : criteria()) selected.push_back(key);
  }
  bool all_passed = true;
  for (const std::string& key : selected) {
    const auto it = criteria().find(key);
    if (it == criteria().end()) {
      std::cerr << "unknown criterion '" << key << "'\n";
      return 2;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o.require(false, std::string("threw: ") + e.what());
    }
    for (const auto& note : o.notes) std::cout << "    " << note << '\n';
    std::cout << (o.passed ? "PASS " : "FAIL ") << key << ": " << it->second.first << std::endl;
    all_passed = all_passed && o.passed;
  }
  return all_passed ? 0 : 1;
}
