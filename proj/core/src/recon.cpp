#include "fvvisc/recon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "fvvisc/errors.hpp"

namespace fvvisc {

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kValidStrategyNames =
    "lr-average, arithmetic, inverse-distance, one-sided-left, one-sided-right, weighted:<omega>";

}  // namespace

ReconstructionStrategy ReconstructionStrategy::weighted(double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) {
    throw InvalidArgument("weighted strategy: omega must lie in [0, 1]");
  }
  return {Kind::Weighted, omega};
}

ReconstructionStrategy ReconstructionStrategy::parse(std::string_view name) {
  if (name == "lr-average") return lr_average();
  if (name == "arithmetic") return arithmetic();
  if (name == "inverse-distance") return inverse_distance();
  if (name == "one-sided-left") return one_sided_left();
  if (name == "one-sided-right") return one_sided_right();
  constexpr std::string_view prefix = "weighted:";
  if (name.starts_with(prefix)) {
    const std::string_view num = name.substr(prefix.size());
    double omega = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), omega);
    if (ec == std::errc() && ptr == num.data() + num.size() && !num.empty()) {
      return weighted(omega);
    }
  }
  throw InvalidArgument("unknown reconstruction strategy '" + std::string(name) +
                        "'; valid names: " + std::string(kValidStrategyNames));
}

std::string ReconstructionStrategy::name() const {
  switch (kind) {
    case Kind::LRAverage: return "lr-average";
    case Kind::Arithmetic: return "arithmetic";
    case Kind::InverseDistance: return "inverse-distance";
    case Kind::OneSidedLeft: return "one-sided-left";
    case Kind::OneSidedRight: return "one-sided-right";
    case Kind::Weighted: {
      std::ostringstream os;
      os.precision(std::numeric_limits<double>::max_digits10);
      os << "weighted:" << omega;
      // Prefer the short form when it round-trips (0.5 rather than 0.50000000000000000).
      std::ostringstream shortform;
      shortform << "weighted:" << omega;
      if (parse(shortform.str()).omega == omega) return shortform.str();
      return os.str();
    }
  }
  return "unknown";
}

FaceWeights face_weights(const ReconstructionStrategy& strategy, double dist_j, double dist_k) {
  using Kind = ReconstructionStrategy::Kind;
  switch (strategy.kind) {
    case Kind::LRAverage: return {0.0, 0.0, 0.5, 0.5};
    case Kind::Arithmetic: return {0.5, 0.5, 0.0, 0.0};
    case Kind::OneSidedLeft: return {1.0, 0.0, 0.0, 0.0};
    case Kind::OneSidedRight: return {0.0, 1.0, 0.0, 0.0};
    case Kind::Weighted: return {strategy.omega, 1.0 - strategy.omega, 0.0, 0.0};
    case Kind::InverseDistance: {
      if (!(dist_j > 0.0) || !(dist_k > 0.0)) {
        throw DegenerateGeometry("inverse-distance face value: zero distance from face to cell");
      }
      const double inv_j = 1.0 / dist_j;
      const double inv_k = 1.0 / dist_k;
      const double sum = inv_j + inv_k;
      return {inv_j / sum, inv_k / sum, 0.0, 0.0};
    }
  }
  return {};
}

double face_scalar(const ReconstructionStrategy& strategy, double q_j, double q_k, double q_left,
                   double q_right, double dist_j, double dist_k) {
  const FaceWeights w = face_weights(strategy, dist_j, dist_k);
  using Kind = ReconstructionStrategy::Kind;
  switch (strategy.kind) {
    case Kind::LRAverage: return 0.5 * (q_left + q_right);
    case Kind::Arithmetic: return 0.5 * (q_j + q_k);
    case Kind::OneSidedLeft: return q_j;
    case Kind::OneSidedRight: return q_k;
    default: return w.cell_j * q_j + w.cell_k * q_k;
  }
}

double face_scalar(const ReconstructionStrategy& strategy, double q_j, double q_k, double q_left,
                   double q_right, const Vec3& x_j, const Vec3& x_k, const Vec3& x_f) {
  return face_scalar(strategy, q_j, q_k, q_left, q_right, (x_f - x_j).norm(), (x_f - x_k).norm());
}

Vec3 face_vector(const ReconstructionStrategy& strategy, const Vec3& q_j, const Vec3& q_k,
                 const Vec3& q_left, const Vec3& q_right, double dist_j, double dist_k) {
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    out[c] = face_scalar(strategy, q_j[c], q_k[c], q_left[c], q_right[c], dist_j, dist_k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Least-squares gradients
// ---------------------------------------------------------------------------

namespace {

// Ratio of smallest to largest eigenvalue of the normal matrix below which a
// stencil is treated as rank deficient.
constexpr double kRankTolerance = 1e-10;

bool full_rank(const Mat3& normal) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(normal, Eigen::EigenvaluesOnly);
  const Vec3 ev = eig.eigenvalues();
  return ev.maxCoeff() > 0.0 && ev.minCoeff() > kRankTolerance * ev.maxCoeff();
}

Mat3 normal_matrix(const Mesh3D& mesh, Index j, std::span<const Index> stencil) {
  Mat3 a = Mat3::Zero();
  const Vec3& xj = mesh.cell(j).centroid;
  for (Index k : stencil) {
    const Vec3 d = mesh.cell(k).centroid - xj;
    a += d * d.transpose();
  }
  return a;
}

}  // namespace

LsqGradient3D::LsqGradient3D(const Mesh3D& mesh) {
  const Index n = mesh.num_cells();
  offsets_.reserve(static_cast<std::size_t>(n) + 1);
  offsets_.push_back(0);
  widened_.assign(static_cast<std::size_t>(n), 0);
  std::vector<Index> stencil;
  for (Index j = 0; j < n; ++j) {
    stencil.clear();
    for (Index f : mesh.cell_faces(j)) {
      const Index k = mesh.across(f, j);
      if (k != kNoNeighbor) stencil.push_back(k);
    }
    Mat3 a = normal_matrix(mesh, j, stencil);
    if (!full_rank(a)) {
      const std::vector<Index> first(stencil);
      for (Index k : first) {
        for (Index f : mesh.cell_faces(k)) {
          const Index m = mesh.across(f, k);
          if (m == kNoNeighbor || m == j) continue;
          if (std::find(stencil.begin(), stencil.end(), m) == stencil.end()) stencil.push_back(m);
        }
      }
      a = normal_matrix(mesh, j, stencil);
      widened_[static_cast<std::size_t>(j)] = 1;
      if (!full_rank(a)) {
        throw SingularStencil(j, "least-squares stencil of cell " + std::to_string(j) +
                                     " is rank deficient");
      }
    }
    const Mat3 inv = a.inverse();
    const Vec3& xj = mesh.cell(j).centroid;
    for (Index k : stencil) {
      cells_.push_back(k);
      coefficients_.push_back(inv * (mesh.cell(k).centroid - xj));
    }
    offsets_.push_back(static_cast<Index>(cells_.size()));
  }
}

std::span<const Index> LsqGradient3D::stencil(Index j) const {
  const auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(j)]);
  const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(j) + 1]);
  return std::span<const Index>(cells_).subspan(b, e - b);
}

Vec3 LsqGradient3D::gradient(Index j, std::span<const double> field) const {
  const auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(j)]);
  const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(j) + 1]);
  const double qj = field[static_cast<std::size_t>(j)];
  Vec3 g = Vec3::Zero();
  for (std::size_t s = b; s < e; ++s) {
    g += coefficients_[s] * (field[static_cast<std::size_t>(cells_[s])] - qj);
  }
  return g;
}

std::vector<Vec3> LsqGradient3D::compute(std::span<const double> field) const {
  if (static_cast<Index>(field.size()) != num_cells()) {
    throw InvalidArgument("lsq gradient: field size does not match cell count");
  }
  std::vector<Vec3> out(field.size());
  for (Index j = 0; j < num_cells(); ++j) out[static_cast<std::size_t>(j)] = gradient(j, field);
  return out;
}

void LsqGradient3D::compute(std::span<const Vec5> states, std::span<StateGradient> gradients) const {
  if (static_cast<Index>(states.size()) != num_cells() || gradients.size() != states.size()) {
    throw InvalidArgument("lsq gradient: state/gradient size does not match cell count");
  }
  for (std::size_t j = 0; j < states.size(); ++j) {
    const auto b = static_cast<std::size_t>(offsets_[j]);
    const auto e = static_cast<std::size_t>(offsets_[j + 1]);
    StateGradient g = StateGradient::Zero();
    for (std::size_t s = b; s < e; ++s) {
      g.noalias() += coefficients_[s] *
                     (states[static_cast<std::size_t>(cells_[s])] - states[j]).transpose();
    }
    gradients[j] = g;
  }
}

std::vector<StateGradient> LsqGradient3D::compute(std::span<const Vec5> states) const {
  std::vector<StateGradient> out(states.size());
  compute(states, out);
  return out;
}

std::vector<Vec3> lsq_gradient_3d(const Mesh3D& mesh, std::span<const double> field) {
  return LsqGradient3D(mesh).compute(field);
}

std::vector<double> gradient_1d(const Grid1D& grid, std::span<const double> u) {
  const Index n = grid.num_cells();
  if (n < 3) throw InvalidArgument("gradient_1d: need at least 3 cells");
  if (static_cast<Index>(u.size()) != n) {
    throw InvalidArgument("gradient_1d: field size does not match cell count");
  }
  const auto x = grid.centers();
  const auto last = static_cast<std::size_t>(n) - 1;
  std::vector<double> g(u.size());
  g[0] = (u[1] - u[0]) / (x[1] - x[0]);
  for (std::size_t j = 1; j < last; ++j) g[j] = (u[j + 1] - u[j - 1]) / (x[j + 1] - x[j - 1]);
  g[last] = (u[last] - u[last - 1]) / (x[last] - x[last - 1]);
  return g;
}

// ---------------------------------------------------------------------------
// Face reconstruction and gradients
// ---------------------------------------------------------------------------

FaceStates reconstruct_lr(const Vec5& w_j, const StateGradient& grad_j, const Vec3& x_j,
                          const Vec5& w_k, const StateGradient& grad_k, const Vec3& x_k,
                          const Vec3& x_c) {
  return {w_j + grad_j.transpose() * (x_c - x_j), w_k + grad_k.transpose() * (x_c - x_k)};
}

std::pair<double, double> reconstruct_lr_1d(double u_j, double grad_j, double x_j, double u_k,
                                            double grad_k, double x_k, double x_f) {
  return {u_j + grad_j * (x_f - x_j), u_k + grad_k * (x_f - x_k)};
}

namespace {

double normal_distance(const Vec3& x_j, const Vec3& x_k, const Vec3& unit_normal) {
  const Vec3 d = x_k - x_j;
  const double dn = std::abs(d.dot(unit_normal));
  if (!(dn > 1e-14 * d.norm())) {
    throw DegenerateGeometry("alpha-damped face gradient: cell centroids do not straddle the face");
  }
  return dn;
}

}  // namespace

Vec3 alpha_damped_face_gradient(const Vec3& grad_j, const Vec3& grad_k, double q_left,
                                double q_right, const Vec3& x_j, const Vec3& x_k,
                                const Vec3& unit_normal, double alpha) {
  const double dn = normal_distance(x_j, x_k, unit_normal);
  return 0.5 * (grad_j + grad_k) + (alpha / dn) * (q_right - q_left) * unit_normal;
}

StateGradient alpha_damped_face_gradient(const StateGradient& grad_j, const StateGradient& grad_k,
                                         const Vec5& w_left, const Vec5& w_right, const Vec3& x_j,
                                         const Vec3& x_k, const Vec3& unit_normal, double alpha) {
  const double dn = normal_distance(x_j, x_k, unit_normal);
  return 0.5 * (grad_j + grad_k) + (alpha / dn) * unit_normal * (w_right - w_left).transpose();
}

double alpha_damped_face_derivative_1d(double grad_j, double grad_k, double u_left, double u_right,
                                       double x_j, double x_k, double alpha) {
  const double dx = x_k - x_j;
  if (dx == 0.0) throw DegenerateGeometry("1D face derivative: coincident cell centers");
  return 0.5 * (grad_j + grad_k) + alpha / (2.0 * dx) * (u_right - u_left);
}

}  // namespace fvvisc
