#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fvvisc/mesh.hpp"
#include "fvvisc/types.hpp"

namespace fvvisc {

/// Damping coefficient of the alpha-damped face gradient.
inline constexpr double kAlphaDamping = 4.0 / 3.0;

// ---------------------------------------------------------------------------
// Face-value strategies
// ---------------------------------------------------------------------------

/// How a face value (temperature, velocity, or 1D viscosity) is formed from
/// the two adjacent cells.
struct ReconstructionStrategy {
  enum class Kind {
    LRAverage,        // (q_L + q_R) / 2 from the linear reconstructions
    Arithmetic,       // (q_j + q_k) / 2
    InverseDistance,  // 1/|x_f - x| weighted cell values
    OneSidedLeft,     // q_j
    OneSidedRight,    // q_k
    Weighted,         // omega q_j + (1 - omega) q_k
  };

  Kind kind = Kind::Arithmetic;
  double omega = 0.5;  // used by Weighted only

  static ReconstructionStrategy lr_average() { return {Kind::LRAverage, 0.5}; }
  static ReconstructionStrategy arithmetic() { return {Kind::Arithmetic, 0.5}; }
  static ReconstructionStrategy inverse_distance() { return {Kind::InverseDistance, 0.5}; }
  static ReconstructionStrategy one_sided_left() { return {Kind::OneSidedLeft, 0.5}; }
  static ReconstructionStrategy one_sided_right() { return {Kind::OneSidedRight, 0.5}; }
  /// omega must lie in [0, 1].
  static ReconstructionStrategy weighted(double omega);

  /// Parses "lr-average", "arithmetic", "inverse-distance", "one-sided-left",
  /// "one-sided-right" or "weighted:<omega>". Throws InvalidArgument listing
  /// the valid names otherwise.
  static ReconstructionStrategy parse(std::string_view name);

  /// Inverse of parse(); weighted omegas print with round-trip precision.
  std::string name() const;

  /// True when the face value depends on the linear reconstructions q_L, q_R.
  bool uses_reconstruction() const noexcept { return kind == Kind::LRAverage; }

  friend bool operator==(const ReconstructionStrategy&, const ReconstructionStrategy&) = default;
};

/// Weights applied to (q_j, q_k, q_L, q_R); they always sum to one.
struct FaceWeights {
  double cell_j = 0.0;
  double cell_k = 0.0;
  double left = 0.0;
  double right = 0.0;
};

/// dist_j = |x_f - x_j| and dist_k = |x_f - x_k| are only read by
/// InverseDistance, which throws DegenerateGeometry if either is zero.
FaceWeights face_weights(const ReconstructionStrategy& strategy, double dist_j, double dist_k);

double face_scalar(const ReconstructionStrategy& strategy, double q_j, double q_k, double q_left,
                   double q_right, double dist_j, double dist_k);

double face_scalar(const ReconstructionStrategy& strategy, double q_j, double q_k, double q_left,
                   double q_right, const Vec3& x_j, const Vec3& x_k, const Vec3& x_f);

/// Componentwise face vector (used for the face velocity).
Vec3 face_vector(const ReconstructionStrategy& strategy, const Vec3& q_j, const Vec3& q_k,
                 const Vec3& q_left, const Vec3& q_right, double dist_j, double dist_k);

// ---------------------------------------------------------------------------
// Cell gradients
// ---------------------------------------------------------------------------

/// Unweighted linear least-squares gradients on a tet mesh.
///
/// The stencil of a cell is its face neighbors. When those directions do not
/// span 3D (cells in cube corners), the stencil is widened with neighbors of
/// neighbors. Pseudo-inverse weights are precomputed, so each gradient is
/// sum_k c_jk (q_k - q_j).
class LsqGradient3D {
 public:
  explicit LsqGradient3D(const Mesh3D& mesh);

  Index num_cells() const noexcept { return static_cast<Index>(offsets_.size()) - 1; }

  std::span<const Index> stencil(Index j) const;
  bool widened(Index j) const { return widened_[static_cast<std::size_t>(j)] != 0; }

  Vec3 gradient(Index j, std::span<const double> field) const;
  std::vector<Vec3> compute(std::span<const double> field) const;

  void compute(std::span<const Vec5> states, std::span<StateGradient> gradients) const;
  std::vector<StateGradient> compute(std::span<const Vec5> states) const;

 private:
  std::vector<Index> offsets_;
  std::vector<Index> cells_;
  std::vector<Vec3> coefficients_;
  std::vector<std::uint8_t> widened_;
};

/// Convenience wrapper constructing the stencils once.
std::vector<Vec3> lsq_gradient_3d(const Mesh3D& mesh, std::span<const double> field);

/// Cell derivatives on a 1D grid: central difference over the neighboring
/// cell centers in the interior, two-point one-sided difference in the end
/// cells.
std::vector<double> gradient_1d(const Grid1D& grid, std::span<const double> u);

// ---------------------------------------------------------------------------
// Face reconstruction and face gradients
// ---------------------------------------------------------------------------

struct FaceStates {
  Vec5 left;
  Vec5 right;
};

/// Linear extrapolation of both cell states to the face centroid x_c.
FaceStates reconstruct_lr(const Vec5& w_j, const StateGradient& grad_j, const Vec3& x_j,
                          const Vec5& w_k, const StateGradient& grad_k, const Vec3& x_k,
                          const Vec3& x_c);

/// Scalar 1D version; returns (u_L, u_R).
std::pair<double, double> reconstruct_lr_1d(double u_j, double grad_j, double x_j, double u_k,
                                            double grad_k, double x_k, double x_f);

/// 0.5 (g_j + g_k) + alpha / |(x_k - x_j) . n| (q_R - q_L) n.
/// Throws DegenerateGeometry when (x_k - x_j) . n vanishes.
Vec3 alpha_damped_face_gradient(const Vec3& grad_j, const Vec3& grad_k, double q_left,
                                double q_right, const Vec3& x_j, const Vec3& x_k,
                                const Vec3& unit_normal, double alpha = kAlphaDamping);

StateGradient alpha_damped_face_gradient(const StateGradient& grad_j, const StateGradient& grad_k,
                                         const Vec5& w_left, const Vec5& w_right, const Vec3& x_j,
                                         const Vec3& x_k, const Vec3& unit_normal,
                                         double alpha = kAlphaDamping);

/// 1D form: 0.5 (g_j + g_k) + alpha / (2 (x_k - x_j)) (u_R - u_L).
double alpha_damped_face_derivative_1d(double grad_j, double grad_k, double u_left, double u_right,
                                       double x_j, double x_k, double alpha = kAlphaDamping);

}  // namespace fvvisc
