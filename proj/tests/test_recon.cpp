#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fvvisc/errors.hpp"
#include "fvvisc/mesh.hpp"
#include "fvvisc/recon.hpp"

using namespace fvvisc;

using Strategy = ReconstructionStrategy;

TEST(Strategy, ParseAndNameRoundTrip) {
  for (const char* name : {"lr-average", "arithmetic", "inverse-distance", "one-sided-left",
                           "one-sided-right", "weighted:0.6", "weighted:1"}) {
    EXPECT_EQ(Strategy::parse(name).name(), name);
  }
  const Strategy w = Strategy::weighted(0.1 + 0.2);
  EXPECT_EQ(Strategy::parse(w.name()), w);
}

TEST(Strategy, UnknownNameListsValidNames) {
  try {
    Strategy::parse("harmonic");
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    const std::string what = e.what();
    for (const char* name : {"lr-average", "arithmetic", "inverse-distance", "one-sided-left",
                             "one-sided-right", "weighted"}) {
      EXPECT_NE(what.find(name), std::string::npos) << name;
    }
  }
  EXPECT_THROW(Strategy::parse("weighted:1.5"), InvalidArgument);
  EXPECT_THROW(Strategy::parse("weighted:x"), InvalidArgument);
}

TEST(FaceScalar, Examples) {
  EXPECT_EQ(face_scalar(Strategy::arithmetic(), 1.0, 1.0, 0.0, 0.0, 0.3, 0.1), 1.0);
  EXPECT_NEAR(face_scalar(Strategy::inverse_distance(), 2.0, 4.0, 0.0, 0.0, 1.0, 3.0), 2.5, 1e-15);
  EXPECT_EQ(face_scalar(Strategy::weighted(1.0), 9.0, 25.0, 0.0, 0.0, 1.0, 1.0), 9.0);
  EXPECT_EQ(face_scalar(Strategy::one_sided_left(), 9.0, 25.0, 0.0, 0.0, 1.0, 1.0), 9.0);
  EXPECT_EQ(face_scalar(Strategy::one_sided_right(), 9.0, 25.0, 0.0, 0.0, 1.0, 1.0), 25.0);
  EXPECT_EQ(face_scalar(Strategy::lr_average(), 9.0, 25.0, 3.0, 5.0, 1.0, 1.0), 4.0);
}

TEST(FaceScalar, PointOverloadUsesDistances) {
  const Vec3 xj(0, 0, 0), xk(4, 0, 0), xf(1, 0, 0);
  EXPECT_NEAR(face_scalar(Strategy::inverse_distance(), 2.0, 4.0, 0.0, 0.0, xj, xk, xf), 2.5, 1e-15);
}

TEST(FaceScalar, InverseDistanceRejectsZeroDistance) {
  EXPECT_THROW(face_scalar(Strategy::inverse_distance(), 1.0, 2.0, 0.0, 0.0, 0.0, 1.0),
               DegenerateGeometry);
}

TEST(FaceScalar, WeightsSumToOne) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(1e-3, 2.0);
  for (const Strategy& s : {Strategy::lr_average(), Strategy::arithmetic(), Strategy::inverse_distance(),
                            Strategy::one_sided_left(), Strategy::one_sided_right(),
                            Strategy::weighted(0.3)}) {
    const FaceWeights w = face_weights(s, d(rng), d(rng));
    EXPECT_NEAR(w.cell_j + w.cell_k + w.left + w.right, 1.0, 1e-15) << s.name();
  }
}

TEST(FaceVector, Componentwise) {
  const Vec3 a(1, 2, 3), b(3, 6, 9);
  EXPECT_TRUE(face_vector(Strategy::arithmetic(), a, b, a, b, 1.0, 1.0).isApprox(Vec3(2, 4, 6)));
}

TEST(LsqGradient, LinearFieldIsExact) {
  const Mesh3D mesh = generate_tet_mesh(5, 0.3, 2);
  std::vector<double> u;
  for (const TetCell& c : mesh.cells()) u.push_back(2.0 * c.centroid.x() + 3.0 * c.centroid.y() - c.centroid.z());
  for (const Vec3& g : lsq_gradient_3d(mesh, u)) {
    EXPECT_LT((g - Vec3(2, 3, -1)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LsqGradient, ConstantFieldGivesZero) {
  const Mesh3D mesh = generate_tet_mesh(3, 0.3, 2);
  const std::vector<double> u(static_cast<std::size_t>(mesh.num_cells()), 4.2);
  for (const Vec3& g : lsq_gradient_3d(mesh, u)) EXPECT_LT(g.norm(), 1e-13);
}

TEST(LsqGradient, StatesMatchScalarGradients) {
  const Mesh3D mesh = generate_tet_mesh(3, 0.3, 5);
  const LsqGradient3D op(mesh);
  std::vector<Vec5> w;
  std::vector<double> t;
  for (const TetCell& c : mesh.cells()) {
    Vec5 s = Vec5::Constant(1.0);
    s[4] = std::sin(5.0 * c.centroid.x()) + c.centroid.y() * c.centroid.z();
    w.push_back(s);
    t.push_back(s[4]);
  }
  const auto g5 = op.compute(w);
  const auto gt = op.compute(std::span<const double>(t));
  for (std::size_t j = 0; j < gt.size(); ++j) {
    EXPECT_TRUE(g5[j].col(4).isApprox(gt[j], 1e-14));
    EXPECT_LT(g5[j].col(0).norm(), 1e-13);
  }
}

TEST(LsqGradient, QuadraticErrorIsFirstOrder) {
  // Oracle: the exact derivative of x^2; mean error should fall about in
  // proportion to h.
  auto mean_error = [](Index n) {
    const Mesh3D mesh = generate_tet_mesh(n, 0.3, 1);
    std::vector<double> u;
    for (const TetCell& c : mesh.cells()) u.push_back(c.centroid.x() * c.centroid.x());
    const auto g = lsq_gradient_3d(mesh, u);
    double sum = 0.0;
    for (Index j = 0; j < mesh.num_cells(); ++j) {
      sum += std::abs(g[static_cast<std::size_t>(j)].x() - 2.0 * mesh.cell(j).centroid.x());
    }
    return sum / mesh.num_cells();
  };
  const double order = std::log(mean_error(4) / mean_error(8)) / std::log(2.0);
  EXPECT_GT(order, 0.8);
}

TEST(LsqGradient, CornerStencilsAreWidened) {
  const Mesh3D mesh = generate_tet_mesh(2, 0.0, 1);
  const LsqGradient3D op(mesh);
  for (Index j = 0; j < mesh.num_cells(); ++j) EXPECT_GE(op.stencil(j).size(), 3u);
}

TEST(Gradient1D, LinearIsExactOnIrregularGrid) {
  const Grid1D g = generate_grid_1d(9, false, 0.4, 3);
  std::vector<double> u;
  for (double x : g.centers()) u.push_back(5.0 * x + 1.0);
  for (double d : gradient_1d(g, u)) EXPECT_NEAR(d, 5.0, 1e-12);
}

TEST(Gradient1D, ConstantGivesZero) {
  const Grid1D g = generate_grid_1d(7, false);
  const std::vector<double> u(7, 3.0);
  for (double d : gradient_1d(g, u)) EXPECT_EQ(d, 0.0);
}

TEST(Gradient1D, CentralDifferenceOfExponential) {
  // Cell centers at 0.49, 0.5 and 0.51.
  const Grid1D g({0.0, 0.485, 0.495, 0.505, 0.515, 1.0});
  std::vector<double> u;
  for (double x : g.centers()) u.push_back(std::exp(2.0 * x));
  const double oracle = (std::exp(2.0 * 0.51) - std::exp(2.0 * 0.49)) / 0.02;
  const double d = gradient_1d(g, u)[2];
  EXPECT_NEAR(d, oracle, 1e-10);
  EXPECT_NEAR(d, 5.436926101744, 1e-11);
}

TEST(Reconstruct, ZeroGradientsReturnCellStates) {
  Vec5 wj, wk;
  wj << 1, 2, 3, 4, 5;
  wk << 6, 7, 8, 9, 10;
  const FaceStates s = reconstruct_lr(wj, StateGradient::Zero(), Vec3(0, 0, 0), wk,
                                      StateGradient::Zero(), Vec3(1, 0, 0), Vec3(0.4, 0.1, 0));
  EXPECT_EQ(s.left, wj);
  EXPECT_EQ(s.right, wk);
}

TEST(Reconstruct, DotProductExample) {
  StateGradient g = StateGradient::Zero();
  g(0, 0) = 1.0;
  const FaceStates s = reconstruct_lr(Vec5::Ones(), g, Vec3(0, 0, 0), Vec5::Ones(),
                                      StateGradient::Zero(), Vec3(1, 1, 0), Vec3(0.1, 0.2, 0));
  EXPECT_NEAR(s.left[0], 1.1, 1e-15);
}

TEST(Reconstruct, LinearFieldIsExact) {
  const Vec3 a(0.3, -0.2, 0.9);
  auto field = [&](const Vec3& x) { return 2.0 + a.dot(x); };
  StateGradient g;
  for (int v = 0; v < 5; ++v) g.col(v) = a;
  const Vec3 xj(0.1, 0.2, 0.3), xk(0.4, 0.1, 0.35), xc(0.27, 0.18, 0.31);
  const FaceStates s = reconstruct_lr(Vec5::Constant(field(xj)), g, xj, Vec5::Constant(field(xk)), g,
                                      xk, xc);
  EXPECT_LT((s.left - Vec5::Constant(field(xc))).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((s.right - Vec5::Constant(field(xc))).cwiseAbs().maxCoeff(), 1e-15);
  const auto [l, r] = reconstruct_lr_1d(1.0, 2.0, 0.1, 1.6, 2.0, 0.4, 0.2);
  EXPECT_NEAR(l, 1.2, 1e-15);
  EXPECT_NEAR(r, 1.2, 1e-15);
}

TEST(AlphaDamped, EqualStatesReturnAverage) {
  const Vec3 g(1, -2, 0.5);
  const Vec3 out = alpha_damped_face_gradient(g, g, 3.0, 3.0, Vec3(0, 0, 0), Vec3(1, 0.2, 0),
                                              Vec3(1, 0, 0));
  EXPECT_TRUE(out.isApprox(g, 1e-15));
}

TEST(AlphaDamped, LinearFieldGradientIsExact) {
  const Vec3 a(0.3, -0.2, 0.9);
  const Vec3 xj(0.1, 0.2, 0.3), xk(0.4, 0.1, 0.35);
  const Vec3 n = Vec3(1, -0.2, 0.1).normalized();
  const double q = 0.7;
  EXPECT_TRUE(alpha_damped_face_gradient(a, a, q, q, xj, xk, n).isApprox(a, 1e-15));
}

TEST(AlphaDamped, OneDimensionalExample) {
  EXPECT_NEAR(alpha_damped_face_derivative_1d(0.0, 0.0, 0.0, 1.0, 0.0, 0.5), 4.0 / 3.0, 1e-15);
}

TEST(AlphaDamped, PenaltyActsAlongNormal) {
  const Vec3 n(0, 0, 1);
  const Vec3 out = alpha_damped_face_gradient(Vec3::Zero(), Vec3::Zero(), 0.0, 1.0, Vec3(0, 0, 0),
                                              Vec3(0.3, 0, 0.5), n, 1.0);
  EXPECT_TRUE(out.isApprox(Vec3(0, 0, 2.0), 1e-15));
}

TEST(AlphaDamped, DegenerateGeometryThrows) {
  EXPECT_THROW(alpha_damped_face_gradient(Vec3::Zero(), Vec3::Zero(), 0.0, 1.0, Vec3(0, 0, 0),
                                          Vec3(1, 0, 0), Vec3(0, 1, 0)),
               DegenerateGeometry);
}
