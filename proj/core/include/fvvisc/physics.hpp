#pragma once

#include "fvvisc/recon.hpp"
#include "fvvisc/types.hpp"

namespace fvvisc {

/// Nondimensional flow constants. Velocities are scaled by the free-stream
/// speed of sound, so p = rho T / gamma and c^2 = T.
struct FlowConfig {
  double mach = 0.1;
  double reynolds = 0.1;
  double t_inf = 300.0;        // dimensional free-stream temperature [K]
  double sutherland = 110.5;   // Sutherland constant [K]
  double gamma = 1.4;
  double prandtl = 0.72;
  double alpha = kAlphaDamping;

  /// Throws InvalidArgument unless every constant is positive and gamma > 1.
  void validate() const;

  friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

/// Primitive variables (rho, velocity, T).
struct PrimitiveState {
  double density = 1.0;
  Vec3 velocity = Vec3::Zero();
  double temperature = 1.0;

  static PrimitiveState from_vector(const Vec5& w) {
    return {w[0], Vec3(w[1], w[2], w[3]), w[4]};
  }
  Vec5 to_vector() const {
    Vec5 w;
    w << density, velocity.x(), velocity.y(), velocity.z(), temperature;
    return w;
  }

  double pressure(double gamma) const { return density * temperature / gamma; }
  bool valid() const { return density > 0.0 && temperature > 0.0; }
};

/// mu_f = (M/Re) (1 + C/T_inf) / (T_f + C/T_inf) T_f^(3/2).
/// Throws NonpositiveTemperature when T_f <= 0.
double sutherland_viscosity(double temperature, const FlowConfig& cfg);

/// d mu / d T of the law above.
double sutherland_viscosity_derivative(double temperature, const FlowConfig& cfg);

/// Conservative variables (rho, rho v, rho E) with rho E = p/(gamma-1) + rho|v|^2/2.
Vec5 to_conservative(const Vec5& w, double gamma);
Vec5 to_primitive(const Vec5& u, double gamma);

/// d(conservative) / d(primitive).
Mat5 conservative_jacobian(const Vec5& w, double gamma);

/// Exact inviscid flux projected on the unit normal:
/// (rho v_n, rho v_n v + p n, v_n (rho E + p)).
Vec5 inviscid_normal_flux(const Vec5& w, const Vec3& unit_normal, double gamma);

/// Symmetric viscous stress mu [G + G^t - (2/3) tr(G) I] with
/// grad_v(i, k) = d v_i / d x_k.
Mat3 viscous_stress(const Mat3& grad_v, double mu);

/// Viscous flux projected on the unit normal: (0, -tau n, -(tau n).v_f + q_n)
/// with q_n = -mu / (Pr (gamma - 1)) grad T . n.
Vec5 viscous_normal_flux(const Mat3& grad_v, const Vec3& grad_t, const Vec3& v_face, double mu_face,
                         const Vec3& unit_normal, const FlowConfig& cfg);

/// Same, taking the full primitive-variable gradient (rows x, y, z).
Vec5 viscous_normal_flux(const StateGradient& grad_w, const Vec3& v_face, double mu_face,
                         const Vec3& unit_normal, const FlowConfig& cfg);

/// Fraction of the Roe-averaged sound speed below which the acoustic
/// eigenvalues are smoothed (Harten entropy fix).
inline constexpr double kEntropyFixFraction = 0.05;

/// Roe flux-difference-split flux across a face with unit normal pointing
/// from L to R. Throws InvalidState for nonpositive density/temperature or a
/// nonpositive Roe-averaged sound speed.
Vec5 roe_flux(const Vec5& w_left, const Vec5& w_right, const Vec3& unit_normal,
              const FlowConfig& cfg);

}  // namespace fvvisc
