#include "fvvisc/physics.hpp"

#include <cmath>
#include <sstream>

#include "fvvisc/errors.hpp"

namespace fvvisc {

void FlowConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string("flow config: ") + name + " must be positive");
    }
  };
  positive(mach, "mach");
  positive(reynolds, "reynolds");
  positive(t_inf, "t_inf");
  positive(sutherland, "sutherland");
  positive(prandtl, "prandtl");
  positive(alpha, "alpha");
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("flow config: gamma must exceed 1");
  }
}

double sutherland_viscosity(double temperature, const FlowConfig& cfg) {
  if (!(temperature > 0.0)) {
    std::ostringstream msg;
    msg << "Sutherland viscosity: nonpositive face temperature " << temperature;
    throw NonpositiveTemperature(msg.str());
  }
  const double s = cfg.sutherland / cfg.t_inf;
  return (cfg.mach / cfg.reynolds) * (1.0 + s) / (temperature + s) * temperature *
         std::sqrt(temperature);
}

double sutherland_viscosity_derivative(double temperature, const FlowConfig& cfg) {
  if (!(temperature > 0.0)) {
    throw NonpositiveTemperature("Sutherland viscosity derivative: nonpositive temperature");
  }
  const double s = cfg.sutherland / cfg.t_inf;
  const double root = std::sqrt(temperature);
  const double denom = temperature + s;
  return (cfg.mach / cfg.reynolds) * (1.0 + s) *
         (1.5 * root * denom - temperature * root) / (denom * denom);
}

Vec5 to_conservative(const Vec5& w, double gamma) {
  const double rho = w[0];
  const Vec3 v = w.segment<3>(1);
  const double p = rho * w[4] / gamma;
  Vec5 u;
  u << rho, rho * v.x(), rho * v.y(), rho * v.z(), p / (gamma - 1.0) + 0.5 * rho * v.squaredNorm();
  return u;
}

Vec5 to_primitive(const Vec5& u, double gamma) {
  const double rho = u[0];
  const Vec3 v = u.segment<3>(1) / rho;
  const double p = (gamma - 1.0) * (u[4] - 0.5 * rho * v.squaredNorm());
  Vec5 w;
  w << rho, v.x(), v.y(), v.z(), gamma * p / rho;
  return w;
}

Mat5 conservative_jacobian(const Vec5& w, double gamma) {
  const double rho = w[0];
  const Vec3 v = w.segment<3>(1);
  const double cv = 1.0 / (gamma * (gamma - 1.0));
  Mat5 m = Mat5::Zero();
  m(0, 0) = 1.0;
  for (int i = 0; i < 3; ++i) {
    m(1 + i, 0) = v[i];
    m(1 + i, 1 + i) = rho;
    m(4, 1 + i) = rho * v[i];
  }
  m(4, 0) = cv * w[4] + 0.5 * v.squaredNorm();
  m(4, 4) = rho * cv;
  return m;
}

Vec5 inviscid_normal_flux(const Vec5& w, const Vec3& unit_normal, double gamma) {
  const double rho = w[0];
  const Vec3 v = w.segment<3>(1);
  const double p = rho * w[4] / gamma;
  const double vn = v.dot(unit_normal);
  const double rho_e = p / (gamma - 1.0) + 0.5 * rho * v.squaredNorm();
  Vec5 f;
  f[0] = rho * vn;
  f.segment<3>(1) = rho * vn * v + p * unit_normal;
  f[4] = vn * (rho_e + p);
  return f;
}

Mat3 viscous_stress(const Mat3& grad_v, double mu) {
  return mu * (grad_v + grad_v.transpose() - (2.0 / 3.0) * grad_v.trace() * Mat3::Identity());
}

Vec5 viscous_normal_flux(const Mat3& grad_v, const Vec3& grad_t, const Vec3& v_face, double mu_face,
                         const Vec3& unit_normal, const FlowConfig& cfg) {
  const Vec3 tau_n = viscous_stress(grad_v, mu_face) * unit_normal;
  const double q_n = -mu_face / (cfg.prandtl * (cfg.gamma - 1.0)) * grad_t.dot(unit_normal);
  Vec5 f;
  f[0] = 0.0;
  f.segment<3>(1) = -tau_n;
  f[4] = -tau_n.dot(v_face) + q_n;
  return f;
}

Vec5 viscous_normal_flux(const StateGradient& grad_w, const Vec3& v_face, double mu_face,
                         const Vec3& unit_normal, const FlowConfig& cfg) {
  // grad_w column v is grad(w_v); transpose the velocity block to get d v_i / d x_k.
  const Mat3 grad_v = grad_w.block<3, 3>(0, 1).transpose();
  const Vec3 grad_t = grad_w.col(4);
  return viscous_normal_flux(grad_v, grad_t, v_face, mu_face, unit_normal, cfg);
}

Vec5 roe_flux(const Vec5& w_left, const Vec5& w_right, const Vec3& unit_normal,
              const FlowConfig& cfg) {
  const double gamma = cfg.gamma;
  const double rho_l = w_left[0];
  const double rho_r = w_right[0];
  if (!(rho_l > 0.0) || !(rho_r > 0.0) || !(w_left[4] > 0.0) || !(w_right[4] > 0.0)) {
    std::ostringstream msg;
    msg << "Roe flux: invalid state (rho_L=" << rho_l << ", T_L=" << w_left[4]
        << ", rho_R=" << rho_r << ", T_R=" << w_right[4] << ")";
    throw InvalidState(msg.str());
  }
  const Vec3 v_l = w_left.segment<3>(1);
  const Vec3 v_r = w_right.segment<3>(1);
  const double p_l = rho_l * w_left[4] / gamma;
  const double p_r = rho_r * w_right[4] / gamma;
  const double h_l = w_left[4] / (gamma - 1.0) + 0.5 * v_l.squaredNorm();
  const double h_r = w_right[4] / (gamma - 1.0) + 0.5 * v_r.squaredNorm();
  const double vn_l = v_l.dot(unit_normal);
  const double vn_r = v_r.dot(unit_normal);

  // Roe averages.
  const double sl = std::sqrt(rho_l);
  const double sr = std::sqrt(rho_r);
  const double rho = sl * sr;
  const Vec3 v = (sl * v_l + sr * v_r) / (sl + sr);
  const double h = (sl * h_l + sr * h_r) / (sl + sr);
  const double c2 = (gamma - 1.0) * (h - 0.5 * v.squaredNorm());
  if (!(c2 > 0.0)) throw InvalidState("Roe flux: nonpositive Roe-averaged sound speed");
  const double c = std::sqrt(c2);
  const double vn = v.dot(unit_normal);

  const double d_rho = rho_r - rho_l;
  const double d_p = p_r - p_l;
  const double d_vn = vn_r - vn_l;
  const Vec3 d_v = v_r - v_l;

  // Wave speeds with entropy fix on the acoustic waves.
  auto fixed = [delta = kEntropyFixFraction * c](double lambda) {
    const double a = std::abs(lambda);
    return a < delta ? 0.5 * (lambda * lambda + delta * delta) / delta : a;
  };
  const double l1 = fixed(vn - c);
  const double l2 = std::abs(vn);
  const double l5 = fixed(vn + c);

  // Wave strengths.
  const double a1 = (d_p - rho * c * d_vn) / (2.0 * c2);
  const double a2 = d_rho - d_p / c2;
  const double a5 = (d_p + rho * c * d_vn) / (2.0 * c2);

  Vec5 diss;
  // Left acoustic wave.
  diss[0] = l1 * a1;
  diss.segment<3>(1) = l1 * a1 * (v - c * unit_normal);
  diss[4] = l1 * a1 * (h - vn * c);
  // Entropy wave.
  diss[0] += l2 * a2;
  diss.segment<3>(1) += l2 * a2 * v;
  diss[4] += l2 * a2 * 0.5 * v.squaredNorm();
  // Shear waves.
  const Vec3 d_vt = d_v - d_vn * unit_normal;
  diss.segment<3>(1) += l2 * rho * d_vt;
  diss[4] += l2 * rho * (v.dot(d_v) - vn * d_vn);
  // Right acoustic wave.
  diss[0] += l5 * a5;
  diss.segment<3>(1) += l5 * a5 * (v + c * unit_normal);
  diss[4] += l5 * a5 * (h + vn * c);

  return 0.5 * (inviscid_normal_flux(w_left, unit_normal, gamma) +
                inviscid_normal_flux(w_right, unit_normal, gamma) - diss);
}

}  // namespace fvvisc
