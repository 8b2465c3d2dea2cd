#include "pflab/sharp_oracle.hpp"

#include <cmath>

#include "pflab/errors.hpp"

namespace pflab {

Transmission1D transmission_1d(const SharpState1D& state, const MaterialSet& material) {
  const double D = material.tensor.D1;
  const double eb = material.eigenstrain.eps.xx;
  const double L2 = state.phase2_on_left ? state.z : state.length - state.z;
  Transmission1D out;
  out.T = D * (state.U1 - eb * L2) / state.length;
  out.mean_stress = out.T;
  return out;
}

double kinetic_speed(const Sym& mean_stress, double curvature, const OracleParams& p) {
  double drive = -contract(p.material.tensor.dim, p.material.eigenstrain.eps, mean_stress) +
                 p.E * p.c1 * curvature;
  return p.c_hat * drive;
}

namespace {

double bar_speed(double z, const SharpState1D& proto, const OracleParams& p) {
  SharpState1D s = proto;
  s.z = z;
  Transmission1D tr = transmission_1d(s, p.material);
  Sym ms;
  ms.xx = tr.mean_stress;
  return kinetic_speed(ms, 0.0, p);
}

}  // namespace

SharpTrajectory evolve_sharp_1d(const SharpState1D& s0, const OracleParams& p,
                                double t0, double t1, int samples) {
  const double span = t1 - t0;
  if (!(span > 0.0)) throw std::invalid_argument("time span must be positive");
  // dz/dt = sigma * s, sigma = normal x-component (normal points into phase 2)
  const double sigma = s0.phase2_on_left ? -1.0 : 1.0;
  const int substeps_total = 10000;
  samples = std::max(samples, 1);

  SharpTrajectory out;
  out.t.push_back(t0);
  out.z.push_back(s0.z);
  out.speed.push_back(bar_speed(s0.z, s0, p));

  auto check = [&](double z) {
    if (!(z > 0.0) || !(z < s0.length))
      throw InterfaceExitedDomain("sharp interface left (0, L) at z = " +
                                  std::to_string(z));
  };
  check(s0.z);

  double z = s0.z;
  double t = t0;
  const int per_sample = std::max(1, substeps_total / samples);
  const double dt = span / (static_cast<double>(samples) * per_sample);
  for (int k = 0; k < samples; ++k) {
    for (int m = 0; m < per_sample; ++m) {
      double k1 = sigma * bar_speed(z, s0, p);
      double k2 = sigma * bar_speed(z + 0.5 * dt * k1, s0, p);
      double k3 = sigma * bar_speed(z + 0.5 * dt * k2, s0, p);
      double k4 = sigma * bar_speed(z + dt * k3, s0, p);
      z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += dt;
      check(z);
    }
    out.t.push_back(t);
    out.z.push_back(z);
    out.speed.push_back(bar_speed(z, s0, p));
  }
  return out;
}

BarClosedForm bar_closed_form(const SharpState1D& s0, const OracleParams& p) {
  const double D = p.material.tensor.D1;
  const double eb = p.material.eigenstrain.eps.xx;
  BarClosedForm out;
  // T(z) linear in z; dz/dt = -rate * (z - z_inf)
  out.rate = p.c_hat * eb * eb * D / s0.length;
  out.z_inf = s0.phase2_on_left ? s0.U1 / eb : s0.length - s0.U1 / eb;
  return out;
}

double shrinking_circle(double R0, const OracleParams& p, double t) {
  const double decay = 2.0 * p.c_hat * p.c1 * p.E;
  const double r2 = R0 * R0 - decay * t;
  if (decay > 0.0 && r2 <= 0.0)
    throw CircleVanished("circle vanished at t* = " + std::to_string(R0 * R0 / decay));
  return std::sqrt(r2);
}

}  // namespace pflab
