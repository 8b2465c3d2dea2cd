#pragma once

#include <vector>

#include "pflab/materials.hpp"

namespace pflab {

/// Two-phase bar on (0, L): interface at z, phase 2 occupies one side;
/// u(0) = 0 and u(L) = U1.
struct SharpState1D {
  double z = 0.5;
  bool phase2_on_left = true;
  double U1 = 0.0;
  double length = 1.0;
};

struct CircleState {
  double R = 0.0;
  double cx = 0.0, cy = 0.0;
};

struct OracleParams {
  double c_hat = 1.0;  // kinetic constant
  double c1 = 0.0;     // surface-energy constant of the material's well
  double E = 0.0;      // interface-energy parameter (sqrt(lambda); 0 allowed)
  MaterialSet material;
};

/// Closed-form transmission solution of the bar: constant stress
/// T = D*(U1 - eps_bar*L2)/L with L2 the phase-2 length; the mean
/// interface stress equals T.
struct Transmission1D {
  double T = 0.0;
  double mean_stress = 0.0;
};
Transmission1D transmission_1d(const SharpState1D& state, const MaterialSet& material);

/// Kinetic relation: s = c_hat * (-eps_bar : mean_stress + E * c1 * curvature).
double kinetic_speed(const Sym& mean_stress, double curvature, const OracleParams& p);

struct SharpTrajectory {
  std::vector<double> t, z, speed;
};

/// Integrate the interface position of the two-phase bar under the kinetic
/// relation (RK4, step <= span/1e4). The sign of dz/dt follows the normal
/// convention: the normal points into phase 2.
SharpTrajectory evolve_sharp_1d(const SharpState1D& s0, const OracleParams& p,
                                double t0, double t1, int samples = 64);

/// Equilibrium position and rate constant of the linear two-phase bar;
/// z(t) = z_inf + (z0 - z_inf) * exp(-rate * t).
struct BarClosedForm {
  double z_inf = 0.0;
  double rate = 0.0;
};
BarClosedForm bar_closed_form(const SharpState1D& s0, const OracleParams& p);

/// Exact curvature-flow radius R(t) = sqrt(R0^2 - 2*c_hat*c1*E*t) of a
/// phase-2 disc with zero mean interface stress. Throws CircleVanished
/// at or beyond the vanishing time.
double shrinking_circle(double R0, const OracleParams& p, double t);

}  // namespace pflab
