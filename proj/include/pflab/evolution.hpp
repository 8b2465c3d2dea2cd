#pragma once

#include <vector>

#include "pflab/diagnostics.hpp"
#include "pflab/elasticity.hpp"
#include "pflab/grid.hpp"
#include "pflab/materials.hpp"

namespace pflab {

enum class Model { allen_cahn, hybrid };

/// Scaling parameters of the two evolution laws. Allen-Cahn uses (mu, lam),
/// the hybrid equation uses nu; c is the mobility constant of the linear
/// kinetic response.
struct ModelParams {
  Model model = Model::allen_cahn;
  double mu = 0.0, lam = 0.0;
  double nu = 0.0;
  double c = 1.0;
  double safety = 0.4;

  static ModelParams allen_cahn_params(double mu, double lam, double c,
                                       double safety = 0.4);
  static ModelParams hybrid_params(double nu, double c, double safety = 0.4);

  double psi_scale() const;   // weight of psi_hat' in the driving force
  double grad_scale() const;  // weight of the Laplacian in the driving force
  double rate_scale() const;  // outer rate multiplier for the linear response
  /// Slope of the matched transition profile 0.5*(1 + tanh(k x)).
  double profile_k(double a) const;
};

struct SimState {
  double t = 0.0;
  ScalarField S;
  VectorField u;
  SymTensorField T;
  long long step_count = 0;
  long long cell_update_count = 0;
  double s_min = 0.0, s_max = 0.0;  // running range of S
};

/// Initialize (u, T) for S by one elasticity solve.
SimState make_state(const ElasticProblem& problem, ScalarField S0, double t0 = 0.0);

/// The scaled driving-force bracket of the chosen model, evaluated from the
/// state's stress field and order parameter.
ScalarField driving_force_scaled(const SimState& state, const MaterialSet& material,
                                 const ModelParams& params);

struct StepInfo {
  double dt = 0.0;
  double cd_residual_max = 0.0;
  double force_max = 0.0;
};

/// One explicit Euler step of the respective model; re-solves elasticity and
/// updates counters. Throws UnstableStep when max|S| exceeds 10 afterwards.
StepInfo step_allen_cahn(SimState& state, const ElasticProblem& problem,
                         const ModelParams& params, double dt);
StepInfo step_hybrid(SimState& state, const ElasticProblem& problem,
                     const ModelParams& params, double dt);

/// Stable explicit step size. grad_max / force_max are bounds taken from the
/// current state (used by the hybrid model only).
double stable_dt(const ModelParams& params, const Grid& grid, const DoubleWell& well,
                 double grad_max, double force_max);

// matched tanh interface profiles, clipped to exact 0/1 beyond 6/k
ScalarField tanh_bar_profile(const Grid& grid, double z0, double k, bool phase2_on_left);
ScalarField tanh_disc_profile(const Grid& grid, double cx, double cy, double R0, double k);

struct Schedule {
  double t_end = 1.0;
  int samples = 10;
  double burn_in = 0.0;  // records before this time are excluded from aggregates
};

/// Reference solution attached to a run; speeds on the extracted level set
/// are compared against it sample by sample.
struct OracleSpec {
  enum class Kind { none, bar1d, circle2d } kind = Kind::none;
  double c_hat = 1.0;
  double E = 0.0;  // interface-energy parameter used by the oracle
  // bar1d
  double U1 = 0.0;
  bool phase2_on_left = true;
  // circle2d
  double cx = 0.5, cy = 0.5;
};

struct RunOptions {
  double level = 0.5;         // level set used for speed measurement
  bool track_energy = false;  // per-step free-energy monitoring
  int elasticity_stride = 1;
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  SimState state;
  double cd_residual_max = 0.0;       // over all steps
  double energy_increase_max = 0.0;   // max per-step relative increase (tracked runs)
  double s_min = 0.0, s_max = 0.0;
};

/// Time loop: explicit steps under the CFL bound, one diagnostics record per
/// sample time. The speed at a sample is measured across one extra step,
/// centered on the midpoint field. Deterministic for fixed inputs.
RunResult run(const ElasticProblem& problem, const ModelParams& params, ScalarField S0,
              const Schedule& schedule, const OracleSpec& oracle,
              const RunOptions& options = {});

}  // namespace pflab
