#pragma once

#include <utility>
#include <vector>

#include "pflab/elasticity.hpp"
#include "pflab/grid.hpp"
#include "pflab/level_set.hpp"

namespace pflab {

/// Per-sample-time measurement bundle emitted by a run.
struct DiagnosticsRecord {
  double t = 0.0;
  std::vector<LevelSetSample> level_set;
  std::vector<double> speed_measured;
  std::vector<double> speed_oracle;  // empty when no oracle applies
  std::vector<double> model_error;   // speed_measured - speed_oracle per sample
  std::vector<char> valid;           // 0 where the gradient was degenerate
  bool has_oracle = false;
  double width = 0.0;
  double free_energy = 0.0;
  double cd_residual_max = 0.0;  // max over steps since the previous record
  long long cell_update_count = 0;
  double wall_time = 0.0;

  double speed_measured_max() const;
  double speed_oracle_max() const;
  double error_max() const;
};

/// Normal speed -S_t/|grad S| of the level set {S = c}, with S_t from the
/// two fields and all quantities interpolated on the midpoint field.
/// Samples with |grad| < 1e-8 are flagged invalid instead of failing.
struct SpeedMeasurement {
  std::vector<LevelSetSample> samples;
  std::vector<double> speed;
  std::vector<char> valid;
};
SpeedMeasurement normal_speed_measured(const ScalarField& S_prev,
                                       const ScalarField& S_next, double dt,
                                       double level);

/// Distance between the 0.1 and 0.9 level sets: max interface thickness.
/// 1D pairs nearest crossings; 2D marches from each 0.1 sample along its
/// normal until S reaches 0.9.
double interface_width(const ScalarField& S);

/// Ginzburg-Landau functional with model scalings:
///   stored elastic energy + psi_scale * psi_hat(S) + grad_scale/2 * |grad S|^2.
/// The gradient term uses the edge-difference form whose variation is the
/// ghost-reflected Laplacian, so explicit steps descend this functional.
double free_energy(const ElasticProblem& problem, const ScalarField& S,
                   const VectorField& u, double psi_scale, double grad_scale);

/// Pointwise product force * S_t and its maximum; nonpositive for both
/// evolution laws whenever the rate comes from the same force field.
std::pair<ScalarField, double> clausius_duhem_residual(const ScalarField& force_scaled,
                                                       const ScalarField& S_rate);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms residual in log-log coordinates
  int points = 0;
};

/// Least-squares line through (log x, log y). Requires >= 4 positive points.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

/// Signed per-sample differences measured - oracle.
std::vector<double> model_error(const std::vector<double>& measured,
                                const std::vector<double>& oracle);

double max_abs_valid(const std::vector<double>& values, const std::vector<char>& valid);

}  // namespace pflab
