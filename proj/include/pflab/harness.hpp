#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pflab/config.hpp"
#include "pflab/evolution.hpp"

namespace pflab {

/// Typed, validated view of a configuration file.
struct ExperimentConfig {
  // [grid]
  int dim = 1;
  int cells_x = 0, cells_y = 0;
  double extent_x = 1.0, extent_y = 1.0;
  // [material]
  double a = 1.0;
  double D1 = 1.0;                 // 1D modulus
  double lame_lambda = 0.0, lame_mu = 0.0;
  Sym eps_bar;
  // [model]
  Model model = Model::allen_cahn;
  double mu = 0.0, lam = 0.0, nu = 0.0;
  double c_hat = 1.0;
  double c_override = 0.0;
  bool has_c_override = false;
  double safety = 0.4;
  double mu_cap = 1.0, lam_cap = 1.0, nu_cap = 1.0;
  // [geometry]
  enum class Geometry { bar1d, circle2d } geometry = Geometry::bar1d;
  double level = 0.5;
  double z0 = 0.25;
  bool phase2_on_left = true;
  double U1 = 0.0;
  double ccx = 0.5, ccy = 0.5, R0 = 0.25;
  // [elasticity]
  bool elasticity_enabled = true;
  double body_force_x = 0.0, body_force_y = 0.0;
  double solver_tol = 1e-10;
  int elasticity_stride = 1;
  // [schedule]
  double t_end = 1.0;
  int samples = 10;
  double burn_in = 0.0;
  // [diagnostics]
  bool track_energy = false;
  double oracle_E = 0.0;
  bool oracle_E_auto = true;
  // [sweep]
  std::string sweep_param;
  std::vector<double> sweep_values;
  // [effort]
  double effort_p = 0.0;  // 0 -> default dim + 1
  double kappa_ref = 0.0;
  std::vector<double> effort_targets;
  std::vector<double> effort_E_values, effort_F_values, effort_nu_values;
  int points_per_width = 8;
  int min_cells = 64;
  // [output]
  std::string out_dir = ".";

  static ExperimentConfig from(const Config& cfg);
};

MaterialSet build_material(const ExperimentConfig& cfg);
ElasticProblem build_problem(const ExperimentConfig& cfg, const MaterialSet& material);
ModelParams build_params(const ExperimentConfig& cfg, const MaterialSet& material);
ScalarField build_initial(const ExperimentConfig& cfg, const Grid& grid,
                          const ModelParams& params);
OracleSpec build_oracle(const ExperimentConfig& cfg, const ModelParams& params);
Schedule build_schedule(const ExperimentConfig& cfg);
RunOptions build_run_options(const ExperimentConfig& cfg);

/// Mobility default: c_hat * c1 for Allen-Cahn, c_hat for the hybrid model.
double resolved_mobility(Model model, double c_hat, double c1, bool has_override,
                         double override_value);

/// One full simulation from a validated config.
RunResult run_single(const ExperimentConfig& cfg);

struct SweepRow {
  double value = 0.0;
  double error_max = 0.0;
  double width = 0.0;
  double W = 0.0;  // characteristic width parameter
  long long cell_updates = 0;
  double wall_time = 0.0;
  double e_num = 0.0;
  bool ok = false;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by swept value
  std::optional<SlopeFit> error_fit;
  std::optional<SlopeFit> width_fit;
};

SweepResult run_sweep(const ExperimentConfig& cfg, int workers = 1);

struct CharacteristicRelations {
  double E = 0.0, F = 0.0, W = 0.0, e_num = 0.0;
};

/// The parameter identities: AC E = sqrt(lam), F = sqrt(mu), W = EF;
/// hybrid F = W = sqrt(nu); e_num = W^-p.
CharacteristicRelations characteristic_relations(Model model, double mu, double lam,
                                                 double nu, double p);

struct EffortMeasurement {
  double E = 0.0;  // interface-energy parameter (0 for hybrid entries)
  double F = 0.0;  // error parameter
  double error = 0.0;
  double width = 0.0;
  long long cell_updates = 0;
};

struct EffortRow {
  double target = 0.0;
  double ac_E = 0.0, ac_F = 0.0, ac_W = 0.0, ac_e_num = 0.0, ac_total_error = 0.0;
  long long ac_cell_updates = 0;
  double hyb_F = 0.0, hyb_e_num = 0.0, hyb_error = 0.0;
  long long hyb_cell_updates = 0;
};

struct EffortStudyResult {
  std::vector<EffortRow> rows;
  SlopeFit ac_e_num_fit, hyb_e_num_fit;  // e_num vs target
  SlopeFit ac_cost_fit, hyb_cost_fit;    // measured cell updates vs target
  std::vector<EffortMeasurement> ac_table, hyb_table;
};

/// Pick parameters per accuracy target from measured tables. AC maximizes
/// E*F subject to alpha*E + error <= target (alpha = c_hat*c1*kappa_ref);
/// the hybrid model takes the largest feasible F. Throws TargetUnreachable
/// when a target is met by no table entry.
EffortStudyResult optimize_effort(std::vector<EffortMeasurement> ac_table,
                                  std::vector<EffortMeasurement> hyb_table,
                                  const std::vector<double>& targets, double alpha,
                                  double p);

/// Build the measurement tables by simulation (grids scaled to the interface
/// width) and run the optimizer.
EffortStudyResult effort_study(const ExperimentConfig& cfg, int workers = 1);

// CSV output; numbers are written with 12 significant digits.
void write_records_csv(const std::string& path,
                       const std::vector<DiagnosticsRecord>& records);
void write_sweep_csv(const std::string& path, const SweepResult& result);
void write_fits_csv(const std::string& path,
                    const std::vector<std::pair<std::string, SlopeFit>>& fits);
void write_effort_csv(const std::string& path, const EffortStudyResult& result);

}  // namespace pflab
