#include "pflab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <thread>

#include "pflab/errors.hpp"

namespace pflab {

namespace {

constexpr double kWidthLevelSpan = 1.0986122886681098;  // artanh(0.8)

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError("config key " + key + " must be positive", key);
}

void require_in_cap(double v, double cap, const std::string& key) {
  require_positive(v, key);
  if (v > cap)
    throw ConfigError("config key " + key + " exceeds its cap " + std::to_string(cap),
                      key);
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from(const Config& cfg) {
  ExperimentConfig out;

  out.dim = cfg.get_int("grid", "dim");
  if (out.dim != 1 && out.dim != 2)
    throw ConfigError("grid.dim must be 1 or 2", "grid.dim");
  out.cells_x = cfg.get_int("grid", "cells");
  out.cells_y = cfg.get_int_or("grid", "cells_y", out.cells_x);
  out.extent_x = cfg.get_double_or("grid", "extent", 1.0);
  out.extent_y = cfg.get_double_or("grid", "extent_y", out.extent_x);
  if (out.cells_x < 8 || (out.dim == 2 && out.cells_y < 8))
    throw ConfigError("grid.cells must be at least 8", "grid.cells");
  require_positive(out.extent_x, "grid.extent");

  out.a = cfg.get_double_or("material", "a", 1.0);
  require_positive(out.a, "material.a");
  if (out.dim == 1) {
    out.D1 = cfg.get_double_or("material", "D", 1.0);
    require_positive(out.D1, "material.D");
  } else {
    out.lame_lambda = cfg.get_double_or("material", "lame_lambda", 1.0);
    out.lame_mu = cfg.get_double_or("material", "lame_mu", 1.0);
    if (!(out.lame_mu > 0.0) || !(out.lame_lambda + out.lame_mu > 0.0))
      throw ConfigError("material Lame pair must be positive definite",
                        "material.lame_mu");
  }
  out.eps_bar.xx = cfg.get_double_or("material", "eps_xx", 0.0);
  out.eps_bar.yy = cfg.get_double_or("material", "eps_yy", 0.0);
  out.eps_bar.xy = cfg.get_double_or("material", "eps_xy", 0.0);

  const std::string model = cfg.get_string("model", "type");
  out.mu_cap = cfg.get_double_or("model", "mu_cap", 1.0);
  out.lam_cap = cfg.get_double_or("model", "lambda_cap", 1.0);
  out.nu_cap = cfg.get_double_or("model", "nu_cap", 1.0);
  if (model == "ac") {
    out.model = Model::allen_cahn;
    out.mu = cfg.get_double("model", "mu");
    out.lam = cfg.get_double("model", "lambda");
    require_in_cap(out.mu, out.mu_cap, "model.mu");
    require_in_cap(out.lam, out.lam_cap, "model.lambda");
  } else if (model == "hybrid") {
    out.model = Model::hybrid;
    out.nu = cfg.get_double("model", "nu");
    require_in_cap(out.nu, out.nu_cap, "model.nu");
  } else {
    throw ConfigError("model.type must be 'ac' or 'hybrid', got '" + model + "'",
                      "model.type");
  }
  out.c_hat = cfg.get_double_or("model", "c_hat", 1.0);
  require_positive(out.c_hat, "model.c_hat");
  out.has_c_override = cfg.has("model", "c");
  if (out.has_c_override) {
    out.c_override = cfg.get_double("model", "c");
    require_positive(out.c_override, "model.c");
  }
  out.safety = cfg.get_double_or("model", "safety", 0.4);
  require_positive(out.safety, "model.safety");

  const std::string geom = cfg.get_string("geometry", "kind");
  out.level = cfg.get_double_or("geometry", "level", 0.5);
  if (!(out.level > 0.0) || !(out.level < 1.0))
    throw ConfigError("geometry.level must lie in (0,1)", "geometry.level");
  if (geom == "bar1d") {
    out.geometry = Geometry::bar1d;
    if (out.dim != 1) throw ConfigError("bar1d geometry needs grid.dim = 1", "grid.dim");
    out.z0 = cfg.get_double("geometry", "z0");
    if (!(out.z0 > 0.0) || !(out.z0 < out.extent_x))
      throw ConfigError("geometry.z0 must lie inside the bar", "geometry.z0");
    out.phase2_on_left = cfg.get_bool_or("geometry", "phase2_on_left", true);
    out.U1 = cfg.get_double_or("geometry", "U1", 0.0);
  } else if (geom == "circle2d") {
    out.geometry = Geometry::circle2d;
    if (out.dim != 2)
      throw ConfigError("circle2d geometry needs grid.dim = 2", "grid.dim");
    out.ccx = cfg.get_double_or("geometry", "cx", 0.5 * out.extent_x);
    out.ccy = cfg.get_double_or("geometry", "cy", 0.5 * out.extent_y);
    out.R0 = cfg.get_double("geometry", "R0");
    require_positive(out.R0, "geometry.R0");
  } else {
    throw ConfigError("geometry.kind must be 'bar1d' or 'circle2d', got '" + geom + "'",
                      "geometry.kind");
  }

  out.elasticity_enabled =
      cfg.get_bool_or("elasticity", "enabled", out.geometry == Geometry::bar1d);
  if (out.geometry == Geometry::circle2d && out.elasticity_enabled)
    throw ConfigError(
        "the circle2d fixture is stress-free; set elasticity.enabled = false",
        "elasticity.enabled");
  out.body_force_x = cfg.get_double_or("elasticity", "b_x", 0.0);
  out.body_force_y = cfg.get_double_or("elasticity", "b_y", 0.0);
  out.solver_tol = cfg.get_double_or("elasticity", "tol", 1e-10);
  out.elasticity_stride = cfg.get_int_or("elasticity", "stride", 1);
  if (out.elasticity_stride < 1)
    throw ConfigError("elasticity.stride must be >= 1", "elasticity.stride");

  out.t_end = cfg.get_double("schedule", "t_end");
  require_positive(out.t_end, "schedule.t_end");
  out.samples = cfg.get_int("schedule", "samples");
  if (out.samples < 1) throw ConfigError("schedule.samples must be >= 1",
                                         "schedule.samples");
  out.burn_in = cfg.get_double_or("schedule", "burn_in", 0.1 * out.t_end);

  out.track_energy = cfg.get_bool_or("diagnostics", "track_energy", false);
  const std::string oe = cfg.get_string_or("diagnostics", "oracle_E", "auto");
  if (oe == "auto") {
    out.oracle_E_auto = true;
  } else {
    out.oracle_E_auto = false;
    out.oracle_E = cfg.get_double("diagnostics", "oracle_E");
    if (out.oracle_E < 0.0)
      throw ConfigError("diagnostics.oracle_E must be >= 0", "diagnostics.oracle_E");
  }

  if (cfg.has("sweep", "param")) {
    out.sweep_param = cfg.get_string("sweep", "param");
    out.sweep_values = cfg.get_double_list("sweep", "values");
    const bool ac = out.model == Model::allen_cahn;
    const bool valid = (ac && (out.sweep_param == "mu" || out.sweep_param == "lambda" ||
                               out.sweep_param == "mulam")) ||
                       (!ac && out.sweep_param == "nu");
    if (!valid)
      throw ConfigError("sweep.param '" + out.sweep_param +
                            "' does not apply to the chosen model",
                        "sweep.param");
    for (double v : out.sweep_values) require_positive(v, "sweep.values");
  }

  if (cfg.has("effort", "targets")) {
    out.effort_targets = cfg.get_double_list("effort", "targets");
    out.kappa_ref = cfg.get_double("effort", "kappa_ref");
    require_positive(out.kappa_ref, "effort.kappa_ref");
    out.effort_E_values = cfg.get_double_list("effort", "E_values");
    out.effort_F_values = cfg.get_double_list("effort", "F_values");
    out.effort_nu_values = cfg.get_double_list("effort", "nu_values");
    out.points_per_width = cfg.get_int_or("effort", "points_per_width", 8);
    out.min_cells = cfg.get_int_or("effort", "min_cells", 64);
    for (double v : out.effort_targets) require_positive(v, "effort.targets");
  }
  out.effort_p = cfg.get_double_or("effort", "p", out.dim + 1.0);
  require_positive(out.effort_p, "effort.p");

  out.out_dir = cfg.get_string_or("output", "dir", ".");
  return out;
}

MaterialSet build_material(const ExperimentConfig& cfg) {
  ElasticityTensor tensor = cfg.dim == 1
                                ? ElasticityTensor::scalar(cfg.D1)
                                : ElasticityTensor::isotropic(cfg.lame_lambda,
                                                              cfg.lame_mu);
  return MaterialSet::make(DoubleWell{cfg.a}, tensor, TransformationStrain{cfg.eps_bar});
}

ElasticProblem build_problem(const ExperimentConfig& cfg, const MaterialSet& material) {
  ElasticProblem p;
  p.grid = cfg.dim == 1
               ? Grid::line(cfg.cells_x, cfg.extent_x)
               : Grid::rect(cfg.cells_x, cfg.cells_y, cfg.extent_x, cfg.extent_y);
  p.material = material;
  p.body_force = {cfg.body_force_x, cfg.body_force_y};
  p.enabled = cfg.elasticity_enabled;
  p.rel_tol = cfg.solver_tol;
  const double U1 = cfg.U1;
  const double L = cfg.extent_x;
  p.boundary = [U1, L](double, double x, double) {
    return std::array<double, 2>{x >= L ? U1 : 0.0, 0.0};
  };
  return p;
}

double resolved_mobility(Model model, double c_hat, double c1, bool has_override,
                         double override_value) {
  if (has_override) return override_value;
  return model == Model::allen_cahn ? c_hat * c1 : c_hat;
}

ModelParams build_params(const ExperimentConfig& cfg, const MaterialSet& material) {
  double c = resolved_mobility(cfg.model, cfg.c_hat, material.c1, cfg.has_c_override,
                               cfg.c_override);
  return cfg.model == Model::allen_cahn
             ? ModelParams::allen_cahn_params(cfg.mu, cfg.lam, c, cfg.safety)
             : ModelParams::hybrid_params(cfg.nu, c, cfg.safety);
}

ScalarField build_initial(const ExperimentConfig& cfg, const Grid& grid,
                          const ModelParams& params) {
  const double k = params.profile_k(cfg.a);
  if (cfg.geometry == ExperimentConfig::Geometry::bar1d)
    return tanh_bar_profile(grid, cfg.z0, k, cfg.phase2_on_left);
  return tanh_disc_profile(grid, cfg.ccx, cfg.ccy, cfg.R0, k);
}

OracleSpec build_oracle(const ExperimentConfig& cfg, const ModelParams& params) {
  OracleSpec o;
  o.kind = cfg.geometry == ExperimentConfig::Geometry::bar1d
               ? OracleSpec::Kind::bar1d
               : OracleSpec::Kind::circle2d;
  o.c_hat = cfg.c_hat;
  if (cfg.oracle_E_auto)
    o.E = params.model == Model::allen_cahn ? std::sqrt(params.lam) : 0.0;
  else
    o.E = cfg.oracle_E;
  o.U1 = cfg.U1;
  o.phase2_on_left = cfg.phase2_on_left;
  o.cx = cfg.ccx;
  o.cy = cfg.ccy;
  return o;
}

Schedule build_schedule(const ExperimentConfig& cfg) {
  return Schedule{cfg.t_end, cfg.samples, cfg.burn_in};
}

RunOptions build_run_options(const ExperimentConfig& cfg) {
  RunOptions o;
  o.level = cfg.level;
  o.track_energy = cfg.track_energy;
  o.elasticity_stride = cfg.elasticity_stride;
  return o;
}

RunResult run_single(const ExperimentConfig& cfg) {
  MaterialSet material = build_material(cfg);
  ElasticProblem problem = build_problem(cfg, material);
  ModelParams params = build_params(cfg, material);
  ScalarField S0 = build_initial(cfg, problem.grid, params);
  return run(problem, params, std::move(S0), build_schedule(cfg),
             build_oracle(cfg, params), build_run_options(cfg));
}

namespace {

void apply_sweep_value(ExperimentConfig& cfg, const std::string& param, double value) {
  if (param == "mu") {
    cfg.mu = value;
  } else if (param == "lambda") {
    cfg.lam = value;
  } else if (param == "mulam") {
    cfg.mu = cfg.lam = std::sqrt(value);
  } else if (param == "nu") {
    cfg.nu = value;
  } else {
    throw ConfigError("unknown sweep parameter '" + param + "'", "sweep.param");
  }
}

double aggregate_error(const RunResult& result, double burn_in) {
  double out = 0.0;
  for (const auto& rec : result.records)
    if (rec.t >= burn_in && rec.has_oracle) out = std::max(out, rec.error_max());
  return out;
}

}  // namespace

CharacteristicRelations characteristic_relations(Model model, double mu, double lam,
                                                 double nu, double p) {
  CharacteristicRelations r;
  if (model == Model::allen_cahn) {
    r.E = std::sqrt(lam);
    r.F = std::sqrt(mu);
    r.W = r.E * r.F;
  } else {
    r.E = 0.0;
    r.F = std::sqrt(nu);
    r.W = r.F;
  }
  r.e_num = std::pow(r.W, -p);
  return r;
}

SweepResult run_sweep(const ExperimentConfig& cfg, int workers) {
  if (cfg.sweep_param.empty())
    throw ConfigError("missing config key: sweep.param", "sweep.param");

  std::vector<double> values = cfg.sweep_values;
  std::sort(values.begin(), values.end());

  SweepResult result;
  result.rows.resize(values.size());
  parallel_for(static_cast<int>(values.size()), workers, [&](int i) {
    SweepRow& row = result.rows[i];
    row.value = values[i];
    ExperimentConfig local = cfg;
    apply_sweep_value(local, cfg.sweep_param, values[i]);
    try {
      RunResult rr = run_single(local);
      row.error_max = aggregate_error(rr, local.burn_in);
      row.width = rr.records.empty() ? 0.0 : rr.records.back().width;
      auto rel = characteristic_relations(local.model, local.mu, local.lam, local.nu,
                                          local.effort_p);
      row.W = rel.W;
      row.e_num = rel.e_num;
      row.cell_updates = rr.state.cell_update_count;
      row.wall_time = rr.records.empty() ? 0.0 : rr.records.back().wall_time;
      row.ok = true;
    } catch (const NumericalError& e) {
      row.ok = false;
      row.message = e.what();
    }
  });

  std::vector<std::pair<double, double>> err_pts, width_pts;
  for (const auto& row : result.rows) {
    if (!row.ok) continue;
    if (row.error_max > 0.0) err_pts.push_back({row.value, row.error_max});
    if (row.width > 0.0) width_pts.push_back({row.value, row.width});
  }
  if (err_pts.size() >= 4) result.error_fit = fit_slope(err_pts);
  if (width_pts.size() >= 4) result.width_fit = fit_slope(width_pts);
  return result;
}

EffortStudyResult optimize_effort(std::vector<EffortMeasurement> ac_table,
                                  std::vector<EffortMeasurement> hyb_table,
                                  const std::vector<double>& targets, double alpha,
                                  double p) {
  if (targets.empty()) throw ConfigError("effort study needs targets", "effort.targets");
  std::sort(ac_table.begin(), ac_table.end(), [](const auto& a, const auto& b) {
    return a.E != b.E ? a.E < b.E : a.F < b.F;
  });
  std::sort(hyb_table.begin(), hyb_table.end(),
            [](const auto& a, const auto& b) { return a.F < b.F; });

  EffortStudyResult out;
  out.ac_table = ac_table;
  out.hyb_table = hyb_table;

  std::vector<double> sorted_targets = targets;
  std::sort(sorted_targets.begin(), sorted_targets.end(), std::greater<>());

  for (double target : sorted_targets) {
    EffortRow row;
    row.target = target;

    // Allen-Cahn: maximize E*F subject to alpha*E + error <= target
    const EffortMeasurement* best = nullptr;
    double best_W = -1.0;
    for (const auto& m : ac_table) {
      double total = alpha * m.E + m.error;
      if (total > target) continue;
      double W = m.E * m.F;
      if (W > best_W) {
        best_W = W;
        best = &m;
        row.ac_total_error = total;
      }
    }
    if (!best)
      throw TargetUnreachable("no Allen-Cahn parameter pair meets target " +
                              std::to_string(target));
    row.ac_E = best->E;
    row.ac_F = best->F;
    row.ac_W = best_W;
    row.ac_e_num = std::pow(best_W, -p);
    row.ac_cell_updates = best->cell_updates;

    // hybrid: largest F whose measured error stays within the target
    const EffortMeasurement* hbest = nullptr;
    for (const auto& m : hyb_table)
      if (m.error <= target) hbest = &m;  // table sorted by F ascending
    if (!hbest)
      throw TargetUnreachable("no hybrid parameter meets target " +
                              std::to_string(target));
    row.hyb_F = hbest->F;
    row.hyb_e_num = std::pow(hbest->F, -p);
    row.hyb_error = hbest->error;
    row.hyb_cell_updates = hbest->cell_updates;

    out.rows.push_back(row);
  }

  std::vector<std::pair<double, double>> ac_e, hyb_e, ac_c, hyb_c;
  for (const auto& row : out.rows) {
    ac_e.push_back({row.target, row.ac_e_num});
    hyb_e.push_back({row.target, row.hyb_e_num});
    ac_c.push_back({row.target, static_cast<double>(row.ac_cell_updates)});
    hyb_c.push_back({row.target, static_cast<double>(row.hyb_cell_updates)});
  }
  out.ac_e_num_fit = fit_slope(ac_e);
  out.hyb_e_num_fit = fit_slope(hyb_e);
  out.ac_cost_fit = fit_slope(ac_c);
  out.hyb_cost_fit = fit_slope(hyb_c);
  return out;
}

namespace {

// grid resolution scaled to the predicted interface width
int cells_for_width(const ExperimentConfig& cfg, double profile_k) {
  double width = 2.0 * kWidthLevelSpan / profile_k;
  double h = width / cfg.points_per_width;
  int cells = static_cast<int>(std::ceil(cfg.extent_x / h)) + 1;
  return std::max(cells, cfg.min_cells);
}

EffortMeasurement measure_effort_point(const ExperimentConfig& base, Model model,
                                       double E, double F, double nu) {
  ExperimentConfig local = base;
  local.model = model;
  if (model == Model::allen_cahn) {
    local.mu = F * F;
    local.lam = E * E;
  } else {
    local.nu = nu;
  }
  local.oracle_E_auto = false;
  local.oracle_E = 0.0;  // zero-interface-energy target problem
  MaterialSet material = build_material(local);
  ModelParams params = build_params(local, material);
  local.cells_x = cells_for_width(local, params.profile_k(local.a));

  RunResult rr = run_single(local);
  EffortMeasurement m;
  m.E = model == Model::allen_cahn ? E : 0.0;
  m.F = F;
  m.error = aggregate_error(rr, local.burn_in);
  m.width = rr.records.empty() ? 0.0 : rr.records.back().width;
  m.cell_updates = rr.state.cell_update_count;
  return m;
}

}  // namespace

EffortStudyResult effort_study(const ExperimentConfig& cfg, int workers) {
  if (cfg.effort_targets.empty())
    throw ConfigError("missing config key: effort.targets", "effort.targets");
  if (cfg.geometry != ExperimentConfig::Geometry::bar1d)
    throw ConfigError("the effort study runs on the bar1d geometry", "geometry.kind");

  struct Job {
    Model model;
    double E, F, nu;
  };
  std::vector<Job> jobs;
  for (double E : cfg.effort_E_values)
    for (double F : cfg.effort_F_values)
      jobs.push_back({Model::allen_cahn, E, F, 0.0});
  const size_t n_ac = jobs.size();
  for (double nu : cfg.effort_nu_values)
    jobs.push_back({Model::hybrid, 0.0, std::sqrt(nu), nu});

  std::vector<EffortMeasurement> measurements(jobs.size());
  std::vector<std::string> failures(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), workers, [&](int i) {
    try {
      measurements[i] = measure_effort_point(cfg, jobs[i].model, jobs[i].E, jobs[i].F,
                                             jobs[i].nu);
    } catch (const NumericalError& e) {
      failures[i] = e.what();
    }
  });
  for (size_t i = 0; i < jobs.size(); ++i)
    if (!failures[i].empty())
      throw NumericalError("effort table entry failed (" +
                           std::string(jobs[i].model == Model::allen_cahn ? "ac" : "hybrid") +
                           ", F = " + std::to_string(jobs[i].F) + "): " + failures[i]);

  std::vector<EffortMeasurement> ac_table(measurements.begin(),
                                          measurements.begin() + n_ac);
  std::vector<EffortMeasurement> hyb_table(measurements.begin() + n_ac,
                                           measurements.end());
  double alpha = cfg.c_hat * build_material(cfg).c1 * cfg.kappa_ref;
  return optimize_effort(std::move(ac_table), std::move(hyb_table), cfg.effort_targets,
                         alpha, cfg.effort_p);
}

void write_records_csv(const std::string& path,
                       const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot write " + path);
  out << "t,width,energy,cd_residual_max,speed_measured_max,speed_oracle_max,"
         "error_max,cell_updates,wall_time\n";
  for (const auto& r : records) {
    out << fmt(r.t) << ',' << fmt(r.width) << ',' << fmt(r.free_energy) << ','
        << fmt(r.cd_residual_max) << ',' << fmt(r.speed_measured_max()) << ','
        << fmt(r.speed_oracle_max()) << ',' << fmt(r.error_max()) << ','
        << r.cell_update_count << ',' << fmt(r.wall_time) << '\n';
  }
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot write " + path);
  out << "value,error_max,width,W,cell_updates,wall_time,e_num,status\n";
  for (const auto& r : result.rows) {
    out << fmt(r.value) << ',' << fmt(r.error_max) << ',' << fmt(r.width) << ','
        << fmt(r.W) << ',' << r.cell_updates << ',' << fmt(r.wall_time) << ','
        << fmt(r.e_num) << ',' << (r.ok ? "ok" : "failed") << '\n';
  }
}

void write_fits_csv(const std::string& path,
                    const std::vector<std::pair<std::string, SlopeFit>>& fits) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot write " + path);
  out << "quantity,slope,intercept,residual,points\n";
  for (const auto& [name, fit] : fits)
    out << name << ',' << fmt(fit.slope) << ',' << fmt(fit.intercept) << ','
        << fmt(fit.residual) << ',' << fit.points << '\n';
}

void write_effort_csv(const std::string& path, const EffortStudyResult& result) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot write " + path);
  out << "target,ac_E,ac_F,ac_W,ac_e_num,ac_total_error,ac_cell_updates,"
         "hyb_F,hyb_e_num,hyb_error,hyb_cell_updates\n";
  for (const auto& r : result.rows) {
    out << fmt(r.target) << ',' << fmt(r.ac_E) << ',' << fmt(r.ac_F) << ','
        << fmt(r.ac_W) << ',' << fmt(r.ac_e_num) << ',' << fmt(r.ac_total_error) << ','
        << r.ac_cell_updates << ',' << fmt(r.hyb_F) << ',' << fmt(r.hyb_e_num) << ','
        << fmt(r.hyb_error) << ',' << r.hyb_cell_updates << '\n';
  }
}

}  // namespace pflab
