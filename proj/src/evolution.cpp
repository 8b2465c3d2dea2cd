#include "pflab/evolution.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pflab/errors.hpp"
#include "pflab/sharp_oracle.hpp"

namespace pflab {

ModelParams ModelParams::allen_cahn_params(double mu, double lam, double c,
                                           double safety) {
  if (!(mu > 0.0) || !(lam > 0.0) || !(c > 0.0))
    throw std::invalid_argument("allen-cahn parameters must be positive");
  ModelParams p;
  p.model = Model::allen_cahn;
  p.mu = mu;
  p.lam = lam;
  p.c = c;
  p.safety = safety;
  return p;
}

ModelParams ModelParams::hybrid_params(double nu, double c, double safety) {
  if (!(nu > 0.0) || !(c > 0.0))
    throw std::invalid_argument("hybrid parameters must be positive");
  ModelParams p;
  p.model = Model::hybrid;
  p.nu = nu;
  p.c = c;
  p.safety = safety;
  return p;
}

double ModelParams::psi_scale() const {
  return model == Model::allen_cahn ? 1.0 / std::sqrt(mu) : 1.0;
}

double ModelParams::grad_scale() const {
  return model == Model::allen_cahn ? std::sqrt(mu) * lam : nu;
}

double ModelParams::rate_scale() const {
  return model == Model::allen_cahn ? c / std::sqrt(mu * lam) : c;
}

double ModelParams::profile_k(double a) const {
  double kappa = model == Model::allen_cahn ? mu * lam : nu;
  return std::sqrt(a / (2.0 * kappa));
}

SimState make_state(const ElasticProblem& problem, ScalarField S0, double t0) {
  SimState st;
  st.t = t0;
  st.S = std::move(S0);
  ElasticSolution sol = solve_quasistatic(problem, st.S, t0);
  st.u = std::move(sol.u);
  st.T = std::move(sol.T);
  st.s_min = std::numeric_limits<double>::infinity();
  st.s_max = -st.s_min;
  for (double v : st.S.v) {
    st.s_min = std::min(st.s_min, v);
    st.s_max = std::max(st.s_max, v);
  }
  return st;
}

namespace {

struct ForceEval {
  ScalarField force;
  double force_max = 0.0;
  double grad_max = 0.0;  // central-difference bound on |grad S|
};

ForceEval eval_force(const SimState& state, const MaterialSet& material,
                     const ModelParams& params) {
  const Grid& g = state.S.grid;
  ForceEval out;
  out.force = laplacian(state.S);
  const double ps = params.psi_scale();
  const double gs = params.grad_scale();
  for (int j = 0; j < g.n[1]; ++j)
    for (int i = 0; i < g.n[0]; ++i) {
      int k = g.idx(i, j);
      Sym t;
      t.xx = state.T.xx.empty() ? 0.0 : state.T.xx[k];
      if (g.dim == 2 && !state.T.yy.empty()) {
        t.yy = state.T.yy[k];
        t.xy = state.T.xy[k];
      }
      double dws = -contract(g.dim, material.eigenstrain.eps, t);
      out.force.v[k] =
          dws + ps * psi_hat_prime(material.well, state.S.v[k]) - gs * out.force.v[k];
      out.force_max = std::max(out.force_max, std::abs(out.force.v[k]));
    }
  if (params.model == Model::hybrid) {
    VectorField grad = gradient(state.S);
    for (int k = 0; k < g.nodes(); ++k) {
      double gx = grad.v[k];
      double gy = g.dim == 2 ? grad.v[g.nodes() + k] : 0.0;
      out.grad_max = std::max(out.grad_max, std::sqrt(gx * gx + gy * gy));
    }
  }
  return out;
}

// rate field for the update S <- S + dt * rate; also the CD bookkeeping
struct RateEval {
  ScalarField rate;
  double cd_max = 0.0;
};

RateEval eval_rate(const SimState& state, const MaterialSet& material,
                   const ModelParams& params, const ScalarField& force) {
  const Grid& g = state.S.grid;
  RateEval out;
  out.rate = ScalarField(g);
  out.cd_max = -std::numeric_limits<double>::infinity();
  const bool linear = material.kinetic.is_linear();

  if (params.model == Model::allen_cahn) {
    const double outer = 1.0 / std::sqrt(params.mu * params.lam);
    for (int k = 0; k < g.nodes(); ++k) {
      double f = linear ? params.c * force.v[k] : material.kinetic(force.v[k]);
      out.rate.v[k] = -outer * f;
      out.cd_max = std::max(out.cd_max, force.v[k] * out.rate.v[k]);
    }
    return out;
  }

  // hybrid: upwind |grad S| consistent with the local rate sign
  ScalarField sign(g);
  std::vector<double> fval(g.nodes());
  for (int k = 0; k < g.nodes(); ++k) {
    fval[k] = linear ? params.c * force.v[k] : material.kinetic(force.v[k]);
    sign.v[k] = -fval[k];
  }
  ScalarField gn = grad_norm_godunov(state.S, sign);
  for (int k = 0; k < g.nodes(); ++k) {
    out.rate.v[k] = -fval[k] * gn.v[k];
    out.cd_max = std::max(out.cd_max, force.v[k] * out.rate.v[k]);
  }
  return out;
}

StepInfo apply_step(SimState& state, const ElasticProblem& problem,
                    const ModelParams& params, const ForceEval& fe, double dt,
                    int elasticity_stride = 1) {
  const Grid& g = state.S.grid;
  RateEval re = eval_rate(state, problem.material, params, fe.force);

  double mx = 0.0;
  for (int k = 0; k < g.nodes(); ++k) {
    state.S.v[k] += dt * re.rate.v[k];
    double v = state.S.v[k];
    mx = std::max(mx, std::abs(v));
    state.s_min = std::min(state.s_min, v);
    state.s_max = std::max(state.s_max, v);
  }
  state.t += dt;
  state.step_count += 1;
  state.cell_update_count += g.nodes();
  if (mx > 10.0)
    throw UnstableStep("max|S| = " + std::to_string(mx) + " after step " +
                       std::to_string(state.step_count) + "; dt too large");

  if (problem.enabled && state.step_count % std::max(1, elasticity_stride) == 0) {
    ElasticSolution sol = solve_quasistatic(problem, state.S, state.t, &state.u);
    state.u = std::move(sol.u);
    state.T = std::move(sol.T);
  }

  StepInfo info;
  info.dt = dt;
  info.cd_residual_max = re.cd_max;
  info.force_max = fe.force_max;
  return info;
}

}  // namespace

ScalarField driving_force_scaled(const SimState& state, const MaterialSet& material,
                                 const ModelParams& params) {
  return eval_force(state, material, params).force;
}

StepInfo step_allen_cahn(SimState& state, const ElasticProblem& problem,
                         const ModelParams& params, double dt) {
  if (params.model != Model::allen_cahn)
    throw std::invalid_argument("params are not allen-cahn");
  ForceEval fe = eval_force(state, problem.material, params);
  return apply_step(state, problem, params, fe, dt);
}

StepInfo step_hybrid(SimState& state, const ElasticProblem& problem,
                     const ModelParams& params, double dt) {
  if (params.model != Model::hybrid) throw std::invalid_argument("params are not hybrid");
  ForceEval fe = eval_force(state, problem.material, params);
  return apply_step(state, problem, params, fe, dt);
}

double stable_dt(const ModelParams& params, const Grid& grid, const DoubleWell& well,
                 double grad_max, double force_max) {
  const double h = grid.min_h();
  const double inf = std::numeric_limits<double>::infinity();
  double bound;
  if (params.model == Model::allen_cahn) {
    double parabolic = h * h / (2.0 * grid.dim * params.c * std::sqrt(params.lam));
    double reaction = std::sqrt(params.mu) * std::sqrt(params.lam) /
                      (params.c * psi_hat_second_max(well));
    bound = std::min(parabolic, reaction);
  } else {
    double parabolic =
        grad_max > 0.0 ? h * h / (2.0 * grid.dim * params.c * params.nu * grad_max) : inf;
    double advective = force_max > 0.0 ? h / (params.c * force_max) : inf;
    bound = std::min(parabolic, advective);
    if (!std::isfinite(bound)) bound = h * h / (2.0 * grid.dim * params.c * params.nu);
  }
  return params.safety * bound;
}

ScalarField tanh_bar_profile(const Grid& grid, double z0, double k,
                             bool phase2_on_left) {
  ScalarField S(grid);
  for (int j = 0; j < grid.n[1]; ++j)
    for (int i = 0; i < grid.n[0]; ++i) {
      double arg = phase2_on_left ? k * (z0 - grid.x(i)) : k * (grid.x(i) - z0);
      double v;
      if (arg > 6.0)
        v = 1.0;
      else if (arg < -6.0)
        v = 0.0;
      else
        v = 0.5 * (1.0 + std::tanh(arg));
      S(i, j) = v;
    }
  return S;
}

ScalarField tanh_disc_profile(const Grid& grid, double cx, double cy, double R0,
                              double k) {
  ScalarField S(grid);
  for (int j = 0; j < grid.n[1]; ++j)
    for (int i = 0; i < grid.n[0]; ++i) {
      double dx = grid.x(i) - cx, dy = grid.y(j) - cy;
      double arg = k * (R0 - std::sqrt(dx * dx + dy * dy));
      double v;
      if (arg > 6.0)
        v = 1.0;
      else if (arg < -6.0)
        v = 0.0;
      else
        v = 0.5 * (1.0 + std::tanh(arg));
      S(i, j) = v;
    }
  return S;
}

namespace {

std::vector<double> oracle_speeds(const OracleSpec& oracle, const ElasticProblem& problem,
                                  const std::vector<LevelSetSample>& samples) {
  std::vector<double> out(samples.size(), 0.0);
  const MaterialSet& ms = problem.material;
  OracleParams op;
  op.c_hat = oracle.c_hat;
  op.c1 = ms.c1;
  op.E = oracle.E;
  op.material = ms;

  for (size_t s = 0; s < samples.size(); ++s) {
    if (oracle.kind == OracleSpec::Kind::bar1d) {
      SharpState1D st;
      st.z = samples[s].x;
      st.phase2_on_left = oracle.phase2_on_left;
      st.U1 = oracle.U1;
      st.length = problem.grid.extent[0];
      Transmission1D tr = transmission_1d(st, ms);
      Sym mstress;
      mstress.xx = tr.mean_stress;
      out[s] = kinetic_speed(mstress, 0.0, op);
    } else {  // circle2d: stress-free curvature flow of a phase-2 disc
      double dx = samples[s].x - oracle.cx, dy = samples[s].y - oracle.cy;
      double R = std::sqrt(dx * dx + dy * dy);
      out[s] = kinetic_speed(Sym{}, R > 0.0 ? 1.0 / R : 0.0, op);
    }
  }
  return out;
}

}  // namespace

RunResult run(const ElasticProblem& problem, const ModelParams& params, ScalarField S0,
              const Schedule& schedule, const OracleSpec& oracle,
              const RunOptions& options) {
  if (!(schedule.t_end > 0.0) || schedule.samples < 1)
    throw std::invalid_argument("schedule needs t_end > 0 and samples >= 1");
  const auto wall_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
        .count();
  };

  RunResult result;
  result.state = make_state(problem, std::move(S0));
  SimState& st = result.state;
  result.cd_residual_max = -std::numeric_limits<double>::infinity();

  const double psi_s = params.psi_scale();
  const double grad_s = params.grad_scale();
  double energy_prev = options.track_energy
                           ? free_energy(problem, st.S, st.u, psi_s, grad_s)
                           : 0.0;
  double record_cd_max = -std::numeric_limits<double>::infinity();

  auto advance = [&](double dt) {
    ForceEval fe = eval_force(st, problem.material, params);
    double dt_cfl = stable_dt(params, st.S.grid, problem.material.well, fe.grad_max,
                              fe.force_max);
    double dt_used = std::min(dt, dt_cfl);
    StepInfo info;
    try {
      info = apply_step(st, problem, params, fe, dt_used, options.elasticity_stride);
    } catch (const SolverDiverged& e) {
      throw SolverDiverged("step " + std::to_string(st.step_count + 1) + " (t = " +
                               std::to_string(st.t) + "): " + e.what(),
                           e.residual_history);
    }
    record_cd_max = std::max(record_cd_max, info.cd_residual_max);
    result.cd_residual_max = std::max(result.cd_residual_max, info.cd_residual_max);
    if (options.track_energy) {
      double e = free_energy(problem, st.S, st.u, psi_s, grad_s);
      double rel = (e - energy_prev) / std::max(std::abs(energy_prev), 1e-300);
      result.energy_increase_max = std::max(result.energy_increase_max, rel);
      energy_prev = e;
    }
    return dt_used;
  };

  for (int k = 1; k <= schedule.samples; ++k) {
    const double t_target = schedule.t_end * k / schedule.samples;
    while (st.t < t_target - 1e-14 * schedule.t_end) {
      advance(t_target - st.t);
    }

    // measurement step: one extra stable step, centered on the midpoint field
    ScalarField S_before = st.S;
    double dt_meas = advance(std::numeric_limits<double>::infinity());

    DiagnosticsRecord rec;
    rec.t = st.t - 0.5 * dt_meas;
    SpeedMeasurement sm =
        normal_speed_measured(S_before, st.S, dt_meas, options.level);
    rec.level_set = std::move(sm.samples);
    rec.speed_measured = std::move(sm.speed);
    rec.valid = std::move(sm.valid);
    rec.has_oracle = oracle.kind != OracleSpec::Kind::none;
    if (rec.has_oracle) {
      rec.speed_oracle = oracle_speeds(oracle, problem, rec.level_set);
      rec.model_error = model_error(rec.speed_measured, rec.speed_oracle);
    }
    ScalarField mid(st.S.grid);
    for (int m = 0; m < st.S.grid.nodes(); ++m)
      mid.v[m] = 0.5 * (S_before.v[m] + st.S.v[m]);
    rec.width = interface_width(mid);
    rec.free_energy = free_energy(problem, st.S, st.u, psi_s, grad_s);
    rec.cd_residual_max = record_cd_max;
    record_cd_max = -std::numeric_limits<double>::infinity();
    rec.cell_update_count = st.cell_update_count;
    rec.wall_time = elapsed();
    result.records.push_back(std::move(rec));
  }

  result.s_min = st.s_min;
  result.s_max = st.s_max;
  return result;
}

}  // namespace pflab
