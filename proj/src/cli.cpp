#include "pflab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pflab/errors.hpp"
#include "pflab/harness.hpp"
#include "pflab/sharp_oracle.hpp"

namespace pflab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& override_dir,
                     const std::string& file) {
  std::filesystem::path dir = override_dir.empty() ? cfg.out_dir : override_dir;
  std::filesystem::create_directories(dir);
  return (dir / file).string();
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int /*workers*/) {
  ExperimentConfig cfg = ExperimentConfig::from(Config::parse_file(config_path));
  RunResult rr = run_single(cfg);
  std::string path = out_path(cfg, out_dir, "records.csv");
  write_records_csv(path, rr.records);
  std::cout << "wrote " << path << " (" << rr.records.size() << " records, "
            << rr.state.step_count << " steps, cd_residual_max "
            << fmt(rr.cd_residual_max) << ")\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, int workers) {
  ExperimentConfig cfg = ExperimentConfig::from(Config::parse_file(config_path));
  SweepResult sr = run_sweep(cfg, workers);
  std::string path = out_path(cfg, out_dir, "sweep.csv");
  write_sweep_csv(path, sr);
  std::vector<std::pair<std::string, SlopeFit>> fits;
  if (sr.error_fit) fits.push_back({"error_vs_" + cfg.sweep_param, *sr.error_fit});
  if (sr.width_fit) fits.push_back({"width_vs_" + cfg.sweep_param, *sr.width_fit});
  if (!fits.empty()) {
    std::string fpath = out_path(cfg, out_dir, "sweep_fits.csv");
    write_fits_csv(fpath, fits);
    for (const auto& [name, fit] : fits)
      std::cout << name << ": slope " << fmt(fit.slope) << " (residual "
                << fmt(fit.residual) << ", " << fit.points << " points)\n";
  }
  std::cout << "wrote " << path << "\n";
  for (const auto& row : sr.rows)
    if (!row.ok) std::cerr << "row " << fmt(row.value) << " failed: " << row.message << "\n";
  return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out_dir) {
  ExperimentConfig cfg = ExperimentConfig::from(Config::parse_file(config_path));
  MaterialSet material = build_material(cfg);

  OracleParams op;
  op.c_hat = cfg.c_hat;
  op.c1 = material.c1;
  op.material = material;
  if (cfg.oracle_E_auto)
    op.E = cfg.model == Model::allen_cahn ? std::sqrt(cfg.lam) : 0.0;
  else
    op.E = cfg.oracle_E;

  std::string path = out_path(cfg, out_dir, "oracle.csv");
  std::ofstream out(path);
  out << "t,position,speed\n";
  std::cout << "t,position,speed\n";
  auto emit = [&](double t, double z, double s) {
    std::string line = fmt(t) + "," + fmt(z) + "," + fmt(s);
    out << line << '\n';
    std::cout << line << '\n';
  };

  if (cfg.geometry == ExperimentConfig::Geometry::bar1d) {
    SharpState1D s0;
    s0.z = cfg.z0;
    s0.phase2_on_left = cfg.phase2_on_left;
    s0.U1 = cfg.U1;
    s0.length = cfg.extent_x;
    SharpTrajectory tr = evolve_sharp_1d(s0, op, 0.0, cfg.t_end, cfg.samples);
    for (size_t k = 0; k < tr.t.size(); ++k) emit(tr.t[k], tr.z[k], tr.speed[k]);
  } else {
    for (int k = 0; k <= cfg.samples; ++k) {
      double t = cfg.t_end * k / cfg.samples;
      double R = shrinking_circle(cfg.R0, op, t);
      emit(t, R, kinetic_speed(Sym{}, 1.0 / R, op));
    }
  }
  return 0;
}

int cmd_effort(const std::string& config_path, const std::string& out_dir, int workers) {
  ExperimentConfig cfg = ExperimentConfig::from(Config::parse_file(config_path));
  EffortStudyResult er = effort_study(cfg, workers);
  std::string path = out_path(cfg, out_dir, "effort.csv");
  write_effort_csv(path, er);
  write_fits_csv(out_path(cfg, out_dir, "effort_fits.csv"),
                 {{"ac_e_num_vs_target", er.ac_e_num_fit},
                  {"hyb_e_num_vs_target", er.hyb_e_num_fit},
                  {"ac_cell_updates_vs_target", er.ac_cost_fit},
                  {"hyb_cell_updates_vs_target", er.hyb_cost_fit}});
  std::cout << "ac cell-update exponent:  " << fmt(er.ac_cost_fit.slope) << "\n"
            << "hyb cell-update exponent: " << fmt(er.hyb_cost_fit.slope) << "\n"
            << "wrote " << path << "\n";
  return 0;
}

bool check(const char* name, bool ok) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
  return ok;
}

// quick built-in property battery; exercised fully by the unit tests
int cmd_validate() {
  bool all = true;
  {
    Grid g = Grid::line(64, 1.0);
    ScalarField S(g);
    for (int i = 0; i < g.n[0]; ++i) S(i) = 2.0 * g.x(i);
    VectorField gr = gradient(S);
    double err = 0.0;
    for (int i = 1; i < g.n[0] - 1; ++i) err = std::max(err, std::abs(gr.at(0, i) - 2.0));
    all &= check("gradient exact on affine data", err < 1e-13);

    for (int i = 0; i < g.n[0]; ++i) S(i) = g.x(i) * g.x(i);
    ScalarField lap = laplacian(S);
    err = 0.0;
    for (int i = 1; i < g.n[0] - 1; ++i) err = std::max(err, std::abs(lap.v[i] - 2.0));
    all &= check("laplacian exact on quadratic data", err < 1e-10);
  }
  {
    DoubleWell w{1.0};
    all &= check("surface constant matches analytic value",
                 std::abs(c1_of(w) - std::sqrt(2.0) / 6.0) < 1e-12);
  }
  {
    MaterialSet ms = MaterialSet::make(DoubleWell{1.0}, ElasticityTensor::scalar(1.0),
                                       TransformationStrain{Sym{1.0, 0.0, 0.0}});
    KineticFunction f;
    f.c = 2.0;
    bool sign_ok = true;
    for (int k = 0; k < 1000; ++k) {
      double r = -10.0 + 20.0 * k / 999.0;
      sign_ok &= r * f(r) >= 0.0;
    }
    all &= check("kinetic sign property", sign_ok);
    (void)ms;
  }
  {
    // short hybrid bar run: dissipation sign and energy descent
    ExperimentConfig cfg;
    cfg.dim = 1;
    cfg.cells_x = 128;
    cfg.extent_x = 1.0;
    cfg.a = 1.0;
    cfg.D1 = 1.0;
    cfg.eps_bar = Sym{1.0, 0.0, 0.0};
    cfg.model = Model::hybrid;
    cfg.nu = 2e-3;
    cfg.geometry = ExperimentConfig::Geometry::bar1d;
    cfg.z0 = 0.25;
    cfg.U1 = 0.5;
    cfg.t_end = 0.05;
    cfg.samples = 2;
    cfg.track_energy = true;
    RunResult rr = run_single(cfg);
    all &= check("dissipation sign on hybrid bar", rr.cd_residual_max <= 1e-12);
    all &= check("free-energy descent on hybrid bar", rr.energy_increase_max <= 1e-9);
  }
  return all ? 0 : 3;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"phase-field interface laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int workers = 1;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    if (needs_config)
      sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--workers", workers, "concurrent runs for sweeps");
  };

  auto* run_cmd = app.add_subcommand("run", "single simulation -> records.csv");
  add_common(run_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep -> sweep.csv + fits");
  add_common(sweep_cmd);
  auto* oracle_cmd = app.add_subcommand("oracle", "sharp-interface trajectory");
  add_common(oracle_cmd);
  auto* effort_cmd = app.add_subcommand("effort", "effort-vs-accuracy study");
  add_common(effort_cmd);
  app.add_subcommand("validate", "run the built-in property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir, workers);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, out_dir, workers);
    if (oracle_cmd->parsed()) return cmd_oracle(config_path, out_dir);
    if (effort_cmd->parsed()) return cmd_effort(config_path, out_dir, workers);
    return cmd_validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace pflab
