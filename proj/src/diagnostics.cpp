#include "pflab/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "pflab/errors.hpp"

namespace pflab {

double DiagnosticsRecord::speed_measured_max() const {
  return max_abs_valid(speed_measured, valid);
}
double DiagnosticsRecord::speed_oracle_max() const {
  return max_abs_valid(speed_oracle, valid);
}
double DiagnosticsRecord::error_max() const { return max_abs_valid(model_error, valid); }

double max_abs_valid(const std::vector<double>& values, const std::vector<char>& valid) {
  double out = 0.0;
  for (size_t k = 0; k < values.size(); ++k)
    if (valid.empty() || valid[k]) out = std::max(out, std::abs(values[k]));
  return out;
}

SpeedMeasurement normal_speed_measured(const ScalarField& S_prev,
                                       const ScalarField& S_next, double dt,
                                       double level) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Grid& g = S_prev.grid;
  ScalarField mid(g), rate(g);
  for (int k = 0; k < g.nodes(); ++k) {
    mid.v[k] = 0.5 * (S_prev.v[k] + S_next.v[k]);
    rate.v[k] = (S_next.v[k] - S_prev.v[k]) / dt;
  }

  SpeedMeasurement out;
  out.samples = extract_level_set(mid, level);
  out.speed.resize(out.samples.size(), 0.0);
  out.valid.resize(out.samples.size(), 1);
  for (size_t s = 0; s < out.samples.size(); ++s) {
    const auto& ls = out.samples[s];
    if (ls.grad_magnitude < 1e-8) {
      out.valid[s] = 0;  // degenerate gradient; excluded from aggregates
      continue;
    }
    double st = interp(rate, ls.x, ls.y);
    out.speed[s] = -st / ls.grad_magnitude;
  }
  return out;
}

double interface_width(const ScalarField& S) {
  const Grid& g = S.grid;
  auto lo = extract_level_set(S, 0.1);
  auto hi = extract_level_set(S, 0.9);

  if (g.dim == 1) {
    double width = 0.0;
    for (const auto& a : lo) {
      double best = std::numeric_limits<double>::max();
      for (const auto& b : hi) best = std::min(best, std::abs(b.x - a.x));
      width = std::max(width, best);
    }
    return width;
  }

  // march from each 0.1 sample uphill along its normal until S crosses 0.9
  const double step = 0.5 * g.min_h();
  const double max_march = std::max(g.extent[0], g.extent[1]);
  double width = 0.0;
  bool found_any = false;
  for (const auto& a : lo) {
    if (a.grad_magnitude < 1e-12) continue;
    double prev_s = 0.0;
    double prev_v = interp(S, a.x, a.y);
    bool found = false;
    for (double s = step; s <= max_march; s += step) {
      double px = a.x + s * a.nx, py = a.y + s * a.ny;
      if (px < 0.0 || px > g.extent[0] || py < 0.0 || py > g.extent[1]) break;
      double v = interp(S, px, py);
      if (v >= 0.9) {
        // bisect between prev_s and s
        double lo_s = prev_s, hi_s = s, lo_v = prev_v, hi_v = v;
        for (int it = 0; it < 30 && hi_s - lo_s > 1e-14; ++it) {
          double mid_s = 0.5 * (lo_s + hi_s);
          double mv = interp(S, a.x + mid_s * a.nx, a.y + mid_s * a.ny);
          if (mv >= 0.9) {
            hi_s = mid_s;
            hi_v = mv;
          } else {
            lo_s = mid_s;
            lo_v = mv;
          }
        }
        (void)lo_v;
        (void)hi_v;
        width = std::max(width, hi_s);
        found = true;
        break;
      }
      prev_s = s;
      prev_v = v;
    }
    found_any = found_any || found;
  }
  if (!found_any) throw EmptyLevelSet("no normal ray reached the 0.9 level");
  return width;
}

double free_energy(const ElasticProblem& problem, const ScalarField& S,
                   const VectorField& u, double psi_scale, double grad_scale) {
  const Grid& g = S.grid;
  double total = elastic_stored_energy(problem, u, S);

  // trapezoid node weights
  auto wx = [&](int i) { return (i == 0 || i == g.n[0] - 1) ? 0.5 * g.h[0] : g.h[0]; };
  auto wy = [&](int j) {
    if (g.dim == 1) return 1.0;
    return (j == 0 || j == g.n[1] - 1) ? 0.5 * g.h[1] : g.h[1];
  };

  for (int j = 0; j < g.n[1]; ++j)
    for (int i = 0; i < g.n[0]; ++i)
      total += wx(i) * wy(j) * psi_scale * psi_hat(problem.material.well, S(i, j));

  // edge-difference gradient energy
  double grad_term = 0.0;
  for (int j = 0; j < g.n[1]; ++j)
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      double d = (S(i + 1, j) - S(i, j)) / g.h[0];
      grad_term += wy(j) * g.h[0] * d * d;
    }
  if (g.dim == 2)
    for (int j = 0; j + 1 < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        double d = (S(i, j + 1) - S(i, j)) / g.h[1];
        grad_term += wx(i) * g.h[1] * d * d;
      }
  total += 0.5 * grad_scale * grad_term;
  return total;
}

std::pair<ScalarField, double> clausius_duhem_residual(const ScalarField& force_scaled,
                                                       const ScalarField& S_rate) {
  if (!force_scaled.grid.same_layout(S_rate.grid))
    throw std::invalid_argument("fields live on different grids");
  ScalarField res(force_scaled.grid);
  double mx = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < force_scaled.grid.nodes(); ++k) {
    res.v[k] = force_scaled.v[k] * S_rate.v[k];
    mx = std::max(mx, res.v[k]);
  }
  return {std::move(res), mx};
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4)
    throw DegenerateFit("slope fit needs at least 4 points, got " +
                        std::to_string(points.size()));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (auto [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0))
      throw DegenerateFit("slope fit requires positive coordinates");
    double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-24) throw DegenerateFit("swept values are not distinct");
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.points = static_cast<int>(points.size());
  double ss = 0.0;
  for (auto [x, y] : points) {
    double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::vector<double> model_error(const std::vector<double>& measured,
                                const std::vector<double>& oracle) {
  std::vector<double> out(measured.size(), 0.0);
  for (size_t k = 0; k < measured.size(); ++k) out[k] = measured[k] - oracle[k];
  return out;
}

}  // namespace pflab
