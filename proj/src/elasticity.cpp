#include "pflab/elasticity.hpp"

#include <cmath>

#include "pflab/errors.hpp"

namespace pflab {

namespace {

double body_force_at(const ElasticProblem& p, int comp, int i, int j) {
  if (p.body_force_field) return p.body_force_field->at(comp, i, j);
  return p.body_force[comp];
}

// ---------------------------------------------------------------- 1D direct

ElasticSolution solve_direct_1d(const ElasticProblem& p, const ScalarField& S, double t) {
  const Grid& g = p.grid;
  const int n = g.n[0];
  const int m = n - 1;
  const double h = g.h[0];
  const double D = p.material.tensor.D1;
  const double eb = p.material.eigenstrain.eps.xx;

  const double U0 = p.boundary(t, 0.0, 0.0)[0];
  const double U1 = p.boundary(t, g.extent[0], 0.0)[0];

  // cell stresses satisfy T_{c+1} = T_c - h*b_i at interior nodes
  std::vector<double> P(m, 0.0);  // cumulative load, P_c = T_0 - T_c
  for (int c = 1; c < m; ++c) P[c] = P[c - 1] + h * body_force_at(p, 0, c, 0);

  double sumS = 0.0, sumP = 0.0;
  for (int c = 0; c < m; ++c) {
    sumS += 0.5 * (S(c) + S(c + 1));
    sumP += P[c];
  }
  const double L = g.extent[0];
  const double T0 = (D * ((U1 - U0) - eb * h * sumS) + h * sumP) / L;

  ElasticSolution sol;
  sol.u = VectorField(g);
  sol.T = SymTensorField(g);
  std::vector<double> Tc(m);
  for (int c = 0; c < m; ++c) Tc[c] = T0 - P[c];

  sol.u.at(0, 0) = U0;
  for (int c = 0; c < m; ++c) {
    double Sc = 0.5 * (S(c) + S(c + 1));
    sol.u.at(0, c + 1) = sol.u.at(0, c) + h * (Tc[c] / D + eb * Sc);
  }
  sol.u.at(0, n - 1) = U1;

  sol.T.xx[0] = Tc[0];
  sol.T.xx[n - 1] = Tc[m - 1];
  for (int i = 1; i < n - 1; ++i) sol.T.xx[i] = 0.5 * (Tc[i - 1] + Tc[i]);

  double res = 0.0;
  for (int i = 1; i < n - 1; ++i)
    res = std::max(res, std::abs((Tc[i] - Tc[i - 1]) / h + body_force_at(p, 0, i, 0)));
  sol.residual_norm = res;
  sol.iterations = 0;
  return sol;
}

// ------------------------------------------------------- element machinery
//
// Bilinear elements on the structured grid: one midpoint evaluation in 1D
// (exact for linear shape functions), 2x2 Gauss in 2D. The resulting system
// is symmetric positive definite once the Dirichlet nodes are eliminated.

struct ElementOps {
  const Grid& g;
  int dim;
  double hx, hy, wJ;          // per-gauss-point volume
  double gp[4][2];            // gauss point reference coords
  int ngp;
  // shape gradients at each gp for the 4 (or 2) local nodes
  double dNdx[4][4], dNdy[4][4];
  double Nval[4][4];

  explicit ElementOps(const Grid& grid) : g(grid), dim(grid.dim) {
    hx = g.h[0];
    hy = dim == 2 ? g.h[1] : 1.0;
    if (dim == 1) {
      ngp = 1;
      wJ = hx;
      gp[0][0] = 0.0;
      dNdx[0][0] = -1.0 / hx;
      dNdx[0][1] = 1.0 / hx;
      Nval[0][0] = 0.5;
      Nval[0][1] = 0.5;
    } else {
      ngp = 4;
      wJ = hx * hy / 4.0;
      const double q = 1.0 / std::sqrt(3.0);
      const double pts[4][2] = {{-q, -q}, {q, -q}, {q, q}, {-q, q}};
      for (int k = 0; k < 4; ++k) {
        gp[k][0] = pts[k][0];
        gp[k][1] = pts[k][1];
        fill_shapes(k, pts[k][0], pts[k][1]);
      }
    }
  }

  void fill_shapes(int k, double xi, double eta) {
    // local node order: (0,0), (1,0), (1,1), (0,1)
    const double sx[4] = {-1.0, 1.0, 1.0, -1.0};
    const double sy[4] = {-1.0, -1.0, 1.0, 1.0};
    for (int a = 0; a < 4; ++a) {
      Nval[k][a] = 0.25 * (1.0 + sx[a] * xi) * (1.0 + sy[a] * eta);
      dNdx[k][a] = 0.25 * sx[a] * (1.0 + sy[a] * eta) * 2.0 / hx;
      dNdy[k][a] = 0.25 * sy[a] * (1.0 + sx[a] * xi) * 2.0 / hy;
    }
  }

  int local_nodes() const { return dim == 1 ? 2 : 4; }

  void corner_ids(int ci, int cj, int* ids) const {
    if (dim == 1) {
      ids[0] = g.idx(ci);
      ids[1] = g.idx(ci + 1);
    } else {
      ids[0] = g.idx(ci, cj);
      ids[1] = g.idx(ci + 1, cj);
      ids[2] = g.idx(ci + 1, cj + 1);
      ids[3] = g.idx(ci, cj + 1);
    }
  }
};

// engineering-form constitutive product: t = D_eng * e, e = (exx, eyy, gxy)
inline void apply_D(const ElasticityTensor& D, const double e[3], double t[3]) {
  if (D.dim == 1) {
    t[0] = D.D1 * e[0];
    t[1] = t[2] = 0.0;
    return;
  }
  double a = D.lam_e + 2.0 * D.mu_e;
  t[0] = a * e[0] + D.lam_e * e[1];
  t[1] = D.lam_e * e[0] + a * e[1];
  t[2] = D.mu_e * e[2];
}

// r += K u  (pure stiffness action, eigenstrain excluded)
void add_stiffness_action(const ElasticProblem& p, const ElementOps& ops,
                          const std::vector<double>& u, std::vector<double>& r) {
  const Grid& g = p.grid;
  const int nn = g.nodes();
  const int ln = ops.local_nodes();
  const int cj_end = g.dim == 2 ? g.n[1] - 1 : 1;
  int ids[4];
  for (int cj = 0; cj < cj_end; ++cj)
    for (int ci = 0; ci < g.n[0] - 1; ++ci) {
      ops.corner_ids(ci, cj, ids);
      for (int k = 0; k < ops.ngp; ++k) {
        double e[3] = {0.0, 0.0, 0.0};
        for (int a = 0; a < ln; ++a) {
          double ux = u[ids[a]];
          e[0] += ops.dNdx[k][a] * ux;
          if (g.dim == 2) {
            double uy = u[nn + ids[a]];
            e[1] += ops.dNdy[k][a] * uy;
            e[2] += ops.dNdy[k][a] * ux + ops.dNdx[k][a] * uy;
          }
        }
        double t[3];
        apply_D(p.material.tensor, e, t);
        for (int a = 0; a < ln; ++a) {
          r[ids[a]] += ops.wJ * (ops.dNdx[k][a] * t[0] +
                                 (g.dim == 2 ? ops.dNdy[k][a] * t[2] : 0.0));
          if (g.dim == 2)
            r[nn + ids[a]] += ops.wJ * (ops.dNdy[k][a] * t[1] + ops.dNdx[k][a] * t[2]);
        }
      }
    }
}

// f: eigenstrain load + body force
std::vector<double> assemble_rhs(const ElasticProblem& p, const ElementOps& ops,
                                 const ScalarField& S) {
  const Grid& g = p.grid;
  const int nn = g.nodes();
  const int ln = ops.local_nodes();
  std::vector<double> f(static_cast<size_t>(g.dim) * nn, 0.0);
  const Sym& eb = p.material.eigenstrain.eps;
  const double eb_eng[3] = {eb.xx, eb.yy, 2.0 * eb.xy};
  const int cj_end = g.dim == 2 ? g.n[1] - 1 : 1;
  int ids[4];
  for (int cj = 0; cj < cj_end; ++cj)
    for (int ci = 0; ci < g.n[0] - 1; ++ci) {
      ops.corner_ids(ci, cj, ids);
      for (int k = 0; k < ops.ngp; ++k) {
        double Sgp = 0.0, bgp[2] = {0.0, 0.0};
        for (int a = 0; a < ln; ++a) {
          Sgp += ops.Nval[k][a] * S.v[ids[a]];
          int aj = g.dim == 2 ? ids[a] / g.n[0] : 0;
          int ai = g.dim == 2 ? ids[a] % g.n[0] : ids[a];
          bgp[0] += ops.Nval[k][a] * body_force_at(p, 0, ai, aj);
          if (g.dim == 2) bgp[1] += ops.Nval[k][a] * body_force_at(p, 1, ai, aj);
        }
        double ebar[3] = {eb_eng[0] * Sgp, eb_eng[1] * Sgp, eb_eng[2] * Sgp};
        double t[3];
        apply_D(p.material.tensor, ebar, t);
        for (int a = 0; a < ln; ++a) {
          f[ids[a]] += ops.wJ * (ops.dNdx[k][a] * t[0] +
                                 (g.dim == 2 ? ops.dNdy[k][a] * t[2] : 0.0) +
                                 ops.Nval[k][a] * bgp[0]);
          if (g.dim == 2)
            f[nn + ids[a]] += ops.wJ * (ops.dNdy[k][a] * t[1] + ops.dNdx[k][a] * t[2] +
                                        ops.Nval[k][a] * bgp[1]);
        }
      }
    }
  return f;
}

std::vector<double> assemble_diagonal(const ElasticProblem& p, const ElementOps& ops) {
  const Grid& g = p.grid;
  const int nn = g.nodes();
  const int ln = ops.local_nodes();
  std::vector<double> d(static_cast<size_t>(g.dim) * nn, 0.0);
  const int cj_end = g.dim == 2 ? g.n[1] - 1 : 1;
  int ids[4];
  for (int cj = 0; cj < cj_end; ++cj)
    for (int ci = 0; ci < g.n[0] - 1; ++ci) {
      ops.corner_ids(ci, cj, ids);
      for (int k = 0; k < ops.ngp; ++k)
        for (int a = 0; a < ln; ++a) {
          // unit displacement at (a, comp): strain and its elastic response
          double ex[3] = {ops.dNdx[k][a], 0.0, g.dim == 2 ? ops.dNdy[k][a] : 0.0};
          double t[3];
          apply_D(p.material.tensor, ex, t);
          d[ids[a]] += ops.wJ * (ops.dNdx[k][a] * t[0] +
                                 (g.dim == 2 ? ops.dNdy[k][a] * t[2] : 0.0));
          if (g.dim == 2) {
            double ey[3] = {0.0, ops.dNdy[k][a], ops.dNdx[k][a]};
            apply_D(p.material.tensor, ey, t);
            d[nn + ids[a]] += ops.wJ * (ops.dNdy[k][a] * t[1] + ops.dNdx[k][a] * t[2]);
          }
        }
    }
  return d;
}

bool is_boundary_node(const Grid& g, int i, int j) {
  if (g.dim == 1) return i == 0 || i == g.n[0] - 1;
  return i == 0 || i == g.n[0] - 1 || j == 0 || j == g.n[1] - 1;
}

SymTensorField nodal_stress(const ElasticProblem& p, const VectorField& u,
                            const ScalarField& S) {
  const Grid& g = p.grid;
  ElementOps ops(g);
  SymTensorField T(g);
  std::vector<int> count(g.nodes(), 0);
  std::vector<double> axx(g.nodes(), 0.0), ayy, axy;
  if (g.dim == 2) {
    ayy.assign(g.nodes(), 0.0);
    axy.assign(g.nodes(), 0.0);
  }
  const int nn = g.nodes();
  const int cj_end = g.dim == 2 ? g.n[1] - 1 : 1;
  for (int cj = 0; cj < cj_end; ++cj)
    for (int ci = 0; ci < g.n[0] - 1; ++ci) {
      // cell-center strain and phase value
      Sym eps;
      double Sc;
      if (g.dim == 1) {
        eps.xx = (u.at(0, ci + 1) - u.at(0, ci)) / g.h[0];
        Sc = 0.5 * (S(ci) + S(ci + 1));
      } else {
        double ux0 = u.at(0, ci, cj), ux1 = u.at(0, ci + 1, cj);
        double ux2 = u.at(0, ci + 1, cj + 1), ux3 = u.at(0, ci, cj + 1);
        double uy0 = u.at(1, ci, cj), uy1 = u.at(1, ci + 1, cj);
        double uy2 = u.at(1, ci + 1, cj + 1), uy3 = u.at(1, ci, cj + 1);
        eps.xx = 0.5 * ((ux1 - ux0) + (ux2 - ux3)) / g.h[0];
        eps.yy = 0.5 * ((uy3 - uy0) + (uy2 - uy1)) / g.h[1];
        double dux_dy = 0.5 * ((ux3 - ux0) + (ux2 - ux1)) / g.h[1];
        double duy_dx = 0.5 * ((uy1 - uy0) + (uy2 - uy3)) / g.h[0];
        eps.xy = 0.5 * (dux_dy + duy_dx);
        Sc = 0.25 * (S(ci, cj) + S(ci + 1, cj) + S(ci + 1, cj + 1) + S(ci, cj + 1));
      }
      Sym t = stress(p.material, eps, Sc);
      int ids[4];
      ops.corner_ids(ci, cj, ids);
      int ln = g.dim == 1 ? 2 : 4;
      for (int a = 0; a < ln; ++a) {
        axx[ids[a]] += t.xx;
        if (g.dim == 2) {
          ayy[ids[a]] += t.yy;
          axy[ids[a]] += t.xy;
        }
        count[ids[a]] += 1;
      }
    }
  for (int k = 0; k < nn; ++k) {
    T.xx[k] = axx[k] / count[k];
    if (g.dim == 2) {
      T.yy[k] = ayy[k] / count[k];
      T.xy[k] = axy[k] / count[k];
    }
  }
  return T;
}

ElasticSolution solve_cg(const ElasticProblem& p, const ScalarField& S, double t,
                         const VectorField* warm) {
  const Grid& g = p.grid;
  const int nn = g.nodes();
  const int nd = g.dim * nn;
  ElementOps ops(g);

  // full displacement vector with Dirichlet values in place
  std::vector<double> u(nd, 0.0);
  std::vector<char> fixed(nd, 0);
  for (int j = 0; j < g.n[1]; ++j)
    for (int i = 0; i < g.n[0]; ++i) {
      if (!is_boundary_node(g, i, j)) continue;
      auto bc = p.boundary(t, g.x(i), g.dim == 2 ? g.y(j) : 0.0);
      int id = g.idx(i, j);
      u[id] = bc[0];
      fixed[id] = 1;
      if (g.dim == 2) {
        u[nn + id] = bc[1];
        fixed[nn + id] = 1;
      }
    }
  if (warm && warm->grid.same_layout(g)) {
    for (int k = 0; k < nd; ++k)
      if (!fixed[k]) u[k] = warm->v[k];
  }

  std::vector<double> f = assemble_rhs(p, ops, S);
  std::vector<double> diag = assemble_diagonal(p, ops);

  // residual r = f - K u over free dofs
  auto residual = [&](const std::vector<double>& uu, std::vector<double>& r) {
    std::fill(r.begin(), r.end(), 0.0);
    add_stiffness_action(p, ops, uu, r);
    for (int k = 0; k < nd; ++k) r[k] = fixed[k] ? 0.0 : f[k] - r[k];
  };

  std::vector<double> r(nd), z(nd), q(nd), pd(nd);
  residual(u, r);

  double fnorm = 0.0;
  {
    // reference scale: rhs with zero interior displacement
    std::vector<double> u0(nd, 0.0), r0(nd);
    for (int k = 0; k < nd; ++k)
      if (fixed[k]) u0[k] = u[k];
    residual(u0, r0);
    for (double v : r0) fnorm += v * v;
    fnorm = std::sqrt(fnorm);
  }
  if (fnorm == 0.0) fnorm = 1.0;

  auto precond = [&](const std::vector<double>& rr, std::vector<double>& zz) {
    for (int k = 0; k < nd; ++k) zz[k] = fixed[k] ? 0.0 : rr[k] / diag[k];
  };

  precond(r, z);
  pd = z;
  double rz = 0.0, rnorm2 = 0.0;
  for (int k = 0; k < nd; ++k) {
    rz += r[k] * z[k];
    rnorm2 += r[k] * r[k];
  }

  const long cap = static_cast<long>(p.iter_cap_factor) * nd;
  std::vector<double> history{std::sqrt(rnorm2)};
  int it = 0;
  while (std::sqrt(rnorm2) > p.rel_tol * fnorm) {
    if (it >= cap) {
      history.push_back(std::sqrt(rnorm2));
      throw SolverDiverged("elasticity CG exceeded iteration cap (" +
                               std::to_string(cap) + "), relative residual " +
                               std::to_string(std::sqrt(rnorm2) / fnorm),
                           history);
    }
    std::fill(q.begin(), q.end(), 0.0);
    add_stiffness_action(p, ops, pd, q);
    for (int k = 0; k < nd; ++k)
      if (fixed[k]) q[k] = 0.0;
    double pq = 0.0;
    for (int k = 0; k < nd; ++k) pq += pd[k] * q[k];
    double alpha = rz / pq;
    rnorm2 = 0.0;
    for (int k = 0; k < nd; ++k) {
      u[k] += alpha * pd[k];
      r[k] -= alpha * q[k];
      rnorm2 += r[k] * r[k];
    }
    precond(r, z);
    double rz_new = 0.0;
    for (int k = 0; k < nd; ++k) rz_new += r[k] * z[k];
    double beta = rz_new / rz;
    rz = rz_new;
    for (int k = 0; k < nd; ++k) pd[k] = z[k] + beta * pd[k];
    ++it;
    if (it % std::max(1, nd / 4) == 0) history.push_back(std::sqrt(rnorm2));
  }

  ElasticSolution sol;
  sol.u = VectorField(g);
  sol.u.v = u;
  sol.T = nodal_stress(p, sol.u, S);
  sol.residual_norm = std::sqrt(rnorm2) / fnorm;
  sol.iterations = it;
  return sol;
}

}  // namespace

ElasticSolution solve_quasistatic(const ElasticProblem& problem, const ScalarField& S,
                                  double t, const VectorField* warm_start,
                                  SolvePath path) {
  const Grid& g = problem.grid;
  if (!S.grid.same_layout(g))
    throw std::invalid_argument("order parameter grid does not match problem grid");
  if (!problem.enabled) {
    ElasticSolution sol;
    sol.u = VectorField(g);
    sol.T = SymTensorField(g);
    return sol;
  }
  if (!problem.boundary)
    throw SingularSystem("boundary displacement data missing");
  for (double v : S.v)
    if (!std::isfinite(v)) throw NumericalError("order parameter not finite");

  if (path == SolvePath::automatic) path = g.dim == 1 ? SolvePath::direct : SolvePath::cg;
  if (path == SolvePath::direct) {
    if (g.dim != 1) throw std::invalid_argument("direct elastic solve is 1D only");
    return solve_direct_1d(problem, S, t);
  }
  return solve_cg(problem, S, t, warm_start);
}

std::vector<Sym> mean_interface_stress(const SymTensorField& T,
                                       const std::vector<LevelSetSample>& samples,
                                       double offset, std::vector<char>* clamped) {
  if (!(offset > 0.0)) throw std::invalid_argument("probe offset must be positive");
  const Grid& g = T.grid;
  ScalarField xx, yy, xy;
  xx.grid = g;
  xx.v = T.xx;
  if (g.dim == 2) {
    yy.grid = g;
    yy.v = T.yy;
    xy.grid = g;
    xy.v = T.xy;
  }
  if (clamped) clamped->assign(samples.size(), 0);

  std::vector<Sym> out;
  out.reserve(samples.size());
  for (size_t s = 0; s < samples.size(); ++s) {
    const auto& ls = samples[s];
    Sym acc;
    for (int side = -1; side <= 1; side += 2) {
      double px = ls.x + side * offset * ls.nx;
      double py = ls.y + side * offset * ls.ny;
      double cx = std::clamp(px, 0.0, g.extent[0]);
      double cy = g.dim == 2 ? std::clamp(py, 0.0, g.extent[1]) : 0.0;
      if ((cx != px || (g.dim == 2 && cy != py)) && clamped) (*clamped)[s] = 1;
      acc.xx += 0.5 * interp(xx, cx, cy);
      if (g.dim == 2) {
        acc.yy += 0.5 * interp(yy, cx, cy);
        acc.xy += 0.5 * interp(xy, cx, cy);
      }
    }
    out.push_back(acc);
  }
  return out;
}

double elastic_stored_energy(const ElasticProblem& p, const VectorField& u,
                             const ScalarField& S) {
  if (!p.enabled) return 0.0;
  const Grid& g = p.grid;
  ElementOps ops(g);
  const int nn = g.nodes();
  const int ln = ops.local_nodes();
  const Sym& eb = p.material.eigenstrain.eps;
  const int cj_end = g.dim == 2 ? g.n[1] - 1 : 1;
  int ids[4];
  double total = 0.0;
  for (int cj = 0; cj < cj_end; ++cj)
    for (int ci = 0; ci < g.n[0] - 1; ++ci) {
      ops.corner_ids(ci, cj, ids);
      for (int k = 0; k < ops.ngp; ++k) {
        double e[3] = {0.0, 0.0, 0.0};
        double Sgp = 0.0;
        for (int a = 0; a < ln; ++a) {
          double ux = u.v[ids[a]];
          e[0] += ops.dNdx[k][a] * ux;
          Sgp += ops.Nval[k][a] * S.v[ids[a]];
          if (g.dim == 2) {
            double uy = u.v[nn + ids[a]];
            e[1] += ops.dNdy[k][a] * uy;
            e[2] += ops.dNdy[k][a] * ux + ops.dNdx[k][a] * uy;
          }
        }
        double ee[3] = {e[0] - eb.xx * Sgp, e[1] - eb.yy * Sgp, e[2] - 2.0 * eb.xy * Sgp};
        double t[3];
        apply_D(p.material.tensor, ee, t);
        total += 0.5 * ops.wJ * (t[0] * ee[0] + t[1] * ee[1] + t[2] * ee[2]);
      }
    }
  return total;
}

double elastic_total_energy(const ElasticProblem& p, const VectorField& u,
                            const ScalarField& S) {
  if (!p.enabled) return 0.0;
  const Grid& g = p.grid;
  ElementOps ops(g);
  const int nn = g.nodes();
  const int ln = ops.local_nodes();
  const int cj_end = g.dim == 2 ? g.n[1] - 1 : 1;
  int ids[4];
  double work = 0.0;
  for (int cj = 0; cj < cj_end; ++cj)
    for (int ci = 0; ci < g.n[0] - 1; ++ci) {
      ops.corner_ids(ci, cj, ids);
      for (int k = 0; k < ops.ngp; ++k) {
        double dot = 0.0;
        for (int a = 0; a < ln; ++a) {
          int aj = g.dim == 2 ? ids[a] / g.n[0] : 0;
          int ai = g.dim == 2 ? ids[a] % g.n[0] : ids[a];
          dot += ops.Nval[k][a] * u.v[ids[a]] * body_force_at(p, 0, ai, aj);
          if (g.dim == 2)
            dot += ops.Nval[k][a] * u.v[nn + ids[a]] * body_force_at(p, 1, ai, aj);
        }
        work += ops.wJ * dot;
      }
    }
  return elastic_stored_energy(p, u, S) - work;
}

}  // namespace pflab
