#include "pflab/level_set.hpp"

#include <cmath>

#include "pflab/errors.hpp"

namespace pflab {

namespace {

struct NodalGeometry {
  ScalarField gx, gy, curv;
  int dim = 1;

  explicit NodalGeometry(const ScalarField& S) {
    const Grid& g = S.grid;
    dim = g.dim;
    VectorField grad = gradient(S);
    gx.grid = g;
    gx.v.assign(grad.plane(0), grad.plane(0) + g.nodes());
    if (dim == 2) {
      gy.grid = g;
      gy.v.assign(grad.plane(1), grad.plane(1) + g.nodes());
      curv = curvature_field(S);
    }
  }

  LevelSetSample sample(double px, double py) const {
    LevelSetSample s;
    s.x = px;
    s.y = py;
    double ax = interp(gx, px, py);
    double ay = dim == 2 ? interp(gy, px, py) : 0.0;
    double mag = std::sqrt(ax * ax + ay * ay);
    s.grad_magnitude = mag;
    if (mag > 0.0) {
      s.nx = ax / mag;
      s.ny = ay / mag;
    } else {
      s.nx = 1.0;  // degenerate crossing; consumers check grad_magnitude
      s.ny = 0.0;
    }
    s.curvature = dim == 2 ? interp(curv, px, py) : 0.0;
    return s;
  }
};

}  // namespace

ScalarField curvature_field(const ScalarField& S) {
  const Grid& g = S.grid;
  ScalarField curv(g);
  if (g.dim == 1) return curv;

  VectorField grad = gradient(S);
  // normalized gradient, zeroed where the gradient is (numerically) flat
  ScalarField nxf(g), nyf(g);
  const double tiny = 1e-14;
  for (int j = 0; j < g.n[1]; ++j)
    for (int i = 0; i < g.n[0]; ++i) {
      double ax = grad.at(0, i, j), ay = grad.at(1, i, j);
      double mag = std::sqrt(ax * ax + ay * ay);
      if (mag > tiny) {
        nxf(i, j) = ax / mag;
        nyf(i, j) = ay / mag;
      }
    }
  for (int j = 0; j < g.n[1]; ++j)
    for (int i = 0; i < g.n[0]; ++i) {
      double div = (refl(nxf, i + 1, j) - refl(nxf, i - 1, j)) / (2.0 * g.h[0]) +
                   (refl(nyf, i, j + 1) - refl(nyf, i, j - 1)) / (2.0 * g.h[1]);
      curv(i, j) = -div;
    }
  return curv;
}

std::vector<LevelSetSample> extract_level_set(const ScalarField& S, double c) {
  const Grid& g = S.grid;
  NodalGeometry geo(S);
  std::vector<LevelSetSample> out;

  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      double a = S(i) - c, b = S(i + 1) - c;
      if ((a > 0.0) == (b > 0.0)) continue;
      double t = a / (a - b);
      out.push_back(geo.sample(g.x(i) + t * g.h[0], 0.0));
    }
    if (out.empty()) throw EmptyLevelSet("no crossing of level " + std::to_string(c));
    return out;
  }

  // marching squares; edges: 0 bottom, 1 right, 2 top, 3 left
  auto edge_point = [&](int i, int j, int e, const double v[4], double* px, double* py) {
    double x0 = g.x(i), y0 = g.y(j);
    switch (e) {
      case 0: *px = x0 + g.h[0] * (c - v[0]) / (v[1] - v[0]); *py = y0; break;
      case 1: *px = x0 + g.h[0]; *py = y0 + g.h[1] * (c - v[1]) / (v[2] - v[1]); break;
      case 2: *px = x0 + g.h[0] * (c - v[3]) / (v[2] - v[3]); *py = y0 + g.h[1]; break;
      default: *px = x0; *py = y0 + g.h[1] * (c - v[0]) / (v[3] - v[0]); break;
    }
  };

  for (int j = 0; j + 1 < g.n[1]; ++j)
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      // corner order: (i,j), (i+1,j), (i+1,j+1), (i,j+1)
      double v[4] = {S(i, j), S(i + 1, j), S(i + 1, j + 1), S(i, j + 1)};
      int mask = (v[0] > c ? 1 : 0) | (v[1] > c ? 2 : 0) | (v[2] > c ? 4 : 0) |
                 (v[3] > c ? 8 : 0);
      if (mask == 0 || mask == 15) continue;

      int segs[2][2];
      int nseg = 1;
      switch (mask) {
        case 1: case 14: segs[0][0] = 3; segs[0][1] = 0; break;
        case 2: case 13: segs[0][0] = 0; segs[0][1] = 1; break;
        case 3: case 12: segs[0][0] = 3; segs[0][1] = 1; break;
        case 4: case 11: segs[0][0] = 1; segs[0][1] = 2; break;
        case 6: case 9:  segs[0][0] = 0; segs[0][1] = 2; break;
        case 7: case 8:  segs[0][0] = 3; segs[0][1] = 2; break;
        case 5: {  // corners (i,j) and (i+1,j+1) above: saddle
          bool center_above = 0.25 * (v[0] + v[1] + v[2] + v[3]) > c;
          if (center_above) { segs[0][0] = 0; segs[0][1] = 1; segs[1][0] = 2; segs[1][1] = 3; }
          else              { segs[0][0] = 3; segs[0][1] = 0; segs[1][0] = 1; segs[1][1] = 2; }
          nseg = 2;
          break;
        }
        default: {  // mask == 10, the other saddle
          bool center_above = 0.25 * (v[0] + v[1] + v[2] + v[3]) > c;
          if (center_above) { segs[0][0] = 3; segs[0][1] = 0; segs[1][0] = 1; segs[1][1] = 2; }
          else              { segs[0][0] = 0; segs[0][1] = 1; segs[1][0] = 2; segs[1][1] = 3; }
          nseg = 2;
          break;
        }
      }
      for (int s = 0; s < nseg; ++s) {
        double ax, ay, bx, by;
        edge_point(i, j, segs[s][0], v, &ax, &ay);
        edge_point(i, j, segs[s][1], v, &bx, &by);
        out.push_back(geo.sample(0.5 * (ax + bx), 0.5 * (ay + by)));
      }
    }
  if (out.empty()) throw EmptyLevelSet("no crossing of level " + std::to_string(c));
  return out;
}

}  // namespace pflab
