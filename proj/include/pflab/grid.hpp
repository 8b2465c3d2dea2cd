#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace pflab {

/// Uniform structured node grid in 1 or 2 space dimensions.
/// Nodes sit at x_i = i*h[0], y_j = j*h[1]; the domain is
/// [0, extent[0]] x [0, extent[1]].
struct Grid {
  int dim = 1;
  std::array<int, 2> n{2, 1};          // nodes per axis (n[1] == 1 in 1D)
  std::array<double, 2> extent{1.0, 0.0};
  std::array<double, 2> h{1.0, 0.0};

  static Grid line(int nodes, double length);
  static Grid rect(int nx, int ny, double lx, double ly);

  int nodes() const { return n[0] * n[1]; }
  int idx(int i, int j = 0) const { return j * n[0] + i; }
  double x(int i) const { return i * h[0]; }
  double y(int j) const { return j * h[1]; }
  double min_h() const { return dim == 2 ? std::min(h[0], h[1]) : h[0]; }
  bool same_layout(const Grid& o) const {
    return dim == o.dim && n == o.n && extent == o.extent;
  }
};

/// One real value per node.
struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), v(static_cast<size_t>(g.nodes()), fill) {}

  double& operator()(int i, int j = 0) { return v[grid.idx(i, j)]; }
  double operator()(int i, int j = 0) const { return v[grid.idx(i, j)]; }
};

/// dim real components per node, stored as component planes.
struct VectorField {
  Grid grid;
  std::vector<double> v;  // size dim * nodes, component-major

  VectorField() = default;
  explicit VectorField(const Grid& g, double fill = 0.0)
      : grid(g), v(static_cast<size_t>(g.dim) * g.nodes(), fill) {}

  double& at(int comp, int i, int j = 0) {
    return v[static_cast<size_t>(comp) * grid.nodes() + grid.idx(i, j)];
  }
  double at(int comp, int i, int j = 0) const {
    return v[static_cast<size_t>(comp) * grid.nodes() + grid.idx(i, j)];
  }
  double* plane(int comp) { return v.data() + static_cast<size_t>(comp) * grid.nodes(); }
  const double* plane(int comp) const {
    return v.data() + static_cast<size_t>(comp) * grid.nodes();
  }
};

/// Symmetric tensor per node: xx only in 1D; xx, yy, xy in 2D.
struct SymTensorField {
  Grid grid;
  std::vector<double> xx, yy, xy;

  SymTensorField() = default;
  explicit SymTensorField(const Grid& g)
      : grid(g),
        xx(static_cast<size_t>(g.nodes()), 0.0),
        yy(g.dim == 2 ? static_cast<size_t>(g.nodes()) : 0, 0.0),
        xy(g.dim == 2 ? static_cast<size_t>(g.nodes()) : 0, 0.0) {}
};

// Ghost value with even (Neumann) reflection at the boundary.
inline double refl(const ScalarField& f, int i, int j) {
  const auto& n = f.grid.n;
  if (i < 0) i = -i;
  if (i >= n[0]) i = 2 * n[0] - 2 - i;
  if (j < 0) j = -j;
  if (j >= n[1]) j = 2 * n[1] - 2 - j;
  return f.v[f.grid.idx(i, j)];
}

/// Piecewise multilinear interpolation, clamped to the domain.
double interp(const ScalarField& f, double px, double py = 0.0);

/// Second-order central gradient; homogeneous-Neumann ghost reflection
/// makes the boundary-normal component vanish at boundary nodes.
VectorField gradient(const ScalarField& S);

/// 3-point (1D) / 5-point (2D) Laplacian with Neumann ghost reflection.
ScalarField laplacian(const ScalarField& S);

/// Godunov upwind approximation of |grad S| for front propagation.
/// speed_sign holds (the sign of) the local rate S_t / |grad S|:
/// nonnegative entries select the S-increasing branch.
ScalarField grad_norm_godunov(const ScalarField& S, const ScalarField& speed_sign);

}  // namespace pflab
