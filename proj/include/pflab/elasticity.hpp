#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "pflab/grid.hpp"
#include "pflab/level_set.hpp"
#include "pflab/materials.hpp"

namespace pflab {

/// Boundary displacement, evaluated at boundary nodes: (t, x, y) -> (ux, uy).
using BoundaryDisplacement =
    std::function<std::array<double, 2>(double t, double x, double y)>;

struct ElasticProblem {
  Grid grid;
  MaterialSet material;
  std::array<double, 2> body_force{0.0, 0.0};  // constant volume force
  std::optional<VectorField> body_force_field; // overrides the constant when set
  BoundaryDisplacement boundary;
  bool enabled = true;
  double rel_tol = 1e-10;
  int iter_cap_factor = 20;
};

struct ElasticSolution {
  VectorField u;
  SymTensorField T;
  double residual_norm = 0.0;
  int iterations = 0;
};

enum class SolvePath { automatic, direct, cg };

/// Solve the quasistatic equilibrium -div T = b, T = D(eps(grad u) - eps_bar*S)
/// with Dirichlet data on the whole boundary. The 1D path integrates the
/// discrete system in closed form; the CG path solves the same symmetric
/// positive definite system iteratively (Jacobi preconditioning).
ElasticSolution solve_quasistatic(const ElasticProblem& problem, const ScalarField& S,
                                  double t, const VectorField* warm_start = nullptr,
                                  SolvePath path = SolvePath::automatic);

/// Average of T probed at position +/- offset along the sample normal.
/// Probes leaving the domain are clamped; `clamped` (when given) records which.
std::vector<Sym> mean_interface_stress(const SymTensorField& T,
                                       const std::vector<LevelSetSample>& samples,
                                       double offset,
                                       std::vector<char>* clamped = nullptr);

/// Discrete stored elastic energy of the scheme (no body-force work).
double elastic_stored_energy(const ElasticProblem& problem, const VectorField& u,
                             const ScalarField& S);

/// Stored energy minus body-force work; the solver minimizes this among
/// fields matching the boundary data.
double elastic_total_energy(const ElasticProblem& problem, const VectorField& u,
                            const ScalarField& S);

}  // namespace pflab
