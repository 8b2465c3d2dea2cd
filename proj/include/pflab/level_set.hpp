#pragma once

#include <vector>

#include "pflab/grid.hpp"

namespace pflab {

/// One point on the level set {S = c}: position, unit normal grad S/|grad S|,
/// curvature -div(grad S/|grad S|) (0 in 1D) and |grad S| at the crossing.
struct LevelSetSample {
  double x = 0.0, y = 0.0;
  double nx = 0.0, ny = 0.0;
  double curvature = 0.0;
  double grad_magnitude = 0.0;
};

/// Nodal curvature field -div(grad S/|grad S|) (2D; zero field in 1D).
ScalarField curvature_field(const ScalarField& S);

/// Extract {S = c}. 1D: linear interpolation between sign-change node pairs.
/// 2D: marching squares, one sample per segment midpoint; ambiguous saddles
/// are resolved by the cell-average value. Throws EmptyLevelSet when no
/// crossing exists.
std::vector<LevelSetSample> extract_level_set(const ScalarField& S, double c);

}  // namespace pflab
