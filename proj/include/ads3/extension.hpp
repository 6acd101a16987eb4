#pragma once

// The minimal Lagrangian extension read off a maximal surface.
//
// For each vertex x the tangent plane T_x S is carried onto the reference plane
// P_ref = {x4 = 0} by two isometries: one sends every ideal point of T_x S to the
// ideal point of P_ref on the same left ruling line (theta_l kept), the other uses
// the right ruling (theta_r kept). Applying them to x itself gives y_l and y_r in
// P_ref, recorded in Poincare disk coordinates. The sampled map y_l -> y_r extends
// the boundary map phi (theta_l -> theta_r on gr(phi)).

#include <string>
#include <vector>

#include "ads3/boundary.hpp"
#include "ads3/lorentz.hpp"
#include "ads3/surface.hpp"

namespace ads3 {

enum class Side { Left, Right };

struct RulingIsometry {
  Isometry iso;
  Side side = Side::Left;
  std::size_t source_vertex = 0;
};

// Isometry taking the spacelike plane through x with unit timelike normal N onto
// P_ref along the chosen ruling, N to (0, 0, 0, 1). Built from three ideal points of
// the plane and checked on them. Throws DegenerateTangentPlane if N is not a unit
// timelike vector orthogonal to x.
Isometry ruling_isometry(const LorentzVec& x, const LorentzVec& N, Side side);
RulingIsometry ruling_isometry(const SurfaceMesh& m, std::size_t vertex, Side side);

// Point of P_ref (x4 = 0, x3 > 0) in the Poincare disk.
Eigen::Vector2d to_disk(const LorentzVec& y);

struct SampledMap {
  std::vector<Eigen::Vector2d> y_l, y_r;  // by vertex
  // Largest relative deviation over core vertices (metric operator norm) of the
  // measured pull-backs of the disk metric from I((E + JB).,(E + JB).) and
  // I((E - JB).,(E - JB).). J is rotation by +pi/2 in I for the (r, theta) orientation.
  double pullback_left = 0, pullback_right = 0;
};

// Throws CurvatureAtOne if lambda >= 1 - 1e-6 at some core vertex.
SampledMap ml_map(const SurfaceMesh& m);

struct DilatationField {
  std::vector<double> K_formula;   // ((1 + lambda) / (1 - lambda))^2, capped at 1e8
  std::vector<double> K_measured;  // sigma_max / sigma_min of d(y_r) d(y_l)^{-1}, capped at 1e8
  std::vector<double> jacobian;    // hyperbolic area ratio of the sampled map
  double K_sup = 1;                // max K_formula over core vertices
  double K_measured_sup = 1;
  double median_rel_error = 0, max_rel_error = 0;  // |K_measured - K_formula| / K_formula over core
  double max_jacobian_error = 0;                   // max |jacobian - 1| over core
  bool capped = false;             // some lambda reached 1 (CurvatureAtOne flag)
};

// ((1 + lambda) / (1 - lambda))^2 for 0 <= lambda < 1, capped at 1e8.
double dilatation_formula(double lambda);

// K_formula and K_measured are zero outside the core, where they are not evaluated.
DilatationField dilatation(const SurfaceMesh& m, const SampledMap& s);

// Largest |arg y_r - phi(arg y_l)| (mod 2 pi) over the outermost ring. The sampled map
// only reaches the circle in the limit, so this is O(1 - |y|) on a finite domain and
// shrinks as r_max grows.
double boundary_trace_error(const SurfaceMesh& m, const SampledMap& s, const CircleHomeo& phi);

// vertex y_l.x y_l.y y_r.x y_r.y K_formula K_measured, one row per vertex.
void write_map_table(const SampledMap& s, const DilatationField& d, const std::string& path);

}  // namespace ads3
