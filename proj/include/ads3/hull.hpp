#pragma once

// Euclidean convex hull of boundary samples in the affine chart
// (x, y, z) = (x1/x3, x2/x3, x4/x3), and the causal classification of its facets.
//
// In this chart the future direction at (x, y, z) is (x z, y z, 1 + z^2), the image
// of the time field, and the plane n . X = c is the Lorentz-orthogonal complement
// of (n_x, n_y, c, -n_z).

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "ads3/lorentz.hpp"

namespace ads3 {

enum class FacetClass { Past, Future, Lateral };
const char* to_string(FacetClass c);

struct HullFacet {
  std::array<int, 3> v;          // counterclockwise seen from outside
  Eigen::Vector3d normal;        // outward, unit
  double offset = 0;             // normal . X = offset on the facet
  std::array<int, 3> neighbor;   // neighbor[k] shares the edge (v[k], v[k+1])
};

struct ConvexHull3 {
  std::vector<Eigen::Vector3d> points;  // input, indexed by the facets
  std::vector<HullFacet> facets;
  std::vector<FacetClass> facet_class;  // filled by classify_facets
  bool degenerate = false;              // coplanar input: no facets
  double thickness = 0;                 // extent of the input normal to its best initial plane
  double eps = 0;                       // visibility tolerance used by the construction
  Eigen::Vector3d flat_normal = Eigen::Vector3d::Zero();
  double flat_offset = 0;

  // Largest n . X - offset over facets (<= 0 inside).
  double signed_distance(const Eigen::Vector3d& x) const;
  // Euclidean distance to the nearest facet triangle.
  double boundary_distance(const Eigen::Vector3d& x) const;
  std::vector<int> vertex_indices() const;
};

// Quickhull. Needs at least 4 points (TooFewPoints). Input thinner than 1e-9
// returns a degenerate hull with the supporting plane recorded.
ConvexHull3 convex_hull(const std::vector<Eigen::Vector3d>& points);

// Past: the hull lies in the future of the facet. Throws ClassificationAmbiguous
// when a support plane is timelike beyond tol.
std::vector<FacetClass> classify_facets(const ConvexHull3& h, double tol = 1e-9);

// (n_x, n_y, offset, -n_z): Lorentz dual of the facet's plane.
LorentzVec facet_dual(const HullFacet& f);

inline LorentzVec chart_lift(const Eigen::Vector3d& x) { return {x.x(), x.y(), 1.0, x.z()}; }

}  // namespace ads3
