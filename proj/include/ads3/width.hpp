#pragma once

// Width of the convex hull of a boundary curve: the longest timelike segment
// contained in the hull, equivalently the largest separation between a point of
// the past boundary and a point of the future boundary.
//
// Geodesics are straight lines in the affine chart, so a timelike segment in the
// hull extends to a chord of the hull with endpoints on the past and future
// boundaries. The search maximizes chord length over timelike lines.

#include "ads3/boundary.hpp"
#include "ads3/hull.hpp"

namespace ads3 {

struct WidthConfig {
  int samples = 512;       // starting sample count for the homeomorphism overload
  double tol = 1e-9;       // refinement stops once doubling changes the value by <= tol
  int max_iters = 4;       // doublings
  int starts = 24;         // local chord searches seeded from the coarse pair scan
  int scan_points = 4096;  // cap on coarse scan points per side
  int alternations = 8192;  // cap on alternating-refinement runs, best scan pairs first
  long max_evals = 400000;  // per hull
};

struct WidthEstimate {
  double value = 0;
  // Chord endpoints, p on the past boundary and q on the future boundary.
  LorentzVec p, q;
  Eigen::Vector3d p_chart = Eigen::Vector3d::Zero(), q_chart = Eigen::Vector3d::Zero();
  int samples = 0;
  int iterations = 0;
  double last_increment = 0;
  bool degenerate = false;  // flat hull
  bool flagged = false;     // refinement did not settle within max_iters
  long evaluations = 0;
};

// Width of the hull of the given samples. No refinement.
WidthEstimate width_estimate(const BoundaryCurve& c, const WidthConfig& cfg);
WidthEstimate width_estimate(const ConvexHull3& h, const WidthConfig& cfg);
// Doubles the sample count from cfg.samples (>= 64) until the value moves by at
// most cfg.tol. Sample sets are nested, so the sequence of hulls is increasing and
// each level is seeded with the previous witness chord.
WidthEstimate width_estimate(const CircleHomeo& phi, const WidthConfig& cfg);

// Chord of the hull along the line through chart points a and b, oriented so lo is
// the past end when the line is timelike. length is 0 when the line misses the hull.
struct Chord {
  Eigen::Vector3d lo, hi;
  double length = 0;  // timelike length, 0 when the chord is not timelike
  double miss = 0;    // > 0 when the line misses the hull: gap in the line parameter
  int lo_facet = -1, hi_facet = -1;
};
Chord hull_chord(const ConvexHull3& h, const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// Timelike separation of two chart points, 0 if not timelike separated.
double chart_separation(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// True iff every sample lies strictly on one side of the plane.
bool support_plane_disjoint(const Plane& P, const BoundaryCurve& c);

}  // namespace ads3
