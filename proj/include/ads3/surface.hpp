#pragma once

// Spacelike surfaces over the polar grid, the maximal-surface solver, and the
// checks run on its output.
//
// A mesh stores one point of AdS^3 per vertex. Graph meshes also keep the height
// zeta = f(r, theta) of the cylindrical coordinates, which is what the solver moves.
// All derivatives are fourth-order differences of the embedding in (r, theta);
// shape quantities follow from them:
//   I = <X_a, X_b>,  N future unit normal,  II = -<X_ab, N>,  B = I^{-1} II.
// B is I-self-adjoint with eigenvalues k1 >= k2. lambda = (k1 - k2) / 2, which is
// the positive principal curvature once tr B = 0 and stays meaningful (as half the
// eigenvalue gap) on surfaces that are not maximal.
//
// "Core" vertices are those with r <= core_radius. Residuals, curvature sups and
// dilatations are measured there: the outer ring carries Dirichlet data on a
// finite cylinder, and where that data has corners (shear boundaries) the surface
// near the outer ring is not a good proxy for the entire surface.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ads3/boundary.hpp"
#include "ads3/grid.hpp"
#include "ads3/hull.hpp"
#include "ads3/lorentz.hpp"

namespace ads3 {

struct VertexGeometry {
  LorentzVec N;                  // future unit normal
  Eigen::Matrix2d I, II, B;      // in (r, theta) coordinates
  double k1 = 0, k2 = 0;         // eigenvalues of B, k1 >= k2
  double lambda = 0;             // (k1 - k2) / 2
  double H = 0;                  // tr B
};

struct SurfaceMesh {
  PolarGrid grid;
  std::vector<LorentzVec> X;     // by vertex, representatives with <X,X> = -1
  std::vector<double> f;         // heights; empty when the mesh is not a graph
  std::vector<VertexGeometry> geom;  // filled by fundamental_forms
  double core_radius = 0;

  // Solver bookkeeping.
  bool converged = false;
  double residual = 0;           // max |tr B| over rings 0..n_r-1
  int iterations = 0;

  bool is_graph() const { return !f.empty(); }
  std::size_t size() const { return X.size(); }
  bool in_core(std::size_t v) const { return grid.r(grid.ring_of(v)) <= core_radius + 1e-12; }
  std::vector<std::size_t> core_vertices() const;
  // max lambda over core vertices.
  double lambda_sup() const;
  // max |tr B| over rings 0..n_r-1.
  double mean_curvature_sup() const;
};

struct SolverConfig {
  double r_max = 3.0;
  int n_r = 64;
  int n_theta = 128;
  double tol_H = 1e-6;
  int max_iters = 200;
  double damping = 1.0;       // initial pseudo-time step (unit mass matrix)
  double core_radius = -1.0;  // < 0: r_max - 1

  void validate() const;
  double core() const { return core_radius < 0 ? r_max - 1.0 : core_radius; }
};

// Graph mesh zeta = f(r_i, theta_j); f has one entry per vertex.
SurfaceMesh mesh_from_heights(const PolarGrid& g, std::vector<double> f, double core_radius);
// Mesh from arbitrary embedded points (no height field).
SurfaceMesh mesh_from_points(const PolarGrid& g, std::vector<LorentzVec> X, double core_radius);

// Fills geom. Throws NotSpacelike if the induced metric has an eigenvalue <= 1e-8 or
// the normal is not timelike at some vertex.
void fundamental_forms(SurfaceMesh& m);

// Derivatives of the embedding at a vertex (fourth order, mirrored across the pole).
struct EmbeddingJet {
  LorentzVec X, r, t, rr, rt, tt;
};
EmbeddingJet embedding_jet(const SurfaceMesh& m, const Stencils& s, std::size_t v);

// Heights of the outer ring: boundary_height(phi, theta_j). For Mobius phi these
// points lie on a spacelike plane at every radius (the graph's plane with the dual's
// x1, x2 scaled by cosh r_max and x3, x4 by sinh r_max), so the discrete solution
// is a plane up to roundoff.
std::vector<double> dirichlet_data(const CircleHomeo& phi, const PolarGrid& g);

// Maximal graph with outer ring f = boundary_height(phi, theta). Pseudo-transient
// continuation: damped implicit steps of df/dtau = s tr B (s fixed by the sign of the
// Jacobian diagonal so the flow is dissipative), growing to full Newton steps once
// max |tr B| < 10 tol_H. Steps that would lose spacelikeness are cut back. If the
// iteration budget runs out the mesh comes back with converged = false.
SurfaceMesh solve_maximal(const CircleHomeo& phi, const SolverConfig& cfg);
// Same, for explicit outer-ring heights (one per sector).
SurfaceMesh solve_maximal(const std::vector<double>& outer, const SolverConfig& cfg);

// x -> cos(rho) x + sin(rho) N, with fundamental forms measured on the result.
// Throws SingularParallel when det(cos(rho) E + sin(rho) B) < 1e-8 at some vertex.
SurfaceMesh parallel_surface(const SurfaceMesh& m, double rho);
// Closed forms for the parallel surface at distance rho, from I and B of the original.
Eigen::Matrix2d parallel_metric(const Eigen::Matrix2d& I, const Eigen::Matrix2d& B, double rho);
Eigen::Matrix2d parallel_shape(const Eigen::Matrix2d& B, double rho);

struct Residuals {
  double linear_pde = 0;         // max |Lap u - 2u| / max(1, max |u|)
  double hessian_identity = 0;   // max |Hess u - u E - <p,N> B| (I-operator norm) / max(1, max |u|)
  double quasilinear_pde = 0;    // max |Lap chi - 2 (1 - e^{-2 chi})|
  double grad_bound_margin = 0;  // max |grad u|^2 - 2 (1 + sqrt 2) over core vertices with 0 <= u <= 1
  double refined_bound_margin = 0;  // max |grad u|^2 - 2 (u^2 + sqrt 2 u), same vertices
  double scheme_tolerance = 0;   // consistency defect of the difference operators, see below
  int vertices = 0;              // vertices entering the maxima
  int bound_vertices = 0;        // vertices entering the gradient bounds
};

// Local truncation error of the discrete derivatives, read off the mesh itself:
// on the quadric <X_a, X> = 0 and <X_ab, X> = -<X_a, X_b> hold exactly, so the
// largest violation (I-normalized) over core vertices measures how far the
// difference operators are from the continuum ones on this surface.
double scheme_tolerance(const SurfaceMesh& m);

// u = <x, p> for the dual p of P, signed so u >= 0 on the mesh. Residuals of
// Lap u = 2u, of Hess u - u E = <p, N> B (whose coefficient squares to
// 1 - u^2 + |grad u|^2) and of the gradient bound, over core vertices.
// Throws NotSpacelike for non-spacelike P and PlaneIntersectsSurface if u changes sign.
Residuals check_linear_pde(const SurfaceMesh& m, const Plane& P);

// chi = -ln lambda; residual of Lap chi = 2 (1 - e^{-2 chi}) over core vertices whose
// whole stencil has lambda > lambda_min. Throws AllUmbilical if there are none.
Residuals check_quasilinear_pde(const SurfaceMesh& m, double lambda_min = 1e-6);

// Gaussian curvature of the induced metric (Brioschi formula on the discrete metric).
std::vector<double> intrinsic_curvature(const SurfaceMesh& m);
// max over core of |K_int - (-1 - det B)| / (1 + |det B|); -1 - det B = -1 + lambda^2
// on maximal surfaces.
double gauss_defect(const SurfaceMesh& m);

// max over core vertices of |grad v| for v = -ln(1 - lambda).
// Throws CurvatureAtOne if lambda >= 1 - 1e-9 at a core vertex.
double lipschitz_v(const SurfaceMesh& m);

struct CurvatureLine {
  std::vector<AdSPoint> points;
  std::vector<LorentzVec> position;  // representatives continuous along the line; <x,x> = -1
  std::vector<LorentzVec> velocity;  // unit tangent at position, as a vector of R^{2,2}
  std::vector<LorentzVec> normal;    // future unit normal at position
  std::vector<double> lambda;        // half eigenvalue gap at each point
  std::vector<double> k;             // principal curvature being followed
  std::vector<double> s;             // arc length
  std::vector<Eigen::Vector2d> param;  // (u, v) = (r cos theta, r sin theta)
  bool truncated = false;            // left the core before reaching the length
};

// Integrates the unit eigenvector field of B for k1 (sign > 0) or k2 (sign < 0) from
// vertex x0 over the given arc length with RK4 in the Cartesian parameter plane.
// I and II are interpolated (bicubic in r, theta, through the pole mirror) from
// their Cartesian components at the vertices. direction = +1 starts along the
// eigenvector with positive x component (positive y if x vanishes), -1 the other way.
// Stops early, with truncated set, at the edge of the core.
// Throws UmbilicalRegion where 2 lambda < 1e-4.
CurvatureLine trace_curvature_line(const SurfaceMesh& m, std::size_t x0, int sign, double length,
                                   int direction = 1, double step = 0.01);
// Same, from an arbitrary parameter point.
CurvatureLine trace_curvature_line(const SurfaceMesh& m, const Eigen::Vector2d& start, int sign, double length,
                                   int direction = 1, double step = 0.01);

// Residuals along a curvature line of phi' = rho, psi' = k rho, rho' = phi + k psi + alpha,
// with phi = <g, g'(0)>, psi = <N, g'(0)>, rho = <g', g'(0)> and alpha the
// tangential part of g'' against g'(0). Derivatives are central differences in s;
// g'' is differenced from the recorded velocities.
struct LineOdeResidual {
  double phi = 0, psi = 0, rho = 0;
};
LineOdeResidual curvature_line_residual(const CurvatureLine& line);

// Largest signed distance outside the hull of any mesh vertex, in chart coordinates.
double hull_containment(const SurfaceMesh& m, const ConvexHull3& h);

// Wavefront OBJ in chart coordinates, and a table r theta zeta lambda per vertex.
void write_obj(const SurfaceMesh& m, const std::string& path);
void write_table(const SurfaceMesh& m, const std::string& path);

}  // namespace ads3
