#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <string>

#include "ads3/errors.hpp"
#include "ads3/surface.hpp"
#include "ads3/width.hpp"
#include "oracles.hpp"

using namespace ads3;

namespace {

SolverConfig config(int n_r, int n_theta, double r_max = 3.0) {
  SolverConfig c;
  c.r_max = r_max;
  c.n_r = n_r;
  c.n_theta = n_theta;
  return c;
}

// Solves are shared between tests; each key is solved once per process.
const SurfaceMesh& shear_mesh(double t, int n_r, int n_theta, double r_max = 3.0) {
  static std::map<std::tuple<double, int, int, double>, SurfaceMesh> cache;
  const auto key = std::make_tuple(t, n_r, n_theta, r_max);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, solve_maximal(CircleHomeo::shear(t), config(n_r, n_theta, r_max))).first;
  return it->second;
}

SurfaceMesh flat_mesh(int n_r = 32, int n_theta = 64) {
  const PolarGrid g = PolarGrid::make(3.0, n_r, n_theta);
  SurfaceMesh m = mesh_from_heights(g, std::vector<double>(g.size(), 0.0), 2.0);
  fundamental_forms(m);
  return m;
}

// Points at Lorentzian distance d from the plane x4 = 0, on the side of -(0,0,0,1),
// parameterized by the foot point (r, theta) on the plane.
SurfaceMesh equidistant_mesh(double d, int n_r = 32, int n_theta = 64) {
  const PolarGrid g = PolarGrid::make(3.0, n_r, n_theta);
  std::vector<LorentzVec> X(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const double r = g.r(g.ring_of(v)), t = g.theta(g.sector_of(v));
    const LorentzVec x0{std::sinh(r) * std::cos(t), std::sinh(r) * std::sin(t), std::cosh(r), 0.0};
    X[v] = std::cos(d) * x0 - std::sin(d) * LorentzVec{0, 0, 0, 1};
  }
  SurfaceMesh m = mesh_from_points(g, std::move(X), 2.0);
  fundamental_forms(m);
  return m;
}

Plane level_plane(double z) { return Plane::from_dual({0.0, 0.0, -std::sin(z), std::cos(z)}); }

double max_height(const SurfaceMesh& m) { return *std::max_element(m.f.begin(), m.f.end()); }

// Largest |eigenvalue| of I^{-1} S, written out independently of the library helper.
double op_norm(const Eigen::Matrix2d& I, const Eigen::Matrix2d& S) {
  const Eigen::Matrix2d L = I.llt().matrixL();
  const Eigen::Matrix2d Li = L.inverse();
  const Eigen::Matrix2d M = Li * S * Li.transpose();
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(0.5 * (M + M.transpose())).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

// ---------- fundamental forms ----------

TEST(FundamentalForms, PlaneHasZeroShapeOperator) {
  const SurfaceMesh m = flat_mesh();
  for (const VertexGeometry& v : m.geom) {
    EXPECT_LT(v.B.cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(v.lambda, 1e-6);
    EXPECT_NEAR(inner(v.N, v.N), -1.0, 1e-12);
  }
}

TEST(FundamentalForms, TiltedPlaneHasZeroShapeOperator) {
  LorentzVec p{0.3, -0.2, 1.0, 0.1};
  p = p / std::sqrt(-inner(p, p));
  const PolarGrid g = PolarGrid::make(3.0, 32, 64);
  std::vector<double> f(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) f[v] = oracle::plane_height(p, g.r(g.ring_of(v)), g.theta(g.sector_of(v)), 0.0);
  SurfaceMesh m = mesh_from_heights(g, std::move(f), 2.0);
  fundamental_forms(m);
  for (std::size_t v = 0; v < m.size(); ++v) {
    EXPECT_LT(m.geom[v].B.cwiseAbs().maxCoeff(), 1e-6) << "vertex " << v;
    // The normal is the plane's dual up to sign.
    EXPECT_NEAR(std::abs(inner(m.geom[v].N, p)), 1.0, 1e-8);
  }
}

TEST(FundamentalForms, NormalIsOrthogonalToTangents) {
  const SurfaceMesh& m = shear_mesh(1.0, 64, 128);
  const Stencils s(m.grid);
  for (std::size_t v = 0; v < m.size(); v += 7) {
    const EmbeddingJet J = embedding_jet(m, s, v);
    EXPECT_LT(std::abs(inner(m.geom[v].N, J.r)) / std::sqrt(inner(J.r, J.r)), 1e-6);
    EXPECT_LT(std::abs(inner(m.geom[v].N, J.t)) / std::sqrt(inner(J.t, J.t)), 1e-6);
    EXPECT_TRUE(is_future(m.X[v], m.geom[v].N));
  }
}

TEST(FundamentalForms, EquidistantSurfaceIsUmbilical) {
  const double d = 0.3;
  const SurfaceMesh m = equidistant_mesh(d);
  const double tol = 10 * scheme_tolerance(m);
  for (std::size_t v : m.core_vertices()) {
    EXPECT_LT(op_norm(m.geom[v].I, m.geom[v].II - std::tan(d) * m.geom[v].I), tol) << "vertex " << v;
    EXPECT_LT(m.geom[v].lambda, tol);
  }
}

TEST(FundamentalForms, SteepGraphIsNotSpacelike) {
  const PolarGrid g = PolarGrid::make(3.0, 16, 32);
  std::vector<double> f(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) f[v] = 3.0 * g.r(g.ring_of(v)) * std::cos(g.theta(g.sector_of(v)));
  SurfaceMesh m = mesh_from_heights(g, std::move(f), 2.0);
  EXPECT_THROW(
      {
        try {
          fundamental_forms(m);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::NotSpacelike);
          throw;
        }
      },
      Error);
}

TEST(FundamentalForms, GaussRelationOnShear) {
  for (double t : {0.5, 1.0, 2.0}) {
    const SurfaceMesh& m = shear_mesh(t, 64, 128);
    ASSERT_TRUE(m.converged);
    EXPECT_LT(gauss_defect(m), 0.02) << "shear " << t;
  }
}

TEST(FundamentalForms, GaussRelationOnPlaneAndEquidistant) {
  // K = -1 - det B: -1 on the plane, -1 - tan^2 d on the equidistant surface.
  EXPECT_LT(gauss_defect(flat_mesh()), 1e-4);
  EXPECT_LT(gauss_defect(equidistant_mesh(0.3)), 1e-3);
}

// ---------- solver ----------

TEST(Solver, ConfigValidation) {
  for (const SolverConfig& c : {config(15, 64), config(16, 31), config(16, 33), config(16, 64, 1.5)})
    EXPECT_THROW(
        {
          try {
            solve_maximal(CircleHomeo::shear(1.0), c);
          } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
            throw;
          }
        },
        Error);
}

TEST(Solver, MobiusGivesTotallyGeodesicPlane) {
  const CircleHomeo phi = CircleHomeo::mobius(Mobius::dilation(0.7) * Mobius::rotation(0.4));
  const SurfaceMesh m = solve_maximal(phi, config(64, 128));
  ASSERT_TRUE(m.converged);
  EXPECT_LT(m.lambda_sup(), 1e-6);
  EXPECT_LE(m.residual, 1e-6);
  // The plane through three outer-ring points carries every vertex.
  const PolarGrid& g = m.grid;
  const int n = g.n_theta;
  const LorentzVec q = oracle::plane_through(m.X[g.index(g.n_r, 0)], m.X[g.index(g.n_r, n / 3)],
                                             m.X[g.index(g.n_r, 2 * n / 3)]);
  for (std::size_t v = 0; v < m.size(); ++v) {
    const double expect = oracle::plane_height(q, g.r(g.ring_of(v)), g.theta(g.sector_of(v)), m.f[v]);
    EXPECT_NEAR(m.f[v], expect, 1e-8) << "vertex " << v;
  }
}

TEST(Solver, Shear1ConvergesAtDefaultResolution) {
  const auto t0 = std::chrono::steady_clock::now();
  const SurfaceMesh m = solve_maximal(CircleHomeo::shear(1.0), config(64, 128));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_TRUE(m.converged);
  EXPECT_LE(m.residual, 1e-6);
  EXPECT_LT(secs, 120.0);
  // Golden value of the first solve; a change beyond roundoff means the scheme changed.
  EXPECT_NEAR(m.lambda_sup(), 0.21294193, 2e-7);
  for (std::size_t v = 0; v < m.size(); ++v)
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m.geom[v].I).eigenvalues()[0], 1e-8);
}

TEST(Solver, RefinementChangesLambdaLittle) {
  const double coarse = shear_mesh(1.0, 64, 128).lambda_sup();
  const SurfaceMesh& fine = shear_mesh(1.0, 128, 256);
  ASSERT_TRUE(fine.converged);
  EXPECT_LT(std::abs(fine.lambda_sup() - coarse) / fine.lambda_sup(), 0.05);
}

TEST(Solver, DirichletRingHoldsBoundaryHeights) {
  const SurfaceMesh& m = shear_mesh(1.0, 64, 128);
  for (int j = 0; j < m.grid.n_theta; ++j)
    EXPECT_EQ(m.f[m.grid.index(m.grid.n_r, j)], boundary_height(CircleHomeo::shear(1.0), m.grid.theta(j)));
}

TEST(Solver, HeightShiftIsEquivariant) {
  // zeta -> zeta + b acts on the boundary map as phi -> R_{-b} o phi o R_{-b}.
  const double b = 0.3;
  const CircleHomeo phi = CircleHomeo::shear(0.5);
  const CircleHomeo R = CircleHomeo::mobius(Mobius::rotation(-b));
  const SurfaceMesh m = solve_maximal(phi, config(32, 64));
  const SurfaceMesh s = solve_maximal(CircleHomeo::compose({R, phi, R}), config(32, 64));
  ASSERT_TRUE(m.converged && s.converged);
  for (std::size_t v = 0; v < m.size(); ++v) EXPECT_NEAR(s.f[v], m.f[v] + b, 1e-7);
}

TEST(Solver, AxisRotationIsEquivariant) {
  // theta -> theta + a acts as phi -> R_a o phi o R_{-a}; a is a whole number of sectors.
  const int shift = 8;
  const PolarGrid g = PolarGrid::make(3.0, 32, 64);
  const double a = shift * g.dtheta;
  const CircleHomeo phi = CircleHomeo::shear(0.5);
  const CircleHomeo rotated = CircleHomeo::compose(
      {CircleHomeo::mobius(Mobius::rotation(a)), phi, CircleHomeo::mobius(Mobius::rotation(-a))});
  const SurfaceMesh m = solve_maximal(phi, config(32, 64));
  const SurfaceMesh s = solve_maximal(rotated, config(32, 64));
  for (int i = 0; i < g.rings(); ++i)
    for (int j = 0; j < g.n_theta; ++j) EXPECT_NEAR(s.f[g.index(i, j + shift)], m.f[g.index(i, j)], 1e-7);
}

TEST(Solver, BudgetExhaustionReturnsFlaggedMesh) {
  SolverConfig c = config(32, 64);
  c.max_iters = 1;
  const SurfaceMesh m = solve_maximal(CircleHomeo::shear(1.0), c);
  EXPECT_FALSE(m.converged);
  EXPECT_EQ(m.iterations, 1);
  EXPECT_GT(m.residual, c.tol_H);
}

TEST(Solver, FlatBoundaryGivesFlatSlice) {
  const SurfaceMesh m = solve_maximal(CircleHomeo::mobius(Mobius::identity()), config(16, 32));
  ASSERT_TRUE(m.converged);
  for (double f : m.f) EXPECT_EQ(f, 0.0);
}

// ---------- parallel surfaces ----------

TEST(Parallel, ZeroDistanceIsIdentity) {
  const SurfaceMesh& m = shear_mesh(1.0, 64, 128);
  const SurfaceMesh p = parallel_surface(m, 0.0);
  for (std::size_t v = 0; v < m.size(); ++v) {
    EXPECT_EQ(p.X[v].x1, m.X[v].x1);
    EXPECT_EQ(p.X[v].x4, m.X[v].x4);
  }
}

TEST(Parallel, PlaneGivesUmbilicalSurface) {
  const SurfaceMesh m = flat_mesh(64, 128);
  for (double d : {0.2, -0.5}) {
    // Closed form with B = 0.
    EXPECT_LT((parallel_shape(Eigen::Matrix2d::Zero(), d) + std::tan(d) * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(),
              1e-12);
    // Measured on the offset mesh.
    const SurfaceMesh p = parallel_surface(m, d);
    const double tol = 2 * std::max(scheme_tolerance(p), 1e-6);
    for (std::size_t v : p.core_vertices())
      EXPECT_LT((p.geom[v].B + std::tan(d) * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), tol) << "vertex " << v;
  }
}

TEST(Parallel, SingularDistanceThrows) {
  const SurfaceMesh m = flat_mesh(16, 32);
  EXPECT_THROW(
      {
        try {
          parallel_surface(m, kPi / 2);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::SingularParallel);
          throw;
        }
      },
      Error);
}

TEST(Parallel, MeasuredFormsMatchClosedForms) {
  const SurfaceMesh& m = shear_mesh(1.0, 64, 128);
  const double lambda0 = m.lambda_sup(), rho = std::atan(lambda0);
  const SurfaceMesh p = parallel_surface(m, rho);
  const double tol = 2 * std::max(scheme_tolerance(m), scheme_tolerance(p));
  std::size_t top = 0;
  for (std::size_t v : m.core_vertices()) {
    if (m.geom[v].lambda > m.geom[top].lambda) top = v;
    const Eigen::Matrix2d I = parallel_metric(m.geom[v].I, m.geom[v].B, rho);
    const Eigen::Matrix2d B = parallel_shape(m.geom[v].B, rho);
    EXPECT_LT(op_norm(I, p.geom[v].I - I), tol) << "vertex " << v;
    // B is I-self-adjoint, so I B is symmetric and its I-norm is that of B.
    const Eigen::Matrix2d dB = I * (p.geom[v].B - B);
    EXPECT_LT(op_norm(I, 0.5 * (dB + dB.transpose())), tol) << "vertex " << v;
  }
  // lambda_rho = tan(rho0 - rho) with lambda = tan(rho0): zero where lambda is largest.
  EXPECT_LT(std::abs(p.geom[top].k1), tol);
  EXPECT_NEAR(p.geom[top].k2, std::tan(-2 * rho), tol);
}

// ---------- linear PDE and gradient bound ----------

TEST(LinearPde, CoshOnTotallyGeodesicPlane) {
  // u = <x, p> = -cos(c) cosh r with p = (0, 0, cos c, sin c); Lap cosh r = 2 cosh r.
  const SurfaceMesh m = flat_mesh();
  for (double c : {0.2, 0.9}) {
    const Residuals r = check_linear_pde(m, Plane::from_dual({0.0, 0.0, std::cos(c), std::sin(c)}));
    EXPECT_LT(r.linear_pde, 1e-5) << "c = " << c;
    EXPECT_LT(r.hessian_identity, 1e-5);
  }
}

TEST(LinearPde, IdentitiesHoldOnShearMeshes) {
  for (double t : {0.5, 1.0, 2.0}) {
    const SurfaceMesh& m = shear_mesh(t, 64, 128);
    const double tol = 10 * scheme_tolerance(m);
    const double top = max_height(m);
    std::vector<Plane> planes;
    for (double c : {0.05, 0.3, 0.8}) planes.push_back(level_plane(top + c));
    // Tilted planes, well above the surface.
    for (double a : {0.2, -0.3}) {
      LorentzVec p{a, 0.5 * a, -std::sin(top + 1.2), std::cos(top + 1.2)};
      planes.push_back(Plane::from_dual(p / std::sqrt(-inner(p, p))));
    }
    for (const Plane& P : planes) {
      const Residuals r = check_linear_pde(m, P);
      EXPECT_LT(r.linear_pde, tol) << "shear " << t;
      EXPECT_LT(r.hessian_identity, tol) << "shear " << t;
      EXPECT_LT(r.grad_bound_margin, -1e-6) << "shear " << t;
      EXPECT_GT(r.vertices, 0);
    }
  }
}

TEST(LinearPde, RejectsIntersectingAndTimelikePlanes) {
  const SurfaceMesh& m = shear_mesh(1.0, 64, 128);
  // The level plane through the middle height separates the top from the bottom.
  const auto range = std::minmax_element(m.f.begin(), m.f.end());
  const Plane middle = level_plane(0.5 * (*range.first + *range.second));
  EXPECT_THROW(
      {
        try {
          check_linear_pde(m, middle);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::PlaneIntersectsSurface);
          throw;
        }
      },
      Error);
  EXPECT_THROW(check_linear_pde(m, Plane::from_dual({1.0, 0.0, 0.0, 0.0})), Error);
}

// ---------- quasilinear PDE ----------

TEST(QuasilinearPde, PlaneIsAllUmbilical) {
  EXPECT_THROW(
      {
        try {
          check_quasilinear_pde(flat_mesh());
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::AllUmbilical);
          throw;
        }
      },
      Error);
}

TEST(QuasilinearPde, ResidualConvergesAtSchemeOrder) {
  const Residuals coarse = check_quasilinear_pde(shear_mesh(1.0, 64, 128));
  const Residuals fine = check_quasilinear_pde(shear_mesh(1.0, 128, 256));
  // Fourth-order operators: halving h should cut the residual by about 16. The
  // scheme tolerance itself drops by the same factor.
  const double order = std::log2(coarse.quasilinear_pde / fine.quasilinear_pde);
  const double scheme_order = std::log2(coarse.scheme_tolerance / fine.scheme_tolerance);
  EXPECT_GT(order, 3.0);
  EXPECT_GT(order, scheme_order - 0.5);
  EXPECT_GT(fine.vertices, coarse.vertices);
  // Regression value at 128 x 256.
  EXPECT_LT(fine.quasilinear_pde, 0.05);
}

// ---------- v = -ln(1 - lambda) ----------

TEST(Lipschitz, PlaneIsZero) { EXPECT_EQ(lipschitz_v(flat_mesh()), 0.0); }

TEST(Lipschitz, ShearFamilySharesABound) {
  double lo = 1e9, hi = 0;
  for (double t : {0.5, 1.0, 2.0}) {
    const double M = lipschitz_v(shear_mesh(t, 64, 128));
    EXPECT_TRUE(std::isfinite(M));
    lo = std::min(lo, M);
    hi = std::max(hi, M);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
}

TEST(Lipschitz, IntegratedBoundHoldsOnVertexPairs) {
  const SurfaceMesh& m = shear_mesh(1.0, 64, 128);
  const PolarGrid& g = m.grid;
  const double M = lipschitz_v(m) + 0.05;
  const std::vector<std::size_t> core = m.core_vertices();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, core.size() - 1);
  for (int k = 0; k < 300; ++k) {
    const std::size_t p = core[pick(rng)], q = core[pick(rng)];
    // Length of the coordinate path: radially along p's sector, then around q's ring.
    // It bounds the intrinsic distance from above, which only weakens the inequality.
    const int ip = g.ring_of(p), jp = g.sector_of(p), iq = g.ring_of(q), jq = g.sector_of(q);
    double len = 0;
    for (int i = std::min(ip, iq); i < std::max(ip, iq); ++i)
      len += 0.5 * g.h *
             (std::sqrt(m.geom[g.index(i, jp)].I(0, 0)) + std::sqrt(m.geom[g.index(i + 1, jp)].I(0, 0)));
    int dj = g.wrap(jq - jp);
    int step = 1;
    if (dj > g.n_theta / 2) dj = g.n_theta - dj, step = -1;
    for (int s = 0; s < dj; ++s) {
      const int j = jp + step * s;
      len += 0.5 * g.dtheta *
             (std::sqrt(m.geom[g.index(iq, j)].I(1, 1)) + std::sqrt(m.geom[g.index(iq, j + step)].I(1, 1)));
    }
    EXPECT_LE(1 - m.geom[q].lambda, std::exp(M * len) * (1 - m.geom[p].lambda) + 1e-12);
  }
}

// ---------- curvature lines ----------

TEST(CurvatureLines, UmbilicalSurfaceThrows) {
  const SurfaceMesh m = equidistant_mesh(0.3);
  EXPECT_THROW(
      {
        try {
          trace_curvature_line(m, m.grid.index(5, 3), 1, 0.5);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::UmbilicalRegion);
          throw;
        }
      },
      Error);
}

TEST(CurvatureLines, TracedDataSolvesTheLineSystem) {
  const SurfaceMesh& m = shear_mesh(2.0, 64, 128);
  const std::size_t x0 = m.grid.index(16, 16);
  for (int sign : {1, -1}) {
    const CurvatureLine L = trace_curvature_line(m, x0, sign, 1.0);
    ASSERT_FALSE(L.truncated);
    ASSERT_EQ(L.points.size(), 101u);
    // Initial conditions phi(0) = 0, psi(0) = 0, rho(0) = 1.
    EXPECT_NEAR(inner(L.position[0], L.velocity[0]), 0.0, 1e-6);
    EXPECT_NEAR(inner(L.normal[0], L.velocity[0]), 0.0, 1e-6);
    EXPECT_NEAR(inner(L.velocity[0], L.velocity[0]), 1.0, 1e-12);
    const LineOdeResidual r = curvature_line_residual(L);
    EXPECT_LT(r.phi, 1e-3);
    EXPECT_LT(r.psi, 1e-3);
    EXPECT_LT(r.rho, 1e-3);
    // k = +-lambda up to tr B of the interpolated forms (bicubic error, about 1e-6 here).
    for (std::size_t i = 0; i < L.k.size(); ++i) EXPECT_NEAR(L.k[i], sign * L.lambda[i], 1e-5);
  }
}

TEST(CurvatureLines, ReversedLineRetraces) {
  const SurfaceMesh& m = shear_mesh(2.0, 64, 128);
  const std::size_t x0 = m.grid.index(16, 16);
  const CurvatureLine L = trace_curvature_line(m, x0, 1, 0.8);
  const std::size_t n = L.param.size();
  // The canonical orientation has a positive x component; go against the final heading.
  const Eigen::Vector2d heading = L.param[n - 1] - L.param[n - 2];
  const CurvatureLine B = trace_curvature_line(m, L.param.back(), 1, L.s.back(), heading.x() > 0 ? -1 : 1);
  EXPECT_LT((B.param.back() - L.param.front()).norm(), 1e-6);
}

TEST(CurvatureLines, PointsStayOverTheirParameters) {
  const SurfaceMesh& m = shear_mesh(2.0, 64, 128);
  const CurvatureLine L = trace_curvature_line(m, m.grid.index(10, 40), -1, 0.6);
  for (std::size_t i = 0; i < L.position.size(); ++i) {
    const LorentzVec& x = L.position[i];
    EXPECT_NEAR(inner(x, x), -1.0, 1e-12);
    // The cylindrical radius of the point is the length of its parameter.
    EXPECT_NEAR(std::asinh(std::hypot(x.x1, x.x2)), L.param[i].norm(), 1e-5);
  }
}

TEST(CurvatureLines, StopsAtTheCoreEdge) {
  const SurfaceMesh& m = shear_mesh(2.0, 64, 128);
  const CurvatureLine L = trace_curvature_line(m, m.grid.index(38, 16), 1, 5.0);
  EXPECT_TRUE(L.truncated);
  EXPECT_LT(L.s.back(), 5.0);
  for (const Eigen::Vector2d& p : L.param) EXPECT_LE(p.norm(), m.core_radius + 1e-12);
}

// ---------- hull containment ----------

TEST(Hull, PlaneInsideFlatHull) {
  const ConvexHull3 h = convex_hull(graph_samples(CircleHomeo::mobius(Mobius::identity()), 256).chart_points);
  ASSERT_TRUE(h.degenerate);
  EXPECT_LT(hull_containment(flat_mesh(), h), 1e-12);
}

TEST(Hull, Shear1InsideSampledHull) {
  // The outer ring sits on a finite cylinder, so vertices there can stick out of the
  // ideal hull by an amount that decays with r_max; at r_max = 4 it is below 1e-3.
  const CircleHomeo phi = CircleHomeo::shear(1.0);
  const ConvexHull3 h = convex_hull(graph_samples(phi, 1024).chart_points);
  const double at3 = hull_containment(shear_mesh(1.0, 64, 128), h);
  const double at4 = hull_containment(shear_mesh(1.0, 86, 128, 4.0), h);
  EXPECT_LT(at4, 1e-3);
  EXPECT_LT(at4, at3);
}

// ---------- export ----------

TEST(Export, ObjAndTableLayout) {
  const SurfaceMesh m = solve_maximal(CircleHomeo::shear(0.5), config(16, 32));
  const std::string obj = ::testing::TempDir() + "ads3_mesh.obj", tab = ::testing::TempDir() + "ads3_mesh.txt";
  write_obj(m, obj);
  write_table(m, tab);
  std::ifstream in(obj);
  int vs = 0, fs = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("v ", 0) == 0) ++vs;
    if (line.rfind("f ", 0) == 0) ++fs;
  }
  EXPECT_EQ(vs, static_cast<int>(m.size()));
  // A fan over ring 0 plus two triangles per cell between consecutive rings.
  EXPECT_EQ(fs, m.grid.n_theta - 2 + 2 * m.grid.n_theta * m.grid.n_r);
  std::ifstream t(tab);
  std::string header;
  std::getline(t, header);
  EXPECT_EQ(header, "r theta zeta lambda");
  int rows = 0;
  for (std::string line; std::getline(t, line);) ++rows;
  EXPECT_EQ(rows, static_cast<int>(m.size()));
}
