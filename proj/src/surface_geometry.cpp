#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "ads3/errors.hpp"
#include "surface_internal.hpp"

namespace ads3 {

namespace detail {

Block block_weights(const Stencils& s, int i) {
  const RingStencil& rs = s.ring[i];
  Block b;
  b.first = rs.first;
  b.ia = i - rs.first;
  for (int a = 0; a < 5; ++a) {
    b.w[a][2].r = rs.d1[a];
    b.w[a][2].rr = rs.d2[a];
    for (int c = 0; c < 5; ++c) b.w[a][c].rt = rs.d1[a] * s.t1[c];
  }
  for (int c = 0; c < 5; ++c) {
    b.w[b.ia][c].t = s.t1[c];
    b.w[b.ia][c].tt = s.t2[c];
  }
  b.w[b.ia][2].X = 1.0;
  return b;
}

namespace {

bool spacelike_metric(double E, double F, double G, double r) {
  const double s = std::sinh(r);
  const double e = E, f = F / s, g = G / (s * s);
  const double mean = 0.5 * (e + g), dev = std::hypot(0.5 * (e - g), f);
  return mean - dev > 1e-8;
}

}  // namespace

bool shape_from_jet(const EmbeddingJet& J, double r, VertexGeometry& out) {
  const double E = inner(J.r, J.r), F = inner(J.r, J.t), G = inner(J.t, J.t);
  if (!spacelike_metric(E, F, G, r)) return false;
  LorentzVec N = lorentz_cross(J.X, J.r, J.t);
  const double nn = inner(N, N);
  if (!(nn < 0)) return false;
  N = N / std::sqrt(-nn);
  if (!is_future(J.X, N)) N = -N;
  out.N = N;
  out.I << E, F, F, G;
  const double l = -inner(J.rr, N), m = -inner(J.rt, N), n = -inner(J.tt, N);
  out.II << l, m, m, n;
  out.B = out.I.inverse() * out.II;
  const double tr = out.B.trace(), det = out.B.determinant();
  out.H = tr;
  out.lambda = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  out.k1 = 0.5 * tr + out.lambda;
  out.k2 = 0.5 * tr - out.lambda;
  return true;
}

double mean_curvature(const EmbeddingJet& J, double r) {
  const double E = inner(J.r, J.r), F = inner(J.r, J.t), G = inner(J.t, J.t);
  if (!spacelike_metric(E, F, G, r)) return std::numeric_limits<double>::quiet_NaN();
  LorentzVec N = lorentz_cross(J.X, J.r, J.t);
  const double nn = inner(N, N);
  if (!(nn < 0)) return std::numeric_limits<double>::quiet_NaN();
  N = N / std::sqrt(-nn);
  if (!is_future(J.X, N)) N = -N;
  const double l = -inner(J.rr, N), m = -inner(J.rt, N), n = -inner(J.tt, N);
  return (G * l - 2 * F * m + E * n) / (E * G - F * F);
}

double mean_curvature(const EmbeddingJet& J, const EmbeddingJet& dJ, double r, double& dH) {
  const double E = inner(J.r, J.r), F = inner(J.r, J.t), G = inner(J.t, J.t);
  if (!spacelike_metric(E, F, G, r)) return std::numeric_limits<double>::quiet_NaN();
  const LorentzVec n = lorentz_cross(J.X, J.r, J.t);
  const double q = -inner(n, n);
  if (!(q > 0)) return std::numeric_limits<double>::quiet_NaN();
  const double s = is_future(J.X, n) ? 1.0 : -1.0;
  const LorentzVec dn = lorentz_cross(dJ.X, J.r, J.t) + lorentz_cross(J.X, dJ.r, J.t) + lorentz_cross(J.X, J.r, dJ.t);
  const double dE = 2 * inner(J.r, dJ.r), dF = inner(dJ.r, J.t) + inner(J.r, dJ.t), dG = 2 * inner(J.t, dJ.t);
  const double dq = -2 * inner(n, dn);
  const double l = -inner(J.rr, n), m = -inner(J.rt, n), k = -inner(J.tt, n);
  const double dl = -inner(dJ.rr, n) - inner(J.rr, dn), dm = -inner(dJ.rt, n) - inner(J.rt, dn),
               dk = -inner(dJ.tt, n) - inner(J.tt, dn);
  const double num = G * l - 2 * F * m + E * k;
  const double dnum = dG * l + G * dl - 2 * (dF * m + F * dm) + dE * k + E * dk;
  const double det = E * G - F * F, ddet = dE * G + E * dG - 2 * F * dF;
  const double sq = std::sqrt(q);
  const double den = det * sq, dden = ddet * sq + det * dq / (2 * sq);
  dH = s * (dnum * den - num * dden) / (den * den);
  return s * num / den;
}

double metric_op_norm(const Eigen::Matrix2d& I, const Eigen::Matrix2d& S) {
  const Eigen::LLT<Eigen::Matrix2d> llt(I);
  const Eigen::Matrix2d L = llt.matrixL();
  const Eigen::Matrix2d Linv = L.inverse();
  const Eigen::Matrix2d T = Linv * S * Linv.transpose();
  const double mean = 0.5 * (T(0, 0) + T(1, 1));
  const double dev = std::hypot(0.5 * (T(0, 0) - T(1, 1)), 0.5 * (T(0, 1) + T(1, 0)));
  return std::max(std::abs(mean + dev), std::abs(mean - dev));
}

}  // namespace detail

std::vector<std::size_t> SurfaceMesh::core_vertices() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < size(); ++v)
    if (in_core(v)) out.push_back(v);
  return out;
}

double SurfaceMesh::lambda_sup() const {
  double s = 0;
  for (std::size_t v = 0; v < geom.size(); ++v)
    if (in_core(v)) s = std::max(s, geom[v].lambda);
  return s;
}

double SurfaceMesh::mean_curvature_sup() const {
  double s = 0;
  const std::size_t interior = static_cast<std::size_t>(grid.n_r) * grid.n_theta;
  for (std::size_t v = 0; v < std::min(interior, geom.size()); ++v) s = std::max(s, std::abs(geom[v].H));
  return s;
}

void SolverConfig::validate() const {
  if (!(r_max >= 2) || n_r < 16 || n_theta < 32 || n_theta % 2 != 0)
    throw Error(ErrorCode::ConfigInvalid, "solver needs r_max >= 2, n_r >= 16 and even n_theta >= 32");
  if (!(tol_H > 0) || max_iters < 1 || !(damping > 0))
    throw Error(ErrorCode::ConfigInvalid, "solver needs tol_H > 0, max_iters >= 1 and damping > 0");
  if (core_radius >= 0 && !(core_radius > 0 && core_radius <= r_max))
    throw Error(ErrorCode::ConfigInvalid, "core radius must lie in (0, r_max]");
}

SurfaceMesh mesh_from_heights(const PolarGrid& g, std::vector<double> f, double core_radius) {
  if (f.size() != g.size()) throw Error(ErrorCode::ConfigInvalid, "height field does not match the grid");
  SurfaceMesh m;
  m.grid = g;
  m.core_radius = core_radius;
  m.X.resize(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) m.X[v] = cyl_embed_vec(g.r(g.ring_of(v)), g.theta(g.sector_of(v)), f[v]);
  m.f = std::move(f);
  return m;
}

SurfaceMesh mesh_from_points(const PolarGrid& g, std::vector<LorentzVec> X, double core_radius) {
  if (X.size() != g.size()) throw Error(ErrorCode::ConfigInvalid, "point field does not match the grid");
  SurfaceMesh m;
  m.grid = g;
  m.core_radius = core_radius;
  m.X = std::move(X);
  return m;
}

EmbeddingJet embedding_jet(const SurfaceMesh& m, const Stencils& s, std::size_t v) {
  const int i = m.grid.ring_of(v), j = m.grid.sector_of(v);
  const detail::Block b = detail::block_weights(s, i);
  EmbeddingJet J;
  for (int a = 0; a < 5; ++a)
    for (int c = 0; c < 5; ++c) detail::add_node(J, b.w[a][c], m.X[detail::node_vertex(m.grid, b, j, a, c)]);
  J.X = m.X[v];
  return J;
}

void fundamental_forms(SurfaceMesh& m) {
  const Stencils s(m.grid);
  m.geom.assign(m.size(), {});
  for (std::size_t v = 0; v < m.size(); ++v) {
    const int i = m.grid.ring_of(v);
    if (!detail::shape_from_jet(embedding_jet(m, s, v), m.grid.r(i), m.geom[v]))
      throw Error(ErrorCode::NotSpacelike,
                  "tangent plane not spacelike at ring " + std::to_string(i) + ", sector " + std::to_string(m.grid.sector_of(v)));
  }
}

Eigen::Matrix2d parallel_metric(const Eigen::Matrix2d& I, const Eigen::Matrix2d& B, double rho) {
  const Eigen::Matrix2d A = std::cos(rho) * Eigen::Matrix2d::Identity() + std::sin(rho) * B;
  return A.transpose() * I * A;
}

Eigen::Matrix2d parallel_shape(const Eigen::Matrix2d& B, double rho) {
  const Eigen::Matrix2d E = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d A = std::cos(rho) * E + std::sin(rho) * B;
  return A.inverse() * (-std::sin(rho) * E + std::cos(rho) * B);
}

SurfaceMesh parallel_surface(const SurfaceMesh& m, double rho) {
  SurfaceMesh src = m;
  if (src.geom.size() != src.size()) fundamental_forms(src);
  const double c = std::cos(rho), s = std::sin(rho);
  std::vector<LorentzVec> X(src.size());
  for (std::size_t v = 0; v < src.size(); ++v) {
    const Eigen::Matrix2d A = c * Eigen::Matrix2d::Identity() + s * src.geom[v].B;
    if (!(A.determinant() >= 1e-8))
      throw Error(ErrorCode::SingularParallel, "cos(rho) E + sin(rho) B is singular at vertex " + std::to_string(v));
    X[v] = c * src.X[v] + s * src.geom[v].N;
  }
  SurfaceMesh out = mesh_from_points(src.grid, std::move(X), src.core_radius);
  fundamental_forms(out);
  return out;
}

void write_obj(const SurfaceMesh& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path);
  os << std::setprecision(17);
  for (const LorentzVec& x : m.X) {
    if (std::abs(x.x3) < 1e-300) throw Error(ErrorCode::ChartSingularity, "vertex on x3 = 0");
    os << "v " << x.x1 / x.x3 << ' ' << x.x2 / x.x3 << ' ' << x.x4 / x.x3 << '\n';
  }
  const PolarGrid& g = m.grid;
  // Fan over the innermost ring, then two triangles per cell. OBJ indices are 1-based.
  for (int j = 1; j + 1 < g.n_theta; ++j) os << "f 1 " << g.index(0, j) + 1 << ' ' << g.index(0, j + 1) + 1 << '\n';
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t a = g.index(i, j) + 1, b = g.index(i + 1, j) + 1, c = g.index(i + 1, j + 1) + 1,
                        d = g.index(i, j + 1) + 1;
      os << "f " << a << ' ' << b << ' ' << c << '\n' << "f " << a << ' ' << c << ' ' << d << '\n';
    }
  if (!os) throw Error(ErrorCode::IoError, "write failed: " + path);
}

void write_table(const SurfaceMesh& m, const std::string& path) {
  SurfaceMesh tmp;
  const SurfaceMesh* src = &m;
  if (m.geom.size() != m.size()) {
    tmp = m;
    fundamental_forms(tmp);
    src = &tmp;
  }
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path);
  os << std::setprecision(17) << "r theta zeta lambda\n";
  for (std::size_t v = 0; v < src->size(); ++v) {
    CylCoords c;
    if (src->is_graph())
      c = {src->grid.r(src->grid.ring_of(v)), src->grid.theta(src->grid.sector_of(v)), src->f[v]};
    else
      c = cyl_coords(AdSPoint::from(src->X[v]));
    os << c.r << ' ' << c.theta << ' ' << c.zeta << ' ' << src->geom[v].lambda << '\n';
  }
  if (!os) throw Error(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace ads3
