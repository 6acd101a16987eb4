#include "ads3/extension.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "ads3/errors.hpp"
#include "surface_internal.hpp"

namespace ads3 {

namespace {

constexpr double kCap = 1e8;

// Ruling coordinate of an ideal point. xi is null only up to cancellation error
// (its entries can be much larger than its Euclidean size far from the origin), so
// the angles are read off directly instead of going through the null check.
double ruling_angle(const LorentzVec& xi, Side side) {
  const double a = std::atan2(xi.x2, xi.x1), b = std::atan2(xi.x4, xi.x3);
  return side == Side::Left ? a + b : a - b;
}

// Ideal point of P_ref on the ruling line of xi.
LorentzVec ruling_foot(const LorentzVec& xi, Side side) {
  const double t = ruling_angle(xi, side);
  return {std::cos(t), std::sin(t), 1.0, 0.0};
}

[[noreturn]] void degenerate(const std::string& why) { throw Error(ErrorCode::DegenerateTangentPlane, why); }

// Derivatives in (r, theta) of the disk coordinates at a vertex.
Eigen::Matrix2d disk_jacobian(const PolarGrid& g, const Stencils& s, const std::vector<Eigen::Vector2d>& z,
                              std::size_t v) {
  const int i = g.ring_of(v), j = g.sector_of(v);
  const detail::Block b = detail::block_weights(s, i);
  Eigen::Matrix2d D = Eigen::Matrix2d::Zero();
  for (int a = 0; a < 5; ++a)
    for (int c = 0; c < 5; ++c) {
      const Eigen::Vector2d& y = z[detail::node_vertex(g, b, j, a, c)];
      D.col(0) += b.w[a][c].r * y;
      D.col(1) += b.w[a][c].t * y;
    }
  return D;
}

double disk_factor(const Eigen::Vector2d& z) { return 2.0 / (1.0 - z.squaredNorm()); }

// Rotation by +pi/2 in the metric I, for the orientation of the (r, theta) chart.
Eigen::Matrix2d complex_structure(const Eigen::Matrix2d& I) {
  Eigen::Matrix2d J;
  J << -I(0, 1), -I(1, 1), I(0, 0), I(0, 1);
  return J / std::sqrt(I.determinant());
}

}  // namespace

Isometry ruling_isometry(const LorentzVec& x_in, const LorentzVec& N, Side side) {
  if (!(inner(x_in, x_in) < 0)) degenerate("base point is not timelike");
  const LorentzVec x = x_in / std::sqrt(-inner(x_in, x_in));
  if (std::abs(inner(N, N) + 1) > 1e-6 || std::abs(inner(x, N)) > 1e-6)
    degenerate("normal is not a unit timelike vector orthogonal to the point");

  // Orthonormal spacelike pair e1, e2 completing (x, N).
  std::vector<LorentzVec> e;
  for (int k = 0; k < 4 && e.size() < 2; ++k) {
    LorentzVec v;
    v[k] = 1.0;
    v += inner(v, x) * x + inner(v, N) * N;
    for (const LorentzVec& u : e) v -= inner(v, u) * u;
    const double n2 = inner(v, v);
    if (n2 > 0.1) e.push_back(v / std::sqrt(n2));
  }
  if (e.size() < 2) degenerate("could not complete a frame of the tangent plane");

  auto ideal = [&](double phi) { return x + std::cos(phi) * e[0] + std::sin(phi) * e[1]; };
  std::array<LorentzVec, 3> xi, eta;
  for (int k = 0; k < 3; ++k) {
    xi[k] = ideal(2 * kPi * k / 3);
    eta[k] = ruling_foot(xi[k], side);
  }
  // Scale the targets so that pairwise products match: <xi_i, xi_j> = c_i c_j <eta_i, eta_j>.
  auto ratio = [&](int i, int j) {
    const double d = inner(eta[i], eta[j]);
    if (std::abs(d) < 1e-12) degenerate("two ideal points share a ruling line");
    return inner(xi[i], xi[j]) / d;
  };
  const double r01 = ratio(0, 1), r02 = ratio(0, 2), r12 = ratio(1, 2);
  if (!(r01 > 0 && r02 > 0 && r12 > 0)) degenerate("ruling projection reverses the causal order");
  const double c0 = std::sqrt(r01 * r02 / r12), c1 = r01 / c0, c2 = r02 / c0;

  Eigen::Matrix4d S, T;
  S << xi[0].eigen(), xi[1].eigen(), xi[2].eigen(), N.eigen();
  T << (c0 * eta[0]).eigen(), (c1 * eta[1]).eigen(), (c2 * eta[2]).eigen(), Eigen::Vector4d(0, 0, 0, 1);
  Eigen::Matrix4d M = T * S.inverse();
  // Far from the origin the ideal points are null only up to cancellation in x + e,
  // which leaves M off O(2,2) by ~1e-8. Newton steps M <- M (3 - Q M^T Q M) / 2 pull
  // it back quadratically; the ruling check below still guards the result.
  const Eigen::Matrix4d Q = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
  for (int it = 0; it < 3; ++it) M = 0.5 * M * (3 * Eigen::Matrix4d::Identity() - Q * M.transpose() * Q * M);
  const Isometry iso(M);
  if (!iso.is_valid(1e-9)) degenerate("constructed map is not an orientation-preserving isometry");

  // Three more ideal points must land on their own ruling lines.
  for (int k = 0; k < 3; ++k) {
    const LorentzVec p = ideal(2 * kPi * k / 3 + kPi / 3);
    const double d = std::remainder(ruling_angle(iso.apply(p), side) - ruling_angle(p, side), 2 * kPi);
    if (std::abs(d) > 1e-6) degenerate("boundary map does not follow the ruling");
  }
  return iso;
}

RulingIsometry ruling_isometry(const SurfaceMesh& mesh, std::size_t vertex, Side side) {
  if (vertex >= mesh.size()) throw Error(ErrorCode::ConfigInvalid, "vertex index out of range");
  LorentzVec N;
  if (mesh.geom.size() == mesh.size()) {
    N = mesh.geom[vertex].N;
  } else {
    SurfaceMesh m = mesh;
    fundamental_forms(m);
    N = m.geom[vertex].N;
  }
  return {ruling_isometry(mesh.X[vertex], N, side), side, vertex};
}

Eigen::Vector2d to_disk(const LorentzVec& y_in) {
  LorentzVec y = y_in / std::sqrt(-inner(y_in, y_in));
  if (y.x3 < 0) y = -y;
  return Eigen::Vector2d(y.x1, y.x2) / (1.0 + y.x3);
}

SampledMap ml_map(const SurfaceMesh& mesh) {
  SurfaceMesh tmp;
  if (mesh.geom.size() != mesh.size()) {
    tmp = mesh;
    fundamental_forms(tmp);
  }
  const SurfaceMesh& m = mesh.geom.size() == mesh.size() ? mesh : tmp;
  for (std::size_t v : m.core_vertices())
    if (m.geom[v].lambda >= 1 - 1e-6) throw Error(ErrorCode::CurvatureAtOne, "lambda reaches 1 on the core");

  SampledMap out;
  out.y_l.resize(m.size());
  out.y_r.resize(m.size());
  for (std::size_t v = 0; v < m.size(); ++v) {
    out.y_l[v] = to_disk(ruling_isometry(m.X[v], m.geom[v].N, Side::Left).apply(m.X[v]));
    out.y_r[v] = to_disk(ruling_isometry(m.X[v], m.geom[v].N, Side::Right).apply(m.X[v]));
  }

  const Stencils s(m.grid);
  for (std::size_t v : m.core_vertices()) {
    const VertexGeometry& G = m.geom[v];
    const Eigen::Matrix2d JB = complex_structure(G.I) * G.B, E = Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d Al = E + JB, Ar = E - JB;
    const Eigen::Matrix2d Dl = disk_jacobian(m.grid, s, out.y_l, v), Dr = disk_jacobian(m.grid, s, out.y_r, v);
    const double fl = disk_factor(out.y_l[v]), fr = disk_factor(out.y_r[v]);
    const Eigen::Matrix2d Pl = fl * fl * Dl.transpose() * Dl, Pr = fr * fr * Dr.transpose() * Dr;
    const Eigen::Matrix2d El = Al.transpose() * G.I * Al, Er = Ar.transpose() * G.I * Ar;
    out.pullback_left = std::max(out.pullback_left, detail::metric_op_norm(El, Pl - El));
    out.pullback_right = std::max(out.pullback_right, detail::metric_op_norm(Er, Pr - Er));
  }
  return out;
}

double dilatation_formula(double lambda) {
  if (!(lambda < 1)) return kCap;
  return std::min(kCap, std::pow((1 + lambda) / (1 - lambda), 2));
}

DilatationField dilatation(const SurfaceMesh& mesh, const SampledMap& sm) {
  if (sm.y_l.size() != mesh.size() || sm.y_r.size() != mesh.size())
    throw Error(ErrorCode::ConfigInvalid, "sampled map does not belong to this mesh");
  SurfaceMesh tmp;
  if (mesh.geom.size() != mesh.size()) {
    tmp = mesh;
    fundamental_forms(tmp);
  }
  const SurfaceMesh& m = mesh.geom.size() == mesh.size() ? mesh : tmp;
  const Stencils s(m.grid);

  DilatationField d;
  d.K_formula.assign(m.size(), 0.0);
  d.K_measured.assign(m.size(), 0.0);
  d.jacobian.assign(m.size(), 0.0);
  std::vector<double> rel;
  for (std::size_t v : m.core_vertices()) {
    const double lambda = m.geom[v].lambda;
    const double kf = dilatation_formula(lambda);
    if (kf >= kCap) d.capped = true;
    const Eigen::Matrix2d Dl = disk_jacobian(m.grid, s, sm.y_l, v), Dr = disk_jacobian(m.grid, s, sm.y_r, v);
    const Eigen::Matrix2d D = Dr * Dl.inverse();
    const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix2d>(D).singularValues();
    const double km = sv[1] > 0 ? std::min(kCap, sv[0] / sv[1]) : kCap;
    const double ratio = disk_factor(sm.y_r[v]) / disk_factor(sm.y_l[v]);
    d.K_formula[v] = kf;
    d.K_measured[v] = km;
    d.jacobian[v] = D.determinant() * ratio * ratio;
    d.K_sup = std::max(d.K_sup, kf);
    d.K_measured_sup = std::max(d.K_measured_sup, km);
    d.max_jacobian_error = std::max(d.max_jacobian_error, std::abs(d.jacobian[v] - 1));
    rel.push_back(std::abs(km - kf) / kf);
  }
  if (!rel.empty()) {
    d.max_rel_error = *std::max_element(rel.begin(), rel.end());
    auto mid = rel.begin() + static_cast<std::ptrdiff_t>(rel.size() / 2);
    std::nth_element(rel.begin(), mid, rel.end());
    d.median_rel_error = *mid;
  }
  return d;
}

double boundary_trace_error(const SurfaceMesh& m, const SampledMap& s, const CircleHomeo& phi) {
  if (s.y_l.size() != m.size()) throw Error(ErrorCode::ConfigInvalid, "sampled map does not belong to this mesh");
  const PolarGrid& g = m.grid;
  double worst = 0;
  for (int j = 0; j < g.n_theta; ++j) {
    const std::size_t v = g.index(g.n_r, j);
    const double al = std::atan2(s.y_l[v].y(), s.y_l[v].x()), ar = std::atan2(s.y_r[v].y(), s.y_r[v].x());
    worst = std::max(worst, std::abs(std::remainder(ar - phi.eval(al), 2 * kPi)));
  }
  return worst;
}

void write_map_table(const SampledMap& s, const DilatationField& d, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path);
  os << "vertex y_l_x y_l_y y_r_x y_r_y K_formula K_measured\n" << std::setprecision(17);
  for (std::size_t v = 0; v < s.y_l.size(); ++v)
    os << v << ' ' << s.y_l[v].x() << ' ' << s.y_l[v].y() << ' ' << s.y_r[v].x() << ' ' << s.y_r[v].y() << ' '
       << d.K_formula[v] << ' ' << d.K_measured[v] << '\n';
  if (!os) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace ads3
