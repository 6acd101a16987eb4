#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>

#include "ads3/errors.hpp"
#include "surface_internal.hpp"

namespace ads3 {

namespace {

constexpr double kL = 2 * (1 + 1.4142135623730951);

struct ScalarJet {
  double s = 0, r = 0, t = 0, rr = 0, rt = 0, tt = 0;
};

// Jet of a per-vertex field. parity = -1 for fields that change sign under the pole
// mirror (the cross term F of the metric, whose r-direction reverses).
ScalarJet scalar_jet(const PolarGrid& g, const detail::Block& b, int j, const std::vector<double>& field,
                     double parity = 1.0) {
  ScalarJet J;
  for (int a = 0; a < 5; ++a)
    for (int c = 0; c < 5; ++c) {
      const detail::JetWeights& w = b.w[a][c];
      const double x = field[detail::node_vertex(g, b, j, a, c)] * (b.first + a < 0 ? parity : 1.0);
      J.s += w.X * x;
      J.r += w.r * x;
      J.t += w.t * x;
      J.rr += w.rr * x;
      J.rt += w.rt * x;
      J.tt += w.tt * x;
    }
  return J;
}

// Derivatives of derived fields (lambda, metric components) near the pole. Their
// truncation error has a theta pattern that does not die out at r = 0, and the polar
// theta-stencils blow it up by 1/r^2. Inside the pole disk the field is instead
// fitted by a polynomial in x = r cos theta, y = r sin theta over the rings
// 0..kFitRings-1, which differentiates over a width of several h.
constexpr int kPoleRings = 4;
constexpr int kFitRings = 8;
constexpr int kFitDegree = 6;

struct CartesianJet {
  double s = 0, x = 0, y = 0, xx = 0, xy = 0, yy = 0;
};

class PoleFit {
 public:
  PoleFit(const PolarGrid& g, const std::vector<double>& field) : scale_(g.r(kFitRings)) {
    std::vector<std::size_t> rows;
    for (int i = 0; i < kFitRings; ++i)
      for (int j = 0; j < g.n_theta; ++j) rows.push_back(g.index(i, j));
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), terms());
    Eigen::VectorXd b(A.rows());
    for (Eigen::Index k = 0; k < A.rows(); ++k) {
      const std::size_t v = rows[static_cast<std::size_t>(k)];
      const double r = g.r(g.ring_of(v)) / scale_, t = g.theta(g.sector_of(v));
      int col = 0;
      for (int d = 0; d <= kFitDegree; ++d)
        for (int py = 0; py <= d; ++py) A(k, col++) = std::pow(r * std::cos(t), d - py) * std::pow(r * std::sin(t), py);
      b[k] = field[v];
    }
    coef_ = A.colPivHouseholderQr().solve(b);
  }

  CartesianJet at(double x, double y) const {
    x /= scale_;
    y /= scale_;
    auto pw = [](double base, int e) { return e < 0 ? 0.0 : std::pow(base, e); };
    CartesianJet J;
    int col = 0;
    for (int d = 0; d <= kFitDegree; ++d)
      for (int py = 0; py <= d; ++py, ++col) {
        const int px = d - py;
        const double c = coef_[col];
        J.s += c * pw(x, px) * pw(y, py);
        J.x += c * px * pw(x, px - 1) * pw(y, py);
        J.y += c * py * pw(x, px) * pw(y, py - 1);
        J.xx += c * px * (px - 1) * pw(x, px - 2) * pw(y, py);
        J.xy += c * px * py * pw(x, px - 1) * pw(y, py - 1);
        J.yy += c * py * (py - 1) * pw(x, px) * pw(y, py - 2);
      }
    const double s1 = 1 / scale_, s2 = s1 * s1;
    J.x *= s1, J.y *= s1, J.xx *= s2, J.xy *= s2, J.yy *= s2;
    return J;
  }

 private:
  static int terms() { return (kFitDegree + 1) * (kFitDegree + 2) / 2; }
  double scale_;
  Eigen::VectorXd coef_;
};

// The same derivatives in (r, theta).
ScalarJet to_polar(const CartesianJet& J, double r, double t) {
  const double c = std::cos(t), s = std::sin(t);
  ScalarJet P;
  P.s = J.s;
  P.r = c * J.x + s * J.y;
  P.t = r * (-s * J.x + c * J.y);
  P.rr = c * c * J.xx + 2 * c * s * J.xy + s * s * J.yy;
  P.rt = r * (-c * s * J.xx + (c * c - s * s) * J.xy + c * s * J.yy) + (-s * J.x + c * J.y);
  P.tt = r * r * (s * s * J.xx - 2 * c * s * J.xy + c * c * J.yy) - r * (c * J.x + s * J.y);
  return P;
}

CartesianJet to_cartesian(const ScalarJet& P, double r, double t) {
  const double c = std::cos(t), s = std::sin(t), ir = 1 / r, ir2 = ir * ir;
  CartesianJet J;
  J.s = P.s;
  J.x = c * P.r - s * ir * P.t;
  J.y = s * P.r + c * ir * P.t;
  J.xx = c * c * P.rr - 2 * c * s * ir * P.rt + s * s * ir2 * P.tt + s * s * ir * P.r + 2 * c * s * ir2 * P.t;
  J.yy = s * s * P.rr + 2 * c * s * ir * P.rt + c * c * ir2 * P.tt + c * c * ir * P.r - 2 * c * s * ir2 * P.t;
  J.xy = c * s * P.rr + (c * c - s * s) * ir * P.rt - c * s * ir2 * P.tt - c * s * ir * P.r - (c * c - s * s) * ir2 * P.t;
  return J;
}

// Brioschi formula on Cartesian jets of E = I_xx, F = I_xy, G = I_yy.
double brioschi(const CartesianJet& E, const CartesianJet& F, const CartesianJet& G) {
  Eigen::Matrix3d m1, m2;
  m1 << -0.5 * E.yy + F.xy - 0.5 * G.xx, 0.5 * E.x, F.x - 0.5 * E.y,  //
      F.y - 0.5 * G.x, E.s, F.s,                                    //
      0.5 * G.y, F.s, G.s;
  m2 << 0, 0.5 * E.y, 0.5 * G.x,  //
      0.5 * E.y, E.s, F.s,        //
      0.5 * G.x, F.s, G.s;
  const double det = E.s * G.s - F.s * F.s;
  return (m1.determinant() - m2.determinant()) / (det * det);
}

// Connection pieces of the induced metric at a vertex, from the embedding jet.
struct LocalMetric {
  Eigen::Matrix2d g, ginv;
  // gamma[k](a, b) = Gamma^k_ab
  std::array<Eigen::Matrix2d, 2> gamma;
};

LocalMetric local_metric(const EmbeddingJet& J) {
  LocalMetric m;
  m.g << inner(J.r, J.r), inner(J.r, J.t), inner(J.r, J.t), inner(J.t, J.t);
  m.ginv = m.g.inverse();
  const LorentzVec* d[2] = {&J.r, &J.t};
  const LorentzVec* dd[2][2] = {{&J.rr, &J.rt}, {&J.rt, &J.tt}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const Eigen::Vector2d low(inner(*dd[a][b], *d[0]), inner(*dd[a][b], *d[1]));
      const Eigen::Vector2d up = m.ginv * low;
      m.gamma[0](a, b) = up[0];
      m.gamma[1](a, b) = up[1];
    }
  return m;
}

Eigen::Matrix2d hessian(const LocalMetric& m, const Eigen::Vector2d& d1, const Eigen::Matrix2d& d2) {
  Eigen::Matrix2d h = d2;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) h(a, b) -= m.gamma[0](a, b) * d1[0] + m.gamma[1](a, b) * d1[1];
  return h;
}

const SurfaceMesh& with_forms(const SurfaceMesh& m, SurfaceMesh& tmp) {
  if (m.geom.size() == m.size()) return m;
  tmp = m;
  fundamental_forms(tmp);
  return tmp;
}

}  // namespace

double scheme_tolerance(const SurfaceMesh& m) {
  const Stencils s(m.grid);
  double worst = 0;
  for (std::size_t v : m.core_vertices()) {
    const EmbeddingJet J = embedding_jet(m, s, v);
    Eigen::Matrix2d g, d;
    g << inner(J.r, J.r), inner(J.r, J.t), inner(J.r, J.t), inner(J.t, J.t);
    d << inner(J.rr, J.X), inner(J.rt, J.X), inner(J.rt, J.X), inner(J.tt, J.X);
    const double normal = detail::metric_op_norm(g, d + g);
    const double tangent =
        std::max(std::abs(inner(J.r, J.X)) / std::sqrt(g(0, 0)), std::abs(inner(J.t, J.X)) / std::sqrt(g(1, 1)));
    worst = std::max(worst, normal + tangent);
  }
  return worst;
}

Residuals check_linear_pde(const SurfaceMesh& mesh, const Plane& P) {
  if (P.kind != PlaneKind::Spacelike) throw Error(ErrorCode::NotSpacelike, "linear PDE check needs a spacelike plane");
  SurfaceMesh tmp;
  const SurfaceMesh& m = with_forms(mesh, tmp);
  LorentzVec p = P.dual;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const LorentzVec& x : m.X) {
    const double u = inner(x, p);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  if (lo < 0 && hi > 0) throw Error(ErrorCode::PlaneIntersectsSurface, "u = <x, p> changes sign on the mesh");
  if (hi <= 0) p = -p;

  const Stencils s(m.grid);
  Residuals out;
  out.scheme_tolerance = scheme_tolerance(m);
  out.grad_bound_margin = out.refined_bound_margin = -std::numeric_limits<double>::infinity();
  double umax = 0, lin = 0, hess = 0;
  for (std::size_t v : m.core_vertices()) {
    const EmbeddingJet J = embedding_jet(m, s, v);
    const LocalMetric lm = local_metric(J);
    const double u = inner(J.X, p);
    const Eigen::Vector2d du(inner(J.r, p), inner(J.t, p));
    Eigen::Matrix2d d2u;
    d2u << inner(J.rr, p), inner(J.rt, p), inner(J.rt, p), inner(J.tt, p);
    const Eigen::Matrix2d H = hessian(lm, du, d2u);
    const double lap = (lm.ginv * H).trace();
    lin = std::max(lin, std::abs(lap - 2 * u));
    const Eigen::Matrix2d S = H - u * lm.g - inner(m.geom[v].N, p) * m.geom[v].II;
    hess = std::max(hess, detail::metric_op_norm(lm.g, S));
    umax = std::max(umax, std::abs(u));
    ++out.vertices;
    if (u >= 0 && u <= 1) {
      const double g2 = du.dot(lm.ginv * du);
      out.grad_bound_margin = std::max(out.grad_bound_margin, g2 - kL);
      out.refined_bound_margin = std::max(out.refined_bound_margin, g2 - 2 * (u * u + std::sqrt(2.0) * u));
      ++out.bound_vertices;
    }
  }
  if (out.bound_vertices == 0) out.grad_bound_margin = out.refined_bound_margin = -kL;
  const double scale = std::max(1.0, umax);
  out.linear_pde = lin / scale;
  out.hessian_identity = hess / scale;
  return out;
}

Residuals check_quasilinear_pde(const SurfaceMesh& mesh, double lambda_min) {
  SurfaceMesh tmp;
  const SurfaceMesh& m = with_forms(mesh, tmp);
  const PolarGrid& g = m.grid;
  std::vector<double> chi(m.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t v = 0; v < m.size(); ++v)
    if (m.geom[v].lambda > lambda_min) chi[v] = -std::log(m.geom[v].lambda);
  const Stencils s(g);
  Residuals out;
  out.scheme_tolerance = scheme_tolerance(m);
  std::optional<PoleFit> pole;
  if (std::all_of(chi.begin(), chi.begin() + static_cast<std::ptrdiff_t>(g.index(kFitRings, 0)),
                  [](double x) { return std::isfinite(x); }))
    pole.emplace(g, chi);
  double worst = 0;
  for (std::size_t v : m.core_vertices()) {
    const int i = g.ring_of(v), j = g.sector_of(v);
    const detail::Block b = detail::block_weights(s, i);
    ScalarJet c;
    if (i < kPoleRings) {
      if (!pole) continue;
      const double r = g.r(i), t = g.theta(j);
      c = to_polar(pole->at(r * std::cos(t), r * std::sin(t)), r, t);
    } else {
      bool ok = true;
      for (int a = 0; a < 5 && ok; ++a)
        for (int k = 0; k < 5 && ok; ++k) ok = std::isfinite(chi[detail::node_vertex(g, b, j, a, k)]);
      if (!ok) continue;
      c = scalar_jet(g, b, j, chi);
    }
    const LocalMetric lm = local_metric(embedding_jet(m, s, v));
    Eigen::Matrix2d d2;
    d2 << c.rr, c.rt, c.rt, c.tt;
    const double lap = (lm.ginv * hessian(lm, Eigen::Vector2d(c.r, c.t), d2)).trace();
    worst = std::max(worst, std::abs(lap - 2 * (1 - std::exp(-2 * chi[v]))));
    ++out.vertices;
  }
  if (out.vertices == 0) throw Error(ErrorCode::AllUmbilical, "no core vertex with lambda above threshold on its stencil");
  out.quasilinear_pde = worst;
  return out;
}

std::vector<double> intrinsic_curvature(const SurfaceMesh& mesh) {
  SurfaceMesh tmp;
  const SurfaceMesh& m = with_forms(mesh, tmp);
  const PolarGrid& g = m.grid;
  // Brioschi in the Cartesian parameters throughout: the polar form divides by
  // (E G - F^2)^2 ~ r^4, which turns the truncation error near the pole into O(1).
  // Cartesian components I_xy = P^T I P, P the inverse of d(x, y)/d(r, theta), are
  // smooth fields with even parity under the pole mirror.
  std::vector<double> Exx(m.size()), Exy(m.size()), Eyy(m.size());
  for (std::size_t v = 0; v < m.size(); ++v) {
    const double r = g.r(g.ring_of(v)), t = g.theta(g.sector_of(v)), c = std::cos(t), sn = std::sin(t);
    Eigen::Matrix2d P;
    P << c, sn, -sn / r, c / r;
    const Eigen::Matrix2d Ic = P.transpose() * m.geom[v].I * P;
    Exx[v] = Ic(0, 0), Exy[v] = Ic(0, 1), Eyy[v] = Ic(1, 1);
  }
  const PoleFit fe(g, Exx), ff(g, Exy), fg(g, Eyy);
  const Stencils s(g);
  std::vector<double> K(m.size());
  for (std::size_t v = 0; v < m.size(); ++v) {
    const int i = g.ring_of(v), j = g.sector_of(v);
    const double r = g.r(i), t = g.theta(j);
    if (i < kPoleRings) {
      const double x = r * std::cos(t), y = r * std::sin(t);
      K[v] = brioschi(fe.at(x, y), ff.at(x, y), fg.at(x, y));
      continue;
    }
    const detail::Block b = detail::block_weights(s, i);
    CartesianJet e = to_cartesian(scalar_jet(g, b, j, Exx), r, t), f = to_cartesian(scalar_jet(g, b, j, Exy), r, t),
                 gg = to_cartesian(scalar_jet(g, b, j, Eyy), r, t);
    e.s = Exx[v], f.s = Exy[v], gg.s = Eyy[v];
    K[v] = brioschi(e, f, gg);
  }
  return K;
}

double gauss_defect(const SurfaceMesh& mesh) {
  SurfaceMesh tmp;
  const SurfaceMesh& m = with_forms(mesh, tmp);
  const std::vector<double> K = intrinsic_curvature(m);
  double worst = 0;
  for (std::size_t v : m.core_vertices()) {
    const double detB = m.geom[v].B.determinant();
    worst = std::max(worst, std::abs(K[v] - (-1 - detB)) / (1 + std::abs(detB)));
  }
  return worst;
}

double lipschitz_v(const SurfaceMesh& mesh) {
  SurfaceMesh tmp;
  const SurfaceMesh& m = with_forms(mesh, tmp);
  const PolarGrid& g = m.grid;
  const Stencils s(g);
  std::vector<double> vfield(m.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t v = 0; v < m.size(); ++v)
    if (m.geom[v].lambda < 1 - 1e-9) vfield[v] = -std::log1p(-m.geom[v].lambda);
  double worst = 0;
  for (std::size_t v : m.core_vertices()) {
    const int i = g.ring_of(v), j = g.sector_of(v);
    const detail::Block b = detail::block_weights(s, i);
    for (int a = 0; a < 5; ++a)
      for (int c = 0; c < 5; ++c)
        if (!std::isfinite(vfield[detail::node_vertex(g, b, j, a, c)]))
          throw Error(ErrorCode::CurvatureAtOne, "lambda reaches 1 near ring " + std::to_string(i));
    const ScalarJet d = scalar_jet(g, b, j, vfield);
    const EmbeddingJet J = embedding_jet(m, s, v);
    Eigen::Matrix2d gm;
    gm << inner(J.r, J.r), inner(J.r, J.t), inner(J.r, J.t), inner(J.t, J.t);
    const Eigen::Vector2d dv(d.r, d.t);
    worst = std::max(worst, std::sqrt(std::max(0.0, dv.dot(gm.inverse() * dv))));
  }
  return worst;
}

double hull_containment(const SurfaceMesh& m, const ConvexHull3& h) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const LorentzVec& x : m.X) worst = std::max(worst, h.signed_distance({x.x1 / x.x3, x.x2 / x.x3, x.x4 / x.x3}));
  return worst;
}

}  // namespace ads3
