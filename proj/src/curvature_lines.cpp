#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ads3/errors.hpp"
#include "surface_internal.hpp"

namespace ads3 {

namespace {

// Per-vertex data in the Cartesian parameters x = r cos theta, y = r sin theta. All of
// it is attached to the point, not to the chart direction, so the pole mirror leaves
// it unchanged and it interpolates smoothly across r = 0.
struct Sample {
  LorentzVec X, Xx, Xy;
  Eigen::Matrix2d I = Eigen::Matrix2d::Zero(), II = Eigen::Matrix2d::Zero();

  Sample& operator+=(const Sample& o) {
    X += o.X, Xx += o.Xx, Xy += o.Xy, I += o.I, II += o.II;
    return *this;
  }
  Sample operator*(double w) const { return {X * w, Xx * w, Xy * w, I * w, II * w}; }
};

std::array<double, 4> cubic_weights(double t) {
  // Lagrange basis on the nodes -1, 0, 1, 2.
  return {-t * (t - 1) * (t - 2) / 6, (t + 1) * (t - 1) * (t - 2) / 2, -(t + 1) * t * (t - 2) / 2,
          (t + 1) * t * (t - 1) / 6};
}

class SurfaceField {
 public:
  explicit SurfaceField(const SurfaceMesh& m) : g_(m.grid), core_(m.core_radius), data_(m.size()) {
    const Stencils s(g_);
    for (std::size_t v = 0; v < m.size(); ++v) {
      const EmbeddingJet J = embedding_jet(m, s, v);
      const double r = g_.r(g_.ring_of(v)), t = g_.theta(g_.sector_of(v)), c = std::cos(t), sn = std::sin(t);
      // (d_x, d_y) = (d_r, d_theta) P
      Eigen::Matrix2d P;
      P << c, sn, -sn / r, c / r;
      Sample& d = data_[v];
      d.X = J.X;
      d.Xx = c * J.r - (sn / r) * J.t;
      d.Xy = sn * J.r + (c / r) * J.t;
      d.I = P.transpose() * m.geom[v].I * P;
      d.II = P.transpose() * m.geom[v].II * P;
    }
  }

  bool in_core(const Eigen::Vector2d& p) const { return p.norm() <= core_ + 1e-12; }

  Sample at(const Eigen::Vector2d& p) const {
    const double r = p.norm();
    double t = std::atan2(p.y(), p.x());
    if (t < 0) t += 2 * kPi;
    const double q = r / g_.h - 0.5;
    const int i0 = std::min(static_cast<int>(std::floor(q)), g_.n_r - 2);
    const double tq = t / g_.dtheta;
    const int j0 = static_cast<int>(std::floor(tq));
    const std::array<double, 4> wr = cubic_weights(q - i0), wt = cubic_weights(tq - j0);
    Sample out;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out += data_[g_.resolve(i0 - 1 + a, j0 - 1 + b)] * (wr[a] * wt[b]);
    return out;
  }

 private:
  PolarGrid g_;
  double core_;
  std::vector<Sample> data_;
};

struct Principal {
  Eigen::Vector2d e;  // I-unit eigenvector
  double k = 0, lambda = 0;
};

Principal principal(const Sample& s, int sign) {
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(s.II, s.I);
  // Ascending eigenvalues; eigenvectors come out I-normalized.
  const int idx = sign > 0 ? 1 : 0;
  Principal out;
  out.k = es.eigenvalues()[idx];
  out.lambda = 0.5 * (es.eigenvalues()[1] - es.eigenvalues()[0]);
  out.e = es.eigenvectors().col(idx);
  if (2 * out.lambda < 1e-4)
    throw Error(ErrorCode::UmbilicalRegion, "eigen-directions of B are ill-conditioned (2 lambda < 1e-4)");
  return out;
}

Eigen::Vector2d aligned(Eigen::Vector2d e, const Eigen::Vector2d& ref) { return e.dot(ref) < 0 ? -e : e; }

void record(CurvatureLine& L, const Sample& s, const Principal& pr, const Eigen::Vector2d& e, const Eigen::Vector2d& p,
            double arc) {
  const LorentzVec X = s.X / std::sqrt(-inner(s.X, s.X));
  LorentzVec T = e.x() * s.Xx + e.y() * s.Xy;
  T = T / std::sqrt(inner(T, T));
  LorentzVec N = lorentz_cross(X, s.Xx, s.Xy);
  N = N / std::sqrt(-inner(N, N));
  if (!is_future(X, N)) N = -N;
  L.points.push_back(AdSPoint::from(X));
  L.position.push_back(X);
  L.velocity.push_back(T);
  L.normal.push_back(N);
  L.lambda.push_back(pr.lambda);
  L.k.push_back(pr.k);
  L.s.push_back(arc);
  L.param.push_back(p);
}

}  // namespace

CurvatureLine trace_curvature_line(const SurfaceMesh& mesh, const Eigen::Vector2d& start, int sign, double length,
                                   int direction, double step) {
  if (!(length >= 0) || !(step > 0)) throw Error(ErrorCode::ConfigInvalid, "curvature line needs length >= 0, step > 0");
  SurfaceMesh tmp;
  if (mesh.geom.size() != mesh.size()) {
    tmp = mesh;
    fundamental_forms(tmp);
  }
  const SurfaceMesh& m = mesh.geom.size() == mesh.size() ? mesh : tmp;
  const SurfaceField field(m);

  CurvatureLine L;
  Eigen::Vector2d p = start;
  Sample s = field.at(p);
  Principal pr = principal(s, sign);
  Eigen::Vector2d e = pr.e;
  if (e.x() < 0 || (e.x() == 0 && e.y() < 0)) e = -e;
  if (direction < 0) e = -e;
  record(L, s, pr, e, p, 0.0);
  if (!field.in_core(p)) {
    L.truncated = true;
    return L;
  }

  // Uniform steps so that the residual check can difference the samples centrally.
  const int n = static_cast<int>(std::ceil(length / step - 1e-12));
  const double ds = n > 0 ? length / n : 0.0;
  auto dir = [&](const Eigen::Vector2d& q, const Eigen::Vector2d& ref) { return aligned(principal(field.at(q), sign).e, ref); };
  for (int it = 1; it <= n; ++it) {
    const Eigen::Vector2d k1 = e;
    const Eigen::Vector2d k2 = dir(p + 0.5 * ds * k1, e);
    const Eigen::Vector2d k3 = dir(p + 0.5 * ds * k2, e);
    const Eigen::Vector2d k4 = dir(p + ds * k3, e);
    const Eigen::Vector2d next = p + ds / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!field.in_core(next)) {
      L.truncated = true;
      break;
    }
    p = next;
    s = field.at(p);
    pr = principal(s, sign);
    e = aligned(pr.e, e);
    record(L, s, pr, e, p, it * ds);
  }
  return L;
}

CurvatureLine trace_curvature_line(const SurfaceMesh& m, std::size_t x0, int sign, double length, int direction,
                                   double step) {
  if (x0 >= m.size()) throw Error(ErrorCode::ConfigInvalid, "vertex index out of range");
  const double r = m.grid.r(m.grid.ring_of(x0)), t = m.grid.theta(m.grid.sector_of(x0));
  return trace_curvature_line(m, Eigen::Vector2d(r * std::cos(t), r * std::sin(t)), sign, length, direction, step);
}

LineOdeResidual curvature_line_residual(const CurvatureLine& L) {
  LineOdeResidual out;
  const std::size_t n = L.position.size();
  if (n < 3) return out;
  const double h = L.s[1] - L.s[0];
  const LorentzVec& T0 = L.velocity[0];
  std::vector<double> phi(n), psi(n), rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = inner(L.position[i], T0);
    psi[i] = inner(L.normal[i], T0);
    rho[i] = inner(L.velocity[i], T0);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const LorentzVec& x = L.position[i];
    const LorentzVec& N = L.normal[i];
    // Acceleration from the recorded velocities: the bicubic interpolant is only C^0
    // across cell edges, and a second difference of positions would pick up its kinks.
    const LorentzVec acc = (L.velocity[i + 1] - L.velocity[i - 1]) / (2 * h);
    // Tangential part of the acceleration: drop the x and N components (both of norm -1).
    const LorentzVec tang = acc + inner(acc, x) * x + inner(acc, N) * N;
    const double alpha = inner(tang, T0);
    const double dphi = (phi[i + 1] - phi[i - 1]) / (2 * h);
    const double dpsi = (psi[i + 1] - psi[i - 1]) / (2 * h);
    const double drho = (rho[i + 1] - rho[i - 1]) / (2 * h);
    out.phi = std::max(out.phi, std::abs(dphi - rho[i]));
    out.psi = std::max(out.psi, std::abs(dpsi - L.k[i] * rho[i]));
    out.rho = std::max(out.rho, std::abs(drho - phi[i] - L.k[i] * psi[i] - alpha));
  }
  return out;
}

}  // namespace ads3
