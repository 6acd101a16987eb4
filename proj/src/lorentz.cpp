#include "ads3/lorentz.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <limits>

namespace ads3 {

const Eigen::Matrix4d& gram() {
  static const Eigen::Matrix4d g = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
  return g;
}

const char* to_string(CausalType t) {
  switch (t) {
    case CausalType::Spacelike: return "spacelike";
    case CausalType::Timelike: return "timelike";
    case CausalType::Lightlike: return "lightlike";
  }
  return "?";
}

CausalType causal_type(const LorentzVec& v) {
  const double q = inner(v, v);
  if (std::abs(q) < kLightlikeTol) return CausalType::Lightlike;
  return q > 0 ? CausalType::Spacelike : CausalType::Timelike;
}

LorentzVec lorentz_cross(const LorentzVec& a, const LorentzVec& b, const LorentzVec& d) {
  auto minor = [&](int skip) {
    int rows[3], k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) rows[k++] = i;
    const double m00 = a[rows[0]], m01 = b[rows[0]], m02 = d[rows[0]];
    const double m10 = a[rows[1]], m11 = b[rows[1]], m12 = d[rows[1]];
    const double m20 = a[rows[2]], m21 = b[rows[2]], m22 = d[rows[2]];
    return m00 * (m11 * m22 - m12 * m21) - m01 * (m10 * m22 - m12 * m20) + m02 * (m10 * m21 - m11 * m20);
  };
  // Euclidean cofactors of det[a, b, d, w] along w, then raised with G.
  const LorentzVec c{-minor(0), minor(1), -minor(2), minor(3)};
  return {c.x1, c.x2, -c.x3, -c.x4};
}

bool AdSPoint::sign_rule_flips(const LorentzVec& v) {
  if (v.x3 != 0.0) return v.x3 < 0.0;
  return v.x4 < 0.0;
}

AdSPoint AdSPoint::from(const LorentzVec& v) {
  if (!v.finite()) throw Error(ErrorCode::NotTimelike, "non-finite point");
  const double q = inner(v, v);
  if (!(q < 0.0)) throw Error(ErrorCode::NotTimelike, "point representative must satisfy <x,x> < 0");
  // Already-normalized input is kept bit for bit so that duality round trips are exact.
  LorentzVec r = std::abs(q + 1.0) <= 8 * std::numeric_limits<double>::epsilon() * (1.0 + v.euclid_norm() * v.euclid_norm())
                     ? v
                     : v / std::sqrt(-q);
  if (sign_rule_flips(r)) r = -r;
  return AdSPoint(r);
}

bool AdSPoint::same_as(const AdSPoint& o, double tol) const {
  const double scale = 1.0 + rep_.euclid_norm();
  return (rep_ - o.rep_).euclid_norm() <= tol * scale || (rep_ + o.rep_).euclid_norm() <= tol * scale;
}

TangentVector TangentVector::make(const LorentzVec& base, const LorentzVec& dir) {
  const AdSPoint p = AdSPoint::from(base);
  const double sign = AdSPoint::sign_rule_flips(base) ? -1.0 : 1.0;
  const LorentzVec d = dir * sign;
  const double scale = 1.0 + p.rep().euclid_norm() * d.euclid_norm();
  if (std::abs(inner(p.rep(), d)) > 1e-10 * scale)
    throw Error(ErrorCode::OutOfRange, "tangent vector not orthogonal to its base point");
  return {p, d, ads3::causal_type(d)};
}

Plane Plane::from_dual(const LorentzVec& v) {
  const double q = inner(v, v);
  LorentzVec d = v;
  PlaneKind kind = PlaneKind::Lightlike;
  if (std::abs(q) >= kLightlikeTol) {
    d = v / std::sqrt(std::abs(q));
    kind = q < 0 ? PlaneKind::Spacelike : PlaneKind::Timelike;
  }
  if (AdSPoint::sign_rule_flips(d)) d = -d;
  return {d, kind};
}

bool Plane::contains(const LorentzVec& x, double tol) const {
  return std::abs(inner(x, dual)) <= tol * (1.0 + x.euclid_norm());
}

Geodesic Geodesic::make(const AdSPoint& start, const LorentzVec& dir) {
  TangentVector t = TangentVector::make(start, dir);
  if (t.causal_type != CausalType::Lightlike) {
    const double q = std::abs(inner(t.dir, t.dir));
    t.dir = t.dir / std::sqrt(q);
  }
  return {start, t};
}

AdSPoint geodesic_eval(const Geodesic& g, double t) {
  const LorentzVec& p = g.start.rep();
  const LorentzVec& v = g.dir.dir;
  switch (g.dir.causal_type) {
    case CausalType::Spacelike: return AdSPoint::from(p * std::cosh(t) + v * std::sinh(t));
    case CausalType::Timelike: return AdSPoint::from(p * std::cos(t) + v * std::sin(t));
    case CausalType::Lightlike: break;
  }
  throw Error(ErrorCode::LightlikeDirection, "lightlike geodesics have no unit-speed parameterization");
}

Separation separation(const AdSPoint& p, const AdSPoint& q) {
  const double a = std::abs(inner(p.rep(), q.rep()));
  if (std::abs(a - 1.0) <= kLightlikeTol) return {CausalType::Lightlike, 0.0};
  if (a > 1.0) return {CausalType::Spacelike, std::acosh(a)};
  return {CausalType::Timelike, std::acos(a)};
}

Plane dual_plane(const AdSPoint& x) { return {x.rep(), PlaneKind::Spacelike}; }

AdSPoint dual_point(const Plane& P) {
  if (P.kind != PlaneKind::Spacelike) throw Error(ErrorCode::NotTimelike, "only spacelike planes have a dual point");
  return AdSPoint::from(P.dual);
}

double point_plane_distance(const AdSPoint& x, const Plane& P) {
  if (P.kind != PlaneKind::Spacelike) throw Error(ErrorCode::OutOfRange, "plane must be spacelike");
  const LorentzVec& p = P.dual;
  const double s = inner(x.rep(), p);
  if (std::abs(s) > 1.0 + 1e-9) throw Error(ErrorCode::OutOfRange, "point outside the dual distance range of the plane");
  if (std::abs(s) >= 1.0 - 1e-15) return kPi / 2;
  const LorentzVec foot = x.rep() + p * s;
  const LorentzVec n = is_future(foot, p) ? p : -p;
  return std::asin(std::clamp(-inner(x.rep(), n), -1.0, 1.0));
}

double hyperbolic_angle(const TangentVector& v, const TangentVector& w) {
  if (v.causal_type != CausalType::Timelike || w.causal_type != CausalType::Timelike)
    throw Error(ErrorCode::NotTimelike, "hyperbolic angle needs two timelike vectors");
  return std::acosh(std::max(1.0, std::abs(inner(v.dir, w.dir))));
}

LorentzVec cyl_embed_vec(double r, double theta, double zeta) {
  const double s = std::sinh(r), c = std::cosh(r);
  return {std::cos(theta) * s, std::sin(theta) * s, std::cos(zeta) * c, std::sin(zeta) * c};
}

AdSPoint cyl_embed(const CylCoords& c) { return AdSPoint::from(cyl_embed_vec(c.r, c.theta, c.zeta)); }

CylCoords cyl_coords(const AdSPoint& x) {
  const LorentzVec& v = x.rep();
  const double rho = std::hypot(v.x1, v.x2);
  CylCoords c;
  c.r = std::asinh(rho);
  c.theta = rho > 0 ? std::atan2(v.x2, v.x1) : 0.0;
  c.zeta = std::atan2(v.x4, v.x3);
  return c;
}

Isometry Isometry::inverse() const { return Isometry(gram() * m_.transpose() * gram()); }

double Isometry::orthonormality_residual() const {
  return (m_.transpose() * gram() * m_ - gram()).cwiseAbs().maxCoeff();
}

bool Isometry::is_valid(double tol) const {
  if (orthonormality_residual() > tol * (1.0 + m_.squaredNorm())) return false;
  if (std::abs(m_.determinant() - 1.0) > tol * (1.0 + m_.squaredNorm())) return false;
  const LorentzVec x0{0, 0, 1, 0}, v0{0, 0, 0, 1};
  return is_future(apply(x0), apply(v0));
}

Isometry Isometry::random(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      s(i, j) = nd(rng);
      s(j, i) = -s(i, j);
    }
  // G S with S antisymmetric lies in so(2,2); its exponential is in the identity component.
  const Eigen::Matrix4d a = gram() * s;
  return Isometry(a.exp());
}

Isometry Isometry::height_shift(double s) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(2, 2) = std::cos(s);
  m(2, 3) = -std::sin(s);
  m(3, 2) = std::sin(s);
  m(3, 3) = std::cos(s);
  return Isometry(m);
}

Isometry Isometry::angle_shift(double s) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = std::cos(s);
  m(0, 1) = -std::sin(s);
  m(1, 0) = std::sin(s);
  m(1, 1) = std::cos(s);
  return Isometry(m);
}

namespace {

Eigen::Matrix4d frame_matrix(const Frame& f) {
  const LorentzVec& x = f.point.rep();
  if (!f.normal.base.same_as(f.point) || !f.tangent.base.same_as(f.point))
    throw Error(ErrorCode::DegenerateFrame, "frame vectors are not based at the frame point");
  // Both share the sign rule of the base, so the stored directions are already aligned with x.
  const LorentzVec& n = f.normal.dir;
  const LorentzVec& e = f.tangent.dir;

  const double tol = 1e-8;
  const double scale = 1.0 + x.euclid_norm() * (n.euclid_norm() + e.euclid_norm());
  const bool ok = std::abs(inner(x, x) + 1.0) <= tol * scale && std::abs(inner(n, n) + 1.0) <= tol * scale &&
                  std::abs(inner(e, e) - 1.0) <= tol * scale && std::abs(inner(x, n)) <= tol * scale &&
                  std::abs(inner(x, e)) <= tol * scale && std::abs(inner(n, e)) <= tol * scale;
  if (!ok) throw Error(ErrorCode::DegenerateFrame, "frame Gram matrix deviates from diag(-1,-1,1)");
  if (!is_future(x, n)) throw Error(ErrorCode::DegenerateFrame, "frame normal must be future directed");

  LorentzVec f4 = lorentz_cross(e, x, n);
  const double q = inner(f4, f4);
  if (!(q > 0)) throw Error(ErrorCode::DegenerateFrame, "frame completion is not spacelike");
  f4 = f4 / std::sqrt(q);
  Eigen::Matrix4d m;
  m.col(0) = e.eigen();
  m.col(1) = f4.eigen();
  m.col(2) = x.eigen();
  m.col(3) = n.eigen();
  if (m.determinant() < 0) m.col(1) = -m.col(1);
  return m;
}

}  // namespace

Isometry isometry_from_frames(const Frame& a, const Frame& b) {
  const Eigen::Matrix4d fa = frame_matrix(a);
  const Eigen::Matrix4d fb = frame_matrix(b);
  // fa^{-1} = G fa^T G because fa^T G fa = G.
  return Isometry(fb * gram() * fa.transpose() * gram());
}

AdSPoint random_point(std::mt19937_64& rng, double r_max) {
  std::uniform_real_distribution<double> ur(0.0, r_max), ua(-kPi, kPi), uz(-kPi / 2 + 1e-3, kPi / 2 - 1e-3);
  return cyl_embed({ur(rng), ua(rng), uz(rng)});
}

TangentVector random_unit_tangent(std::mt19937_64& rng, const AdSPoint& x, CausalType type) {
  const LorentzVec& p = x.rep();
  LorentzVec t = time_field(p);
  t = t / std::sqrt(-inner(t, t));
  // Spacelike orthonormal pair completing (x, t).
  LorentzVec basis[2];
  int found = 0;
  const LorentzVec cand[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  for (const auto& c : cand) {
    if (found == 2) break;
    LorentzVec w = c + p * inner(c, p) + t * inner(c, t);
    for (int k = 0; k < found; ++k) w -= basis[k] * inner(w, basis[k]);
    const double q = inner(w, w);
    if (q > 1e-6) basis[found++] = w / std::sqrt(q);
  }
  std::uniform_real_distribution<double> ua(0.0, 2 * kPi), ur(-1.5, 1.5);
  const double phi = ua(rng), a = ur(rng);
  const LorentzVec s = basis[0] * std::cos(phi) + basis[1] * std::sin(phi);
  LorentzVec d;
  switch (type) {
    case CausalType::Timelike: d = t * std::cosh(a) + s * std::sinh(a); break;
    case CausalType::Spacelike: d = t * std::sinh(a) + s * std::cosh(a); break;
    case CausalType::Lightlike: d = t + s; break;
  }
  return TangentVector::make(p, d);
}

}  // namespace ads3
