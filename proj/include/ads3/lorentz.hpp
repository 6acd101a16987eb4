#pragma once

// Lorentzian linear algebra on R^{2,2} and the basic objects of AdS^3.
//
// Points of AdS^3 live on the quadric <x,x> = -1 modulo x ~ -x. Every AdSPoint
// keeps one representative chosen by a fixed sign rule (x3 > 0, else x4 > 0), so
// two points are equal iff their representatives agree. Tangent vectors follow
// their base point through that sign flip, which keeps time orientation well
// defined on the quotient.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>

#include "ads3/errors.hpp"

namespace ads3 {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLightlikeTol = 1e-10;

struct LorentzVec {
  double x1 = 0, x2 = 0, x3 = 0, x4 = 0;

  double& operator[](int i) { return i == 0 ? x1 : i == 1 ? x2 : i == 2 ? x3 : x4; }
  double operator[](int i) const { return i == 0 ? x1 : i == 1 ? x2 : i == 2 ? x3 : x4; }

  LorentzVec operator+(const LorentzVec& o) const { return {x1 + o.x1, x2 + o.x2, x3 + o.x3, x4 + o.x4}; }
  LorentzVec operator-(const LorentzVec& o) const { return {x1 - o.x1, x2 - o.x2, x3 - o.x3, x4 - o.x4}; }
  LorentzVec operator-() const { return {-x1, -x2, -x3, -x4}; }
  LorentzVec operator*(double s) const { return {x1 * s, x2 * s, x3 * s, x4 * s}; }
  LorentzVec operator/(double s) const { return {x1 / s, x2 / s, x3 / s, x4 / s}; }
  LorentzVec& operator+=(const LorentzVec& o) { x1 += o.x1; x2 += o.x2; x3 += o.x3; x4 += o.x4; return *this; }
  LorentzVec& operator-=(const LorentzVec& o) { x1 -= o.x1; x2 -= o.x2; x3 -= o.x3; x4 -= o.x4; return *this; }
  LorentzVec& operator*=(double s) { x1 *= s; x2 *= s; x3 *= s; x4 *= s; return *this; }

  bool finite() const { return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3) && std::isfinite(x4); }
  double euclid_norm() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4); }
  Eigen::Vector4d eigen() const { return {x1, x2, x3, x4}; }
  static LorentzVec from(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
};

inline LorentzVec operator*(double s, const LorentzVec& v) { return v * s; }

// <a,b> = a1 b1 + a2 b2 - a3 b3 - a4 b4
inline double inner(const LorentzVec& a, const LorentzVec& b) {
  return a.x1 * b.x1 + a.x2 * b.x2 - a.x3 * b.x3 - a.x4 * b.x4;
}

// The Gram matrix diag(1,1,-1,-1).
const Eigen::Matrix4d& gram();

enum class CausalType { Spacelike, Timelike, Lightlike };
const char* to_string(CausalType t);

// |<v,v>| < kLightlikeTol is lightlike.
CausalType causal_type(const LorentzVec& v);

// The future-pointing timelike field J x = (0, 0, -x4, x3); (0,0,0,1) at (0,0,1,0).
inline LorentzVec time_field(const LorentzVec& x) { return {0.0, 0.0, -x.x4, x.x3}; }

// v in T_x is future iff <v, Jx> < 0.
inline bool is_future(const LorentzVec& x, const LorentzVec& v) { return inner(v, time_field(x)) < 0.0; }

// Vector c with <c, w> = det[a, b, d, w] for every w; it is Lorentz-orthogonal to a, b, d.
LorentzVec lorentz_cross(const LorentzVec& a, const LorentzVec& b, const LorentzVec& d);

class AdSPoint {
 public:
  // Normalizes v to <v,v> = -1 and applies the sign rule. Throws NotTimelike when <v,v> >= 0.
  static AdSPoint from(const LorentzVec& v);

  const LorentzVec& rep() const { return rep_; }
  // Projective equality; compares both signs.
  bool same_as(const AdSPoint& o, double tol = 1e-9) const;
  // True when from() flipped the sign of v.
  static bool sign_rule_flips(const LorentzVec& v);

 private:
  explicit AdSPoint(const LorentzVec& r) : rep_(r) {}
  LorentzVec rep_;
};

struct TangentVector {
  AdSPoint base;
  LorentzVec dir;
  CausalType causal_type;

  // base is any representative; dir flips sign together with it.
  static TangentVector make(const LorentzVec& base, const LorentzVec& dir);
  static TangentVector make(const AdSPoint& base, const LorentzVec& dir) { return make(base.rep(), dir); }
  bool future() const { return is_future(base.rep(), dir); }
};

enum class PlaneKind { Spacelike, Timelike, Lightlike };

struct Plane {
  LorentzVec dual;  // unit (when not lightlike), sign rule applied
  PlaneKind kind;

  static Plane from_dual(const LorentzVec& v);
  bool contains(const LorentzVec& x, double tol = 1e-10) const;
};

struct Geodesic {
  AdSPoint start;
  TangentVector dir;  // unit for non-lightlike directions

  static Geodesic make(const AdSPoint& start, const LorentzVec& dir);
};

struct Separation {
  CausalType type;
  double value;
};

struct CylCoords {
  double r = 0, theta = 0, zeta = 0;
};

class Isometry {
 public:
  Isometry() : m_(Eigen::Matrix4d::Identity()) {}
  explicit Isometry(const Eigen::Matrix4d& m) : m_(m) {}

  const Eigen::Matrix4d& matrix() const { return m_; }
  LorentzVec apply(const LorentzVec& v) const { return LorentzVec::from(m_ * v.eigen()); }
  AdSPoint apply(const AdSPoint& p) const { return AdSPoint::from(apply(p.rep())); }
  TangentVector apply(const TangentVector& v) const { return TangentVector::make(apply(v.base.rep()), apply(v.dir)); }
  Isometry operator*(const Isometry& o) const { return Isometry(m_ * o.m_); }
  // G m^T G
  Isometry inverse() const;

  // m^T G m = G, det m = +1 and time orientation preserved, all within tol.
  bool is_valid(double tol = 1e-9) const;
  double orthonormality_residual() const;

  // exp of a random element of so(2,2) with generator entries of size ~scale.
  static Isometry random(std::mt19937_64& rng, double scale);
  // Rotation by s in the (x3,x4) plane; moves the cylindrical height by s.
  static Isometry height_shift(double s);
  // Rotation by s in the (x1,x2) plane; moves the cylindrical angle by s.
  static Isometry angle_shift(double s);

 private:
  Eigen::Matrix4d m_;
};

// Point, unit future timelike normal, unit spacelike tangent; mutually orthogonal.
struct Frame {
  AdSPoint point;
  TangentVector normal;
  TangentVector tangent;
};

AdSPoint geodesic_eval(const Geodesic& g, double t);
Separation separation(const AdSPoint& p, const AdSPoint& q);
Plane dual_plane(const AdSPoint& x);
AdSPoint dual_point(const Plane& P);

// Signed distance to a spacelike plane, positive on the future side.
// d = asin(-<x, n>) with n the unit normal of P that is future at the foot of x.
double point_plane_distance(const AdSPoint& x, const Plane& P);

double hyperbolic_angle(const TangentVector& v, const TangentVector& w);

LorentzVec cyl_embed_vec(double r, double theta, double zeta);
AdSPoint cyl_embed(const CylCoords& c);
CylCoords cyl_coords(const AdSPoint& x);

Isometry isometry_from_frames(const Frame& a, const Frame& b);

// Random point with r in [0, r_max] and |zeta| < pi/2.
AdSPoint random_point(std::mt19937_64& rng, double r_max);
// Random unit tangent at x of the requested causal type.
TangentVector random_unit_tangent(std::mt19937_64& rng, const AdSPoint& x, CausalType type);

}  // namespace ads3
