#include "ads3/boundary.hpp"

#include <algorithm>
#include <cmath>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>
#include <cstdio>
#include <limits>

namespace ads3 {

namespace {

constexpr double kTwoPi = 2 * kPi;
constexpr int kValidationGrid = 2048;

// Representative of theta in [-pi, pi) and the number of periods removed.
double reduce(double theta, double& periods) {
  periods = std::floor((theta + kPi) / kTwoPi);
  return theta - kTwoPi * periods;
}

double shear_lift(double t, double theta) {
  double k;
  const double s = reduce(theta, k);
  const double out = s <= 0 ? s : 2 * std::atan(std::exp(t) * std::tan(s / 2));
  return out + kTwoPi * k;
}

double power_lift(double a, double theta) {
  double k;
  const double s = reduce(theta, k);
  if (s == -kPi) return theta;
  const double x = std::tan(s / 2);
  const double y = std::copysign(std::pow(std::abs(x), a), x);
  return 2 * std::atan(y) + kTwoPi * k;
}

}  // namespace

struct CircleHomeo::Node {
  Kind kind = Kind::Mobius;
  Mobius m;
  double param = 0;
  std::vector<CircleHomeo> parts;
  std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline;
  double theta0 = 0;
  double offset = 0;        // multiple of 2 pi centering the lift
  double max_disp = kPi;    // filled after construction

  double raw(double theta) const {
    switch (kind) {
      case Kind::Mobius: return m.apply_angle(theta);
      case Kind::Shear: return m.apply_angle(shear_lift(param, m.inverse().apply_angle(theta)));
      case Kind::Power: return power_lift(param, theta);
      case Kind::Sampled: {
        const double k = std::floor((theta - theta0) / kTwoPi);
        return (*spline)(theta - kTwoPi * k) + kTwoPi * k;
      }
      case Kind::Compose: {
        double v = theta;
        for (auto it = parts.rbegin(); it != parts.rend(); ++it) v = it->eval(v);
        return v;
      }
    }
    return theta;
  }
};

BoundaryPoint BoundaryPoint::normalized() const {
  const double k = std::round(beta / kPi);
  BoundaryPoint p{alpha - k * kPi, beta - k * kPi};
  if (p.beta <= -kPi / 2) {
    p.alpha += kPi;
    p.beta += kPi;
  }
  p.alpha = std::remainder(p.alpha, kTwoPi);
  return p;
}

BoundaryPoint BoundaryPoint::from_null(const LorentzVec& v) {
  const double s = std::hypot(v.x1, v.x2), t = std::hypot(v.x3, v.x4);
  if (!(s > 0) || std::abs(s - t) > 1e-9 * (s + t)) throw Error(ErrorCode::OutOfRange, "vector is not null");
  return BoundaryPoint{std::atan2(v.x2, v.x1), std::atan2(v.x4, v.x3)}.normalized();
}

double project_left(const BoundaryPoint& p) { return p.theta_l(); }
double project_right(const BoundaryPoint& p) { return p.theta_r(); }

BoundaryPoint boundary_from_graph(double theta_l, double theta_r) {
  return {(theta_l + theta_r) / 2, (theta_l - theta_r) / 2};
}

Mobius Mobius::make(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!(det > 0)) throw Error(ErrorCode::DegenerateQuadruple, "Mobius matrix must have positive determinant");
  const double s = 1.0 / std::sqrt(det);
  return {a * s, b * s, c * s, d * s};
}

Mobius Mobius::rotation(double angle) {
  // Half-angle rotation of (cos(theta/2), sin(theta/2)).
  const double h = angle / 2;
  return {std::cos(h), std::sin(h), -std::sin(h), std::cos(h)};
}

Mobius Mobius::dilation(double s) { return {std::exp(s / 2), 0, 0, std::exp(-s / 2)}; }

Mobius Mobius::translation(double t) { return {1, t, 0, 1}; }

Mobius Mobius::random(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  const double p = nd(rng), q = nd(rng), r = nd(rng);
  // exp [[p, q], [r, -p]] = C I + S A with A^2 = (p^2 + q r) I.
  const double d2 = p * p + q * r;
  double C, S;
  if (d2 > 1e-14) {
    const double d = std::sqrt(d2);
    C = std::cosh(d), S = std::sinh(d) / d;
  } else if (d2 < -1e-14) {
    const double d = std::sqrt(-d2);
    C = std::cos(d), S = std::sin(d) / d;
  } else {
    C = 1, S = 1;
  }
  return make(C + S * p, S * q, S * r, C - S * p);
}

double Mobius::apply(double x) const {
  if (std::isinf(x)) return c == 0 ? std::numeric_limits<double>::infinity() : a / c;
  const double den = c * x + d;
  if (den == 0) return std::numeric_limits<double>::infinity();
  return (a * x + b) / den;
}

double Mobius::apply_angle(double theta) const {
  // The matrix acts on (sin(theta/2), cos(theta/2)) as on (x, 1). With the sign
  // fixed so the trace is nonnegative, the image never points opposite to the
  // input, so the turning angle is continuous and below pi.
  const double sg = (a + d) < 0 ? -1.0 : 1.0;
  const double s = std::sin(theta / 2), co = std::cos(theta / 2);
  const double ns = sg * (a * s + b * co), nc = sg * (c * s + d * co);
  const double turn = std::atan2(co * ns - s * nc, co * nc + s * ns);
  return theta + 2 * turn;
}

CircleHomeo::Kind CircleHomeo::kind() const { return node_->kind; }

std::string CircleHomeo::describe() const {
  char buf[160];
  switch (node_->kind) {
    case Kind::Mobius:
      std::snprintf(buf, sizeof buf, "mobius(%.6g,%.6g,%.6g,%.6g)", node_->m.a, node_->m.b, node_->m.c, node_->m.d);
      return buf;
    case Kind::Shear: std::snprintf(buf, sizeof buf, "shear(t=%.6g)", node_->param); return buf;
    case Kind::Power: std::snprintf(buf, sizeof buf, "power(a=%.6g)", node_->param); return buf;
    case Kind::Sampled: return "sampled";
    case Kind::Compose: {
      std::string s = "compose(";
      for (std::size_t i = 0; i < node_->parts.size(); ++i) s += (i ? "," : "") + node_->parts[i].describe();
      return s + ")";
    }
  }
  return "?";
}

double CircleHomeo::eval(double theta) const { return node_->raw(theta) + node_->offset; }

double CircleHomeo::eval_real(double x) const { return angle_to_real(eval(real_to_angle(x))); }

double CircleHomeo::inverse(double y) const {
  const double span = node_->max_disp + 0.1;
  double lo = y - span, hi = y + span;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::abs(y)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (eval(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double CircleHomeo::max_displacement() const { return node_->max_disp; }

void CircleHomeo::validate() const {
  double prev = eval(-kPi);
  const double first = prev;
  for (int k = 1; k <= kValidationGrid; ++k) {
    const double th = -kPi + kTwoPi * k / kValidationGrid;
    const double v = eval(th);
    if (!std::isfinite(v) || !(v > prev))
      throw Error(ErrorCode::NotMonotone, describe() + " is not strictly increasing near theta=" + std::to_string(th));
    prev = v;
  }
  if (std::abs(prev - first - kTwoPi) > 1e-9)
    throw Error(ErrorCode::NotMonotone, describe() + " does not have degree one");
}

namespace {

CircleHomeo finish(std::shared_ptr<CircleHomeo::Node> n, CircleHomeo h);

}  // namespace

CircleHomeo CircleHomeo::mobius(const Mobius& m) {
  if (std::abs(m.a * m.d - m.b * m.c - 1.0) > 1e-12)
    throw Error(ErrorCode::NotMonotone, "Mobius matrix must have unit determinant");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mobius;
  n->m = m;
  return finish(n, CircleHomeo(n));
}

CircleHomeo CircleHomeo::shear(double t, const Mobius& axis) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Shear;
  n->param = t;
  n->m = axis;
  return finish(n, CircleHomeo(n));
}

CircleHomeo CircleHomeo::power(double a) {
  if (!(a > 0)) throw Error(ErrorCode::NotMonotone, "power exponent must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->param = a;
  return finish(n, CircleHomeo(n));
}

CircleHomeo CircleHomeo::sampled(std::vector<double> theta, std::vector<double> phi) {
  const std::size_t k = theta.size();
  if (k < 4 || phi.size() != k) throw Error(ErrorCode::NotMonotone, "sampled homeomorphism needs >= 4 matched knots");
  for (std::size_t i = 1; i < k; ++i)
    if (!(theta[i] > theta[i - 1]) || !(phi[i] > phi[i - 1]))
      throw Error(ErrorCode::NotMonotone, "knots must be strictly increasing in both coordinates");
  if (!(theta.back() - theta.front() < kTwoPi) || !(phi.back() - phi.front() < kTwoPi))
    throw Error(ErrorCode::NotMonotone, "knots must span less than one period");
  // Three knots of padding on each side make the periodic extension C^1 across the seam.
  const std::size_t pad = std::min<std::size_t>(3, k);
  std::vector<double> x, y;
  for (std::size_t i = k - pad; i < k; ++i) x.push_back(theta[i] - kTwoPi), y.push_back(phi[i] - kTwoPi);
  for (std::size_t i = 0; i < k; ++i) x.push_back(theta[i]), y.push_back(phi[i]);
  for (std::size_t i = 0; i < pad; ++i) x.push_back(theta[i] + kTwoPi), y.push_back(phi[i] + kTwoPi);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sampled;
  n->theta0 = theta.front();
  n->spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(x), std::move(y));
  return finish(n, CircleHomeo(n));
}

CircleHomeo CircleHomeo::compose(const std::vector<CircleHomeo>& parts) {
  if (parts.empty()) return mobius(Mobius::identity());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compose;
  n->parts = parts;
  return finish(n, CircleHomeo(n));
}

namespace {

CircleHomeo finish(std::shared_ptr<CircleHomeo::Node> n, CircleHomeo h) {
  const double d0 = n->raw(0.0);
  n->offset = -kTwoPi * std::ceil((d0 - kPi) / kTwoPi);
  double md = 0;
  for (int k = 0; k < kValidationGrid; ++k) {
    const double th = -kPi + kTwoPi * k / kValidationGrid;
    md = std::max(md, std::abs(n->raw(th) + n->offset - th));
  }
  n->max_disp = md;
  h.validate();
  return h;
}

}  // namespace

double cross_ratio(const Quadruple& q) {
  const auto& z = q.z;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const bool both_inf = std::isinf(z[i]) && std::isinf(z[j]);
      const bool close = !std::isinf(z[i]) && !std::isinf(z[j]) &&
                         std::abs(z[i] - z[j]) <= 1e-15 * std::max({1.0, std::abs(z[i]), std::abs(z[j])});
      if (both_inf || close || std::isnan(z[i])) throw Error(ErrorCode::DegenerateQuadruple, "coincident points");
    }
  // z_i - z_j ~ +z_i or -z_j as the infinite entry grows; only the sign survives the ratio.
  auto f = [&](int i, int j) { return std::isinf(z[i]) ? 1.0 : std::isinf(z[j]) ? -1.0 : z[i] - z[j]; };
  return f(3, 0) * f(2, 1) / (f(1, 0) * f(2, 3));
}

double cross_ratio_angles(const std::array<double, 4>& t) {
  auto s = [&](int i, int j) { return std::sin((t[i] - t[j]) / 2); };
  return s(3, 0) * s(2, 1) / (s(1, 0) * s(2, 3));
}

Quadruple symmetric_quadruple(const Mobius& m) {
  const double inf = std::numeric_limits<double>::infinity();
  return {{m.apply(-1.0), m.apply(0.0), m.apply(1.0), m.apply(inf)}};
}

Eigen::Vector3d chart_of(const BoundaryPoint& p0) {
  const BoundaryPoint p = p0.normalized();
  const double cb = std::cos(p.beta);
  if (std::abs(cb) < 1e-12) throw Error(ErrorCode::ChartSingularity, "boundary point on the plane at infinity x3 = 0");
  return {std::cos(p.alpha) / cb, std::sin(p.alpha) / cb, std::tan(p.beta)};
}

BoundaryCurve BoundaryCurve::from_points(std::vector<BoundaryPoint> pts) {
  BoundaryCurve c;
  c.chart_points.reserve(pts.size());
  for (auto& p : pts) {
    p = p.normalized();
    c.chart_points.push_back(chart_of(p));
  }
  c.points = std::move(pts);
  return c;
}

BoundaryCurve BoundaryCurve::transformed(const Isometry& T) const {
  std::vector<BoundaryPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(BoundaryPoint::from_null(T.apply(p.rep())));
  return from_points(std::move(out));
}

BoundaryCurve graph_samples(const CircleHomeo& phi, int n) {
  if (n < 4) throw Error(ErrorCode::TooFewPoints, "graph_samples needs n >= 4");
  std::vector<BoundaryPoint> pts;
  pts.reserve(n);
  double prev_a = 0, prev_b = 0;
  for (int k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    const BoundaryPoint p = boundary_from_graph(th, phi.eval(th));
    // The unnormalized lift is continuous, so consecutive differences are meaningful here.
    if (k > 0 && std::abs(p.beta - prev_b) > std::abs(p.alpha - prev_a) + 1e-12)
      throw Error(ErrorCode::NotMonotone, "consecutive samples are not achronal");
    prev_a = p.alpha, prev_b = p.beta;
    pts.push_back(p);
  }
  return BoundaryCurve::from_points(std::move(pts));
}

double boundary_height(const CircleHomeo& phi, double theta) {
  auto g = [&](double z) { return phi.eval(theta + z) + z - theta; };
  const double lo = -kPi / 2, hi = kPi / 2;
  const double glo = g(lo), ghi = g(hi);
  if (glo == 0) return lo;
  if (!(glo < 0 && ghi > 0)) throw Error(ErrorCode::RootNotBracketed, "no boundary height in (-pi/2, pi/2)");
  auto stop = [](double a, double b) { return std::abs(b - a) <= 2e-13; };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::bisect(g, lo, hi, stop, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace ads3
