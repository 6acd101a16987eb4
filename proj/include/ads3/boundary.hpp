#pragma once

// The boundary quadric of AdS^3 as RP^1 x RP^1, circle homeomorphisms acting on
// RP^1, cross ratios, and the cross-ratio norm estimator.
//
// RP^1 is parameterized two ways: by an angle theta mod 2 pi, and by the real
// coordinate x = tan(theta/2) with theta = pi as infinity. Homeomorphisms are
// evaluated through lifts R -> R with phi(theta + 2 pi) = phi(theta) + 2 pi whose
// displacement phi(theta) - theta at theta = 0 lies in (-pi, pi].

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ads3/lorentz.hpp"

namespace ads3 {

// Null point [cos a, sin a, cos b, sin b]. Left and right coordinates are
// theta_l = a + b and theta_r = a - b.
struct BoundaryPoint {
  double alpha = 0, beta = 0;

  double theta_l() const { return alpha + beta; }
  double theta_r() const { return alpha - beta; }
  LorentzVec rep() const { return {std::cos(alpha), std::sin(alpha), std::cos(beta), std::sin(beta)}; }

  // Same projective point with beta moved into (-pi/2, pi/2].
  BoundaryPoint normalized() const;
  // Projective class of a nonzero null vector.
  static BoundaryPoint from_null(const LorentzVec& v);
};

double project_left(const BoundaryPoint& p);
double project_right(const BoundaryPoint& p);
BoundaryPoint boundary_from_graph(double theta_l, double theta_r);

// x -> (a x + b) / (c x + d), ad - bc = 1.
struct Mobius {
  double a = 1, b = 0, c = 0, d = 1;

  // Rescales to unit determinant; throws DegenerateQuadruple if ad - bc <= 0.
  static Mobius make(double a, double b, double c, double d);
  static Mobius identity() { return {}; }
  // theta -> theta + angle.
  static Mobius rotation(double angle);
  // x -> e^s x.
  static Mobius dilation(double s);
  // x -> x + t.
  static Mobius translation(double t);
  // exp of a random sl(2) element with entries of size ~scale.
  static Mobius random(std::mt19937_64& rng, double scale);

  // Extended-real action; infinity is +inf.
  double apply(double x) const;
  // Lift on angles, displacement in (-2 pi, 2 pi) and continuous in theta.
  double apply_angle(double theta) const;
  Mobius inverse() const { return {d, -b, -c, a}; }
  Mobius operator*(const Mobius& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
};

class CircleHomeo {
 public:
  enum class Kind { Mobius, Shear, Power, Sampled, Compose };

  static CircleHomeo mobius(const Mobius& m);
  // axis o S_t o axis^-1 where S_t fixes x <= 0 and scales x >= 0 by e^t.
  static CircleHomeo shear(double t, const Mobius& axis = Mobius::identity());
  // x -> sign(x) |x|^a, a > 0.
  static CircleHomeo power(double a);
  // Periodic monotone cubic through (theta_i, phi_i); both sequences strictly
  // increasing with theta_last - theta_0 < 2 pi and phi_last - phi_0 < 2 pi.
  static CircleHomeo sampled(std::vector<double> theta, std::vector<double> phi);
  // parts[0] o parts[1] o ... (last applied first).
  static CircleHomeo compose(const std::vector<CircleHomeo>& parts);

  Kind kind() const;
  std::string describe() const;

  double eval(double theta) const;
  double inverse(double theta) const;
  // Action on the real coordinate, infinity allowed.
  double eval_real(double x) const;

  // Strict monotonicity and the period condition on a 2048-point grid.
  void validate() const;
  // max |phi(theta) - theta| on the validation grid.
  double max_displacement() const;

  struct Node;

 private:
  explicit CircleHomeo(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline double homeo_eval(const CircleHomeo& phi, double theta) { return phi.eval(theta); }
inline double homeo_inverse(const CircleHomeo& phi, double theta) { return phi.inverse(theta); }

// Real coordinates of four points of RP^1; +inf is the point at infinity.
struct Quadruple {
  std::array<double, 4> z{};
};

// (z4 - z1)(z3 - z2) / ((z2 - z1)(z3 - z4)), factors containing infinity dropped.
double cross_ratio(const Quadruple& q);
// Same cross ratio for points given by angles.
double cross_ratio_angles(const std::array<double, 4>& theta);
Quadruple symmetric_quadruple(const Mobius& m);

inline double angle_to_real(double theta) {
  const double c = std::cos(theta / 2);
  return std::abs(c) < 1e-300 ? std::numeric_limits<double>::infinity() : std::sin(theta / 2) / c;
}
inline double real_to_angle(double x) { return std::isinf(x) ? kPi : 2 * std::atan(x); }

struct SearchConfig {
  int grid = 17;
  int restarts = 32;
  long max_evals = 400000;
  std::uint64_t seed = 0;
  double rho_max = 6.0;  // grid extent of the hyperbolic radius of the cross center
};

struct NormEstimate {
  double value = 0;
  Quadruple witness;
  std::array<double, 4> witness_angles{};
  long evaluations = 0;
  int restarts = 0;
  bool partial = false;  // evaluation budget ran out
};

NormEstimate cross_ratio_norm(const CircleHomeo& phi, const SearchConfig& cfg);

// Ordered boundary samples and their affine chart images (x1/x3, x2/x3, x4/x3).
struct BoundaryCurve {
  std::vector<BoundaryPoint> points;
  std::vector<Eigen::Vector3d> chart_points;

  // Throws ChartSingularity if a point sits on x3 = 0.
  static BoundaryCurve from_points(std::vector<BoundaryPoint> pts);
  BoundaryCurve transformed(const Isometry& T) const;
  std::size_t size() const { return points.size(); }
};

Eigen::Vector3d chart_of(const BoundaryPoint& p);

// n samples (theta, phi(theta)) at theta = 2 pi k / n.
BoundaryCurve graph_samples(const CircleHomeo& phi, int n);

// zeta with theta - zeta = phi(theta + zeta), |zeta| < pi/2.
double boundary_height(const CircleHomeo& phi, double theta);

}  // namespace ads3
