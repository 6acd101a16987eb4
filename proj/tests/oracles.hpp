#pragma once

// Test-side reference computations. These are written from the defining
// formulas and deliberately share no code with the library routines they check.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "ads3/lorentz.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Cross ratio (z4-z1)(z3-z2) / ((z2-z1)(z3-z4)) in the real line, factors with an
// infinite entry dropped.
double cross_ratio_real(const std::array<double, 4>& z);

// Real Mobius map x -> (a x + b) / (c x + d) on the extended line.
double mobius_real(double a, double b, double c, double d, double x);

// Timelike distance between two points by integrating the arc length of the
// connecting geodesic numerically; checks the closed-form arccos law.
double timelike_length_by_quadrature(const ads3::LorentzVec& p, const ads3::LorentzVec& q, int steps);

// Brute-force width of the convex hull of finitely many ideal points: maximizes the
// timelike separation over pairs drawn from dense random convex combinations on the
// past and future boundaries given as explicit triangle lists.
struct Tri {
  ads3::LorentzVec a, b, c;  // homogeneous chart points (x, y, 1, z)
};
double brute_force_width(const std::vector<Tri>& past, const std::vector<Tri>& future, int samples_per_tri,
                         std::mt19937_64& rng);

// Height of the totally geodesic plane with unit timelike dual p over the cylinder
// point (r, theta), on the branch closest to zeta_ref.
double plane_height(const ads3::LorentzVec& p, double r, double theta, double zeta_ref);

// Unit timelike vector orthogonal to three null vectors on a common plane.
ads3::LorentzVec plane_through(const ads3::LorentzVec& a, const ads3::LorentzVec& b, const ads3::LorentzVec& c);

}  // namespace oracle
