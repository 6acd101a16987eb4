#pragma once

// Polar parameter grid for surfaces written in cylindrical coordinates, and the
// fourth-order difference stencils used on it.
//
// Rings sit at r_i = (i + 1/2) h for i = 0..n_r, so no vertex lands on the pole and
// ring n_r is the outer (Dirichlet) ring at R_max. A ring index i < 0 names the
// point (-r, theta) = (r_{-i-1}, theta + pi): stencils reach across the pole through
// that mirror and the radial spacing stays uniform. n_theta must be even.

#include <array>
#include <cstddef>
#include <vector>

namespace ads3 {

// Weights for derivatives 0..2 at z from five nodes (Fornberg's recursion).
// w[m][k] multiplies the value at x[k] for the m-th derivative.
std::array<std::array<double, 5>, 3> fd_weights(double z, const std::array<double, 5>& x);

struct PolarGrid {
  int n_r = 0;      // interior rings; ring n_r is the outer ring
  int n_theta = 0;
  double r_max = 0;
  double h = 0;       // radial spacing
  double dtheta = 0;

  static PolarGrid make(double r_max, int n_r, int n_theta);

  int rings() const { return n_r + 1; }
  std::size_t size() const { return static_cast<std::size_t>(rings()) * n_theta; }
  double r(int i) const { return (i + 0.5) * h; }
  double theta(int j) const { return j * dtheta; }
  int wrap(int j) const { return ((j % n_theta) + n_theta) % n_theta; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_theta + wrap(j); }
  // Vertex holding the extended grid point (i, j); i may be negative.
  std::size_t resolve(int i, int j) const {
    return i >= 0 ? index(i, j) : index(-i - 1, j + n_theta / 2);
  }
  int ring_of(std::size_t v) const { return static_cast<int>(v / n_theta); }
  int sector_of(std::size_t v) const { return static_cast<int>(v % n_theta); }
};

// Five-point stencils at one ring. Radial windows are centered where the outer
// ring allows and shifted inward otherwise.
struct RingStencil {
  int first = 0;                  // ring index of the window's first node
  std::array<double, 5> d1{}, d2{};
};

struct Stencils {
  std::vector<RingStencil> ring;  // by ring, 0..n_r
  std::array<double, 5> t1{}, t2{};  // theta offsets -2..2

  explicit Stencils(const PolarGrid& g);
};

}  // namespace ads3
