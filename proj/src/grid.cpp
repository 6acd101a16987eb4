#include "ads3/grid.hpp"

#include <algorithm>

#include "ads3/errors.hpp"
#include "ads3/lorentz.hpp"

namespace ads3 {

std::array<std::array<double, 5>, 3> fd_weights(double z, const std::array<double, 5>& x) {
  constexpr int n = 5, m = 2;
  std::array<std::array<double, 5>, 3> c{};
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

PolarGrid PolarGrid::make(double r_max, int n_r, int n_theta) {
  if (!(r_max > 0) || n_r < 4 || n_theta < 8 || n_theta % 2 != 0)
    throw Error(ErrorCode::ConfigInvalid, "polar grid needs r_max > 0, n_r >= 4 and even n_theta >= 8");
  PolarGrid g;
  g.n_r = n_r;
  g.n_theta = n_theta;
  g.r_max = r_max;
  g.h = r_max / (n_r + 0.5);
  g.dtheta = 2 * kPi / n_theta;
  return g;
}

Stencils::Stencils(const PolarGrid& g) {
  ring.resize(g.rings());
  for (int i = 0; i <= g.n_r; ++i) {
    RingStencil& s = ring[i];
    s.first = std::min(i - 2, g.n_r - 4);
    std::array<double, 5> x{};
    for (int k = 0; k < 5; ++k) x[k] = g.r(s.first + k);
    const auto w = fd_weights(g.r(i), x);
    s.d1 = w[1];
    s.d2 = w[2];
  }
  std::array<double, 5> x{};
  for (int k = 0; k < 5; ++k) x[k] = (k - 2) * g.dtheta;
  const auto w = fd_weights(0.0, x);
  t1 = w[1];
  t2 = w[2];
}

}  // namespace ads3
