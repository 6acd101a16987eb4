#pragma once

// Small-dimension Nelder-Mead maximizer shared by the norm and width searches.
// Internal header, not installed.

#include <algorithm>
#include <array>
#include <cmath>

namespace ads3::detail {

template <int N>
struct NMPoint {
  std::array<double, N> x;
  double f;
};

// Maximizes f from x0 with an axis-aligned initial simplex of the given steps.
// Counts evaluations in `evals`; stops after `budget` further evaluations, when the
// simplex collapses below `xtol`, or when values agree to `ftol` and it is below 1e-9.
template <int N, class F>
NMPoint<N> nelder_mead_max(F& f, long& evals, const std::array<double, N>& x0, const std::array<double, N>& step,
                           long budget, double ftol, double xtol = 1e-13) {
  using Vec = std::array<double, N>;
  using Pt = NMPoint<N>;
  auto eval = [&](const Vec& x) {
    ++evals;
    return f(x);
  };
  std::array<Pt, N + 1> s;
  s[0] = {x0, eval(x0)};
  for (int i = 0; i < N; ++i) {
    Vec x = x0;
    x[i] += step[i];
    s[i + 1] = {x, eval(x)};
  }
  const long start = evals;
  auto by_value = [](const Pt& a, const Pt& b) { return a.f > b.f; };
  while (evals - start < budget) {
    std::sort(s.begin(), s.end(), by_value);
    double spread = 0;
    for (int i = 1; i <= N; ++i)
      for (int k = 0; k < N; ++k) spread = std::max(spread, std::abs(s[i].x[k] - s[0].x[k]));
    if (s[0].f - s[N].f <= ftol * (1.0 + std::abs(s[0].f)) && spread < 1e-9) break;
    if (spread < xtol) break;
    Vec cen{};
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) cen[k] += s[i].x[k] / N;
    auto along = [&](double t) {
      Vec x;
      for (int k = 0; k < N; ++k) x[k] = cen[k] + t * (s[N].x[k] - cen[k]);
      return x;
    };
    const Vec xr = along(-1.0);
    const double fr = eval(xr);
    if (fr > s[0].f) {
      const Vec xe = along(-2.0);
      const double fe = eval(xe);
      s[N] = fe > fr ? Pt{xe, fe} : Pt{xr, fr};
    } else if (fr > s[N - 1].f) {
      s[N] = {xr, fr};
    } else {
      const bool outside = fr > s[N].f;
      const Vec xc = along(outside ? -0.5 : 0.5);
      const double fc = eval(xc);
      if (fc > std::max(fr, s[N].f)) {
        s[N] = {xc, fc};
      } else {
        for (int i = 1; i <= N; ++i) {
          for (int k = 0; k < N; ++k) s[i].x[k] = s[0].x[k] + 0.5 * (s[i].x[k] - s[0].x[k]);
          s[i].f = eval(s[i].x);
        }
      }
    }
  }
  return *std::max_element(s.begin(), s.end(), [](const Pt& a, const Pt& b) { return a.f < b.f; });
}

}  // namespace ads3::detail
