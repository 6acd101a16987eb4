// Cross-ratio norm search. Symmetric quadruples are parameterized by the disk
// automorphism carrying the standard cross {psi - pi/2, psi, psi + pi/2, psi + pi}
// (a symmetric quadruple centered at the origin) to one centered at
// c = tanh(rho/2) e^{i beta}. (rho, beta, psi) covers every symmetric quadruple.
//
// Coarse grid, then Nelder-Mead from the best grid cells, then restarts from the
// incumbent until it stops improving.

#include <algorithm>
#include <complex>
#include <numeric>

#include "ads3/boundary.hpp"
#include "nelder_mead.hpp"

namespace ads3 {

namespace {

using Vec3 = std::array<double, 3>;

struct Objective {
  const CircleHomeo& phi;
  long evals = 0;

  std::array<double, 4> angles(const Vec3& p) const {
    const double rho = p[0], beta = p[1], psi = p[2];
    const std::complex<double> c = std::polar(std::tanh(rho / 2), beta);
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k) {
      const std::complex<double> z = std::polar(1.0, psi + (k - 1) * kPi / 2);
      out[k] = std::arg((z + c) / (1.0 + std::conj(c) * z));
    }
    return out;
  }

  double operator()(const Vec3& p) const {
    if (!(std::abs(p[0]) < 30.0)) return 0.0;
    const auto a = angles(p);
    std::array<double, 4> img{};
    for (int k = 0; k < 4; ++k) img[k] = phi.eval(a[k]);
    const double cr = cross_ratio_angles(img);
    if (!std::isfinite(cr) || cr == 0.0) return 0.0;
    return std::abs(std::log(std::abs(cr)));
  }
};

using Point = detail::NMPoint<3>;

bool better(const Point& a, const Point& b) {
  if (a.f != b.f) return a.f > b.f;
  return a.x < b.x;
}

}  // namespace

NormEstimate cross_ratio_norm(const CircleHomeo& phi, const SearchConfig& cfg) {
  if (cfg.grid < 2 || cfg.restarts < 1) throw Error(ErrorCode::ConfigInvalid, "norm search needs grid >= 2, restarts >= 1");
  Objective f{phi};
  const int g = cfg.grid;
  const Vec3 cell{cfg.rho_max / (g - 1), 2 * kPi / g, (kPi / 2) / g};

  std::vector<Point> grid;
  grid.reserve(static_cast<std::size_t>(g) * g * g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < g; ++k) {
        const Vec3 x{i * cell[0], j * cell[1], k * cell[2]};
        ++f.evals;
        grid.push_back({x, f(x)});
      }
  std::sort(grid.begin(), grid.end(), better);

  // Starts are the best grid cells, jittered inside their cell by the seeded stream.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  Point best = grid.front();
  const long per_run = std::max<long>(200, cfg.max_evals / (2 * cfg.restarts + 2));
  int restarts = 0;
  for (int r = 0; r < cfg.restarts && r < static_cast<int>(grid.size()); ++r) {
    if (f.evals >= cfg.max_evals) break;
    Vec3 x0 = grid[r].x;
    for (int k = 0; k < 3; ++k) x0[k] += jitter(rng) * cell[k];
    const Point p = detail::nelder_mead_max<3>(f, f.evals, x0, cell, per_run, 1e-15);
    ++restarts;
    if (better(p, best)) best = p;
  }
  // Restart from the incumbent with a fresh simplex until it stops moving.
  Vec3 step = cell;
  for (int polish = 0; polish < 40 && f.evals < cfg.max_evals; ++polish) {
    const Point p = detail::nelder_mead_max<3>(f, f.evals, best.x, step, per_run, 1e-16);
    const bool improved = p.f > best.f + 1e-15 * (1 + best.f);
    if (better(p, best)) best = p;
    if (!improved) {
      if (step[0] < 1e-6) break;
      for (auto& s : step) s *= 0.1;
    }
  }

  NormEstimate out;
  out.value = best.f;
  out.witness_angles = f.angles(best.x);
  for (int k = 0; k < 4; ++k) out.witness.z[k] = angle_to_real(out.witness_angles[k]);
  out.evaluations = f.evals;
  out.restarts = restarts;
  out.partial = f.evals >= cfg.max_evals;
  return out;
}

}  // namespace ads3
