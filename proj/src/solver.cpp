#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ads3/errors.hpp"
#include "surface_internal.hpp"

namespace ads3 {

std::vector<double> dirichlet_data(const CircleHomeo& phi, const PolarGrid& g) {
  std::vector<double> out(g.n_theta);
  for (int j = 0; j < g.n_theta; ++j) out[j] = boundary_height(phi, g.theta(j));
  return out;
}

namespace {

struct Problem {
  PolarGrid g;
  Stencils s;
  std::vector<detail::Block> blocks;  // by ring
  std::vector<double> sh, ch, ct, st;  // per vertex: sinh r, cosh r, cos theta, sin theta
  std::size_t unknowns;

  explicit Problem(const PolarGrid& grid) : g(grid), s(grid), unknowns(static_cast<std::size_t>(grid.n_r) * grid.n_theta) {
    for (int i = 0; i < g.rings(); ++i) blocks.push_back(detail::block_weights(s, i));
    const std::size_t n = g.size();
    sh.resize(n), ch.resize(n), ct.resize(n), st.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      const double r = g.r(g.ring_of(v)), th = g.theta(g.sector_of(v));
      sh[v] = std::sinh(r), ch[v] = std::cosh(r), ct[v] = std::cos(th), st[v] = std::sin(th);
    }
  }

  LorentzVec embed(std::size_t v, double f) const {
    return {ct[v] * sh[v], st[v] * sh[v], std::cos(f) * ch[v], std::sin(f) * ch[v]};
  }

  EmbeddingJet jet(const std::vector<LorentzVec>& X, std::size_t v) const {
    const int i = g.ring_of(v), j = g.sector_of(v);
    const detail::Block& b = blocks[i];
    EmbeddingJet J;
    for (int a = 0; a < 5; ++a)
      for (int c = 0; c < 5; ++c) detail::add_node(J, b.w[a][c], X[detail::node_vertex(g, b, j, a, c)]);
    return J;
  }

  std::vector<LorentzVec> embed_all(const std::vector<double>& f) const {
    std::vector<LorentzVec> X(f.size());
    for (std::size_t v = 0; v < f.size(); ++v) X[v] = embed(v, f[v]);
    return X;
  }

  // tr B at every unknown; false if some tangent plane is not spacelike.
  bool residual(const std::vector<double>& f, Eigen::VectorXd& H) const {
    const std::vector<LorentzVec> X = embed_all(f);
    H.resize(static_cast<Eigen::Index>(unknowns));
    for (std::size_t v = 0; v < unknowns; ++v) {
      H[v] = detail::mean_curvature(jet(X, v), g.r(g.ring_of(v)));
      if (!std::isfinite(H[v])) return false;
    }
    return true;
  }

  // dH_v / df_k. Moving f_k only moves node k's share of the jet, along d/dzeta X_k.
  void jacobian(const std::vector<double>& f, std::vector<Eigen::Triplet<double>>& trip) const {
    const std::vector<LorentzVec> X = embed_all(f);
    trip.clear();
    trip.reserve(unknowns * 25);
    for (std::size_t v = 0; v < unknowns; ++v) {
      const int i = g.ring_of(v), j = g.sector_of(v);
      const double r = g.r(i);
      const detail::Block& b = blocks[i];
      const EmbeddingJet J0 = jet(X, v);
      for (int a = 0; a < 5; ++a)
        for (int c = 0; c < 5; ++c) {
          const std::size_t k = detail::node_vertex(g, b, j, a, c);
          if (k >= unknowns) continue;
          const LorentzVec dX{0.0, 0.0, -std::sin(f[k]) * ch[k], std::cos(f[k]) * ch[k]};
          EmbeddingJet dJ;
          detail::add_node(dJ, b.w[a][c], dX);
          double d = 0;
          detail::mean_curvature(J0, dJ, r, d);
          trip.emplace_back(static_cast<int>(v), static_cast<int>(k), std::isfinite(d) ? d : 0.0);
        }
    }
  }
};

enum class StageResult { Converged, MaxIters, NotSpacelike };

// Pseudo-transient continuation on the unknown heights; the outer ring of f is fixed.
StageResult run_stage(const Problem& P, std::vector<double>& f, double target, double accept, double newton_below,
                      double damping, int& budget, int& iterations) {
  using SpMat = Eigen::SparseMatrix<double>;
  Eigen::VectorXd H;
  if (!P.residual(f, H)) return StageResult::NotSpacelike;
  const int n = static_cast<int>(P.unknowns);
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  std::vector<Eigen::Triplet<double>> trip;
  double dtau = damping;
  double prev = std::numeric_limits<double>::infinity();
  bool was_newton = false;
  for (;;) {
    const double hn = H.lpNorm<Eigen::Infinity>();
    if (hn <= target) return StageResult::Converged;
    if (was_newton && hn <= accept && hn > 0.5 * prev) return StageResult::Converged;  // roundoff floor
    if (budget <= 0) return StageResult::MaxIters;
    --budget;
    ++iterations;

    const bool newton = hn < newton_below;
    P.jacobian(f, trip);
    SpMat J(n, n);
    J.setFromTriplets(trip.begin(), trip.end());
    double diag_sum = 0;
    for (int k = 0; k < n; ++k) diag_sum += J.coeff(k, k);
    const double sigma = diag_sum >= 0 ? 1.0 : -1.0;
    SpMat A = sigma * J;
    if (!newton)
      for (int k = 0; k < n; ++k) A.coeffRef(k, k) += 1.0 / dtau;
    A.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(A);
      analyzed = true;
    }
    lu.factorize(A);
    if (lu.info() != Eigen::Success) return StageResult::NotSpacelike;
    const Eigen::VectorXd delta = lu.solve(-sigma * H);
    if (lu.info() != Eigen::Success || !delta.allFinite()) return StageResult::NotSpacelike;

    // Cut back steps that lose spacelikeness or blow up the residual.
    double t = 1.0;
    bool accepted = false;
    std::vector<double> trial = f;
    Eigen::VectorXd Ht;
    for (int cut = 0; cut <= 30; ++cut, t *= 0.5) {
      for (int k = 0; k < n; ++k) trial[k] = f[k] + t * delta[k];
      if (P.residual(trial, Ht) && Ht.lpNorm<Eigen::Infinity>() < 10 * hn) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return StageResult::NotSpacelike;
    f.swap(trial);
    H.swap(Ht);
    const double hnew = H.lpNorm<Eigen::Infinity>();
    dtau *= std::clamp(hn / hnew, 0.2, 10.0);
    if (t < 1) dtau *= 0.5;
    prev = hn;
    was_newton = newton;
  }
}

// Harmonic extension of the outer ring in the Poincare disk (rho = tanh(r/2)).
std::vector<double> harmonic_extension(const PolarGrid& g, const std::vector<double>& outer) {
  const int n = g.n_theta, half = n / 2;
  std::vector<double> a(half + 1, 0.0), b(half + 1, 0.0);
  for (int k = 0; k <= half; ++k) {
    for (int j = 0; j < n; ++j) {
      a[k] += outer[j] * std::cos(k * g.theta(j));
      b[k] += outer[j] * std::sin(k * g.theta(j));
    }
    const double scale = (k == 0 || k == half) ? 1.0 / n : 2.0 / n;
    a[k] *= scale;
    b[k] *= scale;
  }
  const double rho_max = std::tanh(0.5 * g.r_max);
  std::vector<double> f(g.size());
  for (int i = 0; i < g.rings(); ++i) {
    const double q = std::tanh(0.5 * g.r(i)) / rho_max;
    for (int j = 0; j < n; ++j) {
      double s = 0, qk = 1;
      for (int k = 0; k <= half; ++k, qk *= q) s += qk * (a[k] * std::cos(k * g.theta(j)) + b[k] * std::sin(k * g.theta(j)));
      f[g.index(i, j)] = s;
    }
  }
  for (int j = 0; j < n; ++j) f[g.index(g.n_r, j)] = outer[j];
  return f;
}

}  // namespace

SurfaceMesh solve_maximal(const std::vector<double>& outer, const SolverConfig& cfg) {
  cfg.validate();
  const PolarGrid g = PolarGrid::make(cfg.r_max, cfg.n_r, cfg.n_theta);
  if (static_cast<int>(outer.size()) != g.n_theta)
    throw Error(ErrorCode::ConfigInvalid, "outer ring needs one height per sector");
  const Problem P(g);
  const std::vector<double> f0 = harmonic_extension(g, outer);

  // Amplitude continuation from the flat slice f = 0 (exactly maximal); the step is
  // halved whenever a stage cannot keep the surface spacelike.
  std::vector<double> f_done(g.size(), 0.0);
  double done = 0, step = 1;
  int budget = cfg.max_iters, iterations = 0;
  std::vector<double> f;
  bool converged = false;
  for (;;) {
    const double a = std::min(1.0, done + step);
    const bool last = a == 1.0;
    f = f_done;
    for (std::size_t v = 0; v < f.size(); ++v) f[v] += (a - done) * f0[v];
    const double target = last ? 0.01 * cfg.tol_H : std::max(cfg.tol_H, 1e-4);
    const double accept = last ? cfg.tol_H : target;
    const StageResult r = run_stage(P, f, target, accept, 10 * cfg.tol_H, cfg.damping, budget, iterations);
    if (r == StageResult::Converged) {
      if (last) {
        converged = true;
        break;
      }
      f_done = f;
      done = a;
      step = std::min(1.0 - done, 2 * step);
      continue;
    }
    if (r == StageResult::MaxIters) break;
    if (step < 1.0 / 256)
      throw Error(ErrorCode::NotSpacelike, "no spacelike step at amplitude " + std::to_string(a));
    step *= 0.5;
  }

  SurfaceMesh m = mesh_from_heights(g, std::move(f), cfg.core());
  fundamental_forms(m);
  m.converged = converged;
  m.iterations = iterations;
  m.residual = m.mean_curvature_sup();
  return m;
}

SurfaceMesh solve_maximal(const CircleHomeo& phi, const SolverConfig& cfg) {
  cfg.validate();
  const PolarGrid g = PolarGrid::make(cfg.r_max, cfg.n_r, cfg.n_theta);
  return solve_maximal(dirichlet_data(phi, g), cfg);
}

}  // namespace ads3
