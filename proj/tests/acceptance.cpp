// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <tuple>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ads3/errors.hpp"
#include "ads3/extension.hpp"
#include "ads3/harness.hpp"
#include "ads3/width.hpp"
#include "oracles.hpp"

using namespace ads3;

namespace {

// 1. Lorentz core
constexpr int kAlgebraChecks = 10000;
constexpr double kAlgebraTol = 1e-9;
// 2. Cross ratio and norm
constexpr double kStdCrossRatioTol = 1e-12;
constexpr double kCrossRatioInvTol = 1e-10;
constexpr double kMobiusNormTol = 1e-8;
constexpr double kShearNormSlack = 1e-6;
constexpr double kWitnessTol = 1e-6;
// 3. Width
constexpr double kIdentityWidthTol = 1e-9;
constexpr double kDualLinesTol = 1e-6;
constexpr double kWidthIsometryTol = 1e-6;
constexpr double kDoublingSlack = 1e-9;
// 4. Solver
constexpr double kPlaneLambdaTol = 1e-6;
constexpr double kTraceTol = 1e-6;
constexpr double kSolveSeconds = 120;
constexpr double kRefinementChange = 0.05;
// 5. PDE identities
constexpr double kSchemeFactor = 10;
constexpr double kMinOrder = 3.0;
const double kGradBound = 2 * (1 + std::sqrt(2.0));
// 6. Parallel surfaces
constexpr double kParallelFactor = 2;
constexpr double kPlaneParallelTol = 1e-6;
// 7. Extension
constexpr double kKMedian = 0.01, kKMax = 0.05, kMobiusK = 1e-4, kJacobian = 0.02;
// 8. Inequalities
constexpr double kSlack = 1e-3;
// 9. Constants
constexpr double kC1Stability = 0.10;
constexpr double kC0Lo = 0.4, kC0Hi = 0.6;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fails]");
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

SolverConfig solver(int n_r, int n_theta) {
  SolverConfig c;
  c.n_r = n_r;
  c.n_theta = n_theta;
  return c;
}

const CircleHomeo kMobius = CircleHomeo::mobius(Mobius::dilation(0.7) * Mobius::rotation(0.4));

// Meshes shared between criteria.
const SurfaceMesh& shear_mesh(double t, int n_r, int n_theta) {
  static std::map<std::tuple<double, int, int>, SurfaceMesh> cache;
  const auto key = std::make_tuple(t, n_r, n_theta);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, solve_maximal(CircleHomeo::shear(t), solver(n_r, n_theta))).first;
  return it->second;
}

Plane level_plane(double z) { return Plane::from_dual({0.0, 0.0, -std::sin(z), std::cos(z)}); }

double op_norm(const Eigen::Matrix2d& I, const Eigen::Matrix2d& S) {
  // Largest |generalized eigenvalue| of the symmetric S against I.
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(S, I, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Outcome lorentz_core() {
  Outcome o;
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> ut(-3, 3);
  double geo = 0, sep = 0, dual = 0, law = 0;
  int law_n = 0;
  for (int k = 0; k < kAlgebraChecks; ++k) {
    const AdSPoint p = random_point(rng, 1.5), q = random_point(rng, 1.5);
    const CausalType type = k % 2 ? CausalType::Spacelike : CausalType::Timelike;
    const AdSPoint x = geodesic_eval(Geodesic::make(p, random_unit_tangent(rng, p, type).dir), ut(rng));
    geo = std::max(geo, std::abs(inner(x.rep(), x.rep()) + 1));

    const Isometry T = Isometry::random(rng, 0.5);
    const Separation a = separation(p, q), b = separation(T.apply(p), T.apply(q));
    if (a.type != CausalType::Lightlike) sep = std::max(sep, a.type == b.type ? std::abs(a.value - b.value) : 1.0);

    const AdSPoint back = dual_point(dual_plane(p));
    const LorentzVec d1 = back.rep() - p.rep(), d2 = back.rep() + p.rep();
    dual = std::max(dual, std::min(d1.eigen().cwiseAbs().maxCoeff(), d2.eigen().cwiseAbs().maxCoeff()));

    if (a.type == CausalType::Timelike) {
      ++law_n;
      law = std::max(law, std::abs(std::abs(point_plane_distance(p, dual_plane(q))) - (kPi / 2 - a.value)));
    }
  }
  const double worst = std::max({geo, sep, dual, law});
  o.check(worst < kAlgebraTol, fmt("max error %.2e", worst) + " over " + std::to_string(kAlgebraChecks) +
                                   " draws (geodesic " + fmt("%.1e", geo) + ", separation " + fmt("%.1e", sep) +
                                   ", duality " + fmt("%.1e", dual) + ", dual distance " + fmt("%.1e", law) + " on " +
                                   std::to_string(law_n) + " timelike pairs)");
  return o;
}

Outcome cross_ratios() {
  Outcome o;
  const double std_cr = cross_ratio({{-1, 0, 1, oracle::kInf}});
  o.check(std::abs(std_cr + 1) < kStdCrossRatioTol, fmt("cr(-1,0,1,inf) + 1 = %.1e", std_cr + 1));

  std::mt19937_64 rng(1002);
  std::normal_distribution<double> nd(0, 2);
  double inv = 0;
  for (int k = 0; k < 1000; ++k) {
    Quadruple q{{nd(rng), nd(rng), nd(rng), k % 3 == 0 ? oracle::kInf : nd(rng)}};
    const Mobius A = Mobius::random(rng, 0.8);
    Quadruple img;
    for (int i = 0; i < 4; ++i) img.z[i] = oracle::mobius_real(A.a, A.b, A.c, A.d, q.z[i]);
    const double c0 = oracle::cross_ratio_real(q.z);
    inv = std::max(inv, std::abs(cross_ratio(img) - c0) / (1 + std::abs(c0)));
  }
  o.check(inv < kCrossRatioInvTol, fmt("Mobius invariance %.1e", inv));

  SearchConfig sc;
  double mob = 0;
  for (int k = 0; k < 5; ++k) mob = std::max(mob, cross_ratio_norm(CircleHomeo::mobius(Mobius::random(rng, 1.0)), sc).value);
  o.check(mob < kMobiusNormTol, fmt("norm(Mobius) %.1e", mob));

  double short_by = -1e300, witness = 0;
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    const CircleHomeo phi = CircleHomeo::shear(t);
    const NormEstimate e = cross_ratio_norm(phi, sc);
    short_by = std::max(short_by, t - e.value);
    Quadruple img;
    for (int i = 0; i < 4; ++i) img.z[i] = phi.eval_real(e.witness.z[i]);
    witness = std::max({witness, std::abs(std::abs(std::log(std::abs(cross_ratio(img)))) - e.value),
                        std::abs(cross_ratio(e.witness) + 1)});
  }
  o.check(short_by <= kShearNormSlack, fmt("max t - norm(Shear(t)) %.1e", short_by));
  o.check(witness < kWitnessTol, fmt("witness re-evaluation %.1e", witness));
  return o;
}

BoundaryCurve dual_lines_curve() {
  const double s = std::sqrt(0.5);
  return BoundaryCurve::from_points({BoundaryPoint::from_null({1, 0, s, s}), BoundaryPoint::from_null({0, 1, -s, s}),
                                     BoundaryPoint::from_null({-1, 0, s, s}), BoundaryPoint::from_null({0, -1, -s, s})});
}

Outcome widths() {
  Outcome o;
  const WidthConfig wc;
  const double id = width_estimate(graph_samples(CircleHomeo::mobius(Mobius::identity()), 512), wc).value;
  o.check(std::abs(id) < kIdentityWidthTol, fmt("identity %.1e", id));
  // <p, q> = 0 between the two lines, so the width is pi/2.
  const double dl = width_estimate(dual_lines_curve(), wc).value;
  o.check(std::abs(dl - kPi / 2) < kDualLinesTol, fmt("dual lines - pi/2 = %.1e", dl - kPi / 2));

  std::mt19937_64 rng(1003);
  const BoundaryCurve c = graph_samples(CircleHomeo::shear(1.0), 256);
  const double base = width_estimate(c, wc).value;
  double iso = 0;
  int moved_n = 0;
  for (int k = 0; k < 12 && moved_n < 4; ++k) {
    BoundaryCurve moved;
    try {
      moved = c.transformed(Isometry::random(rng, 0.3));
    } catch (const Error&) {
      continue;  // crossed the chart's plane at infinity
    }
    ++moved_n;
    iso = std::max(iso, std::abs(width_estimate(moved, wc).value - base));
  }
  o.check(moved_n >= 3 && iso < kWidthIsometryTol, fmt("isometry invariance %.1e", iso) + " over " +
                                                       std::to_string(moved_n) + " isometries");

  bool mono = true;
  for (double t : {0.5, 2.0}) {
    double prev = 0;
    for (int n : {64, 128, 256, 512}) {
      const double v = width_estimate(graph_samples(CircleHomeo::shear(t), n), wc).value;
      mono = mono && v >= prev - kDoublingSlack;
      prev = v;
    }
  }
  o.check(mono, "monotone under sample doubling");
  return o;
}

Outcome maximal_solver() {
  Outcome o;
  const SurfaceMesh plane = solve_maximal(kMobius, solver(64, 128));
  o.check(plane.lambda_sup() < kPlaneLambdaTol && plane.mean_curvature_sup() <= kTraceTol,
          fmt("Mobius: lambda %.1e", plane.lambda_sup()) + fmt(", |tr B| %.1e", plane.mean_curvature_sup()));
  // Independent plane through three outer points.
  const PolarGrid& g = plane.grid;
  const LorentzVec a = plane.X[g.index(g.n_r, 0)], b = plane.X[g.index(g.n_r, g.n_theta / 3)],
                   c = plane.X[g.index(g.n_r, 2 * g.n_theta / 3)];
  const LorentzVec p = oracle::plane_through(a, b, c);
  double off = 0;
  for (const LorentzVec& x : plane.X) off = std::max(off, std::abs(inner(x, p)));
  o.check(off < 1e-8, fmt("Mobius mesh off its plane by %.1e", off));

  const auto t0 = std::chrono::steady_clock::now();
  const SurfaceMesh& m = shear_mesh(1.0, 64, 128);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(m.converged && m.mean_curvature_sup() <= kTraceTol && secs < kSolveSeconds,
          fmt("Shear(1) 64x128: |tr B| %.1e", m.mean_curvature_sup()) + fmt(" in %.1f s", secs));
  const SurfaceMesh& f = shear_mesh(1.0, 128, 256);
  const double change = std::abs(f.lambda_sup() - m.lambda_sup()) / m.lambda_sup();
  o.check(f.converged && change < kRefinementChange,
          fmt("lambda %.6f", m.lambda_sup()) + fmt(" -> %.6f", f.lambda_sup()) + fmt(" (%.2f%%)", 100 * change));
  return o;
}

Outcome pde_identities() {
  Outcome o;
  double worst_ratio = 0, grad = -1e300;
  int planes_n = 0;
  for (double t : {0.5, 1.0, 2.0}) {
    const SurfaceMesh& m = shear_mesh(t, 64, 128);
    const auto [lo, hi] = std::minmax_element(m.f.begin(), m.f.end());
    std::vector<Plane> planes;
    for (double c : {0.05, 0.3, 0.8}) {
      if (*hi + c < kPi / 2) planes.push_back(level_plane(*hi + c));
      if (*lo - c > -kPi / 2) planes.push_back(level_plane(*lo - c));
    }
    for (double s : {0.2, -0.3}) {
      LorentzVec p{s, 0.5 * s, -std::sin(*hi + 1.2), std::cos(*hi + 1.2)};
      planes.push_back(Plane::from_dual(p / std::sqrt(-inner(p, p))));
    }
    for (const Plane& P : planes) {
      const Residuals r = check_linear_pde(m, P);
      ++planes_n;
      worst_ratio = std::max({worst_ratio, r.linear_pde / r.scheme_tolerance, r.hessian_identity / r.scheme_tolerance});
      grad = std::max(grad, r.grad_bound_margin + kGradBound);
    }
  }
  o.check(worst_ratio < kSchemeFactor, fmt("linear and Hessian residuals <= %.2f x scheme tolerance", worst_ratio) +
                                           " over " + std::to_string(planes_n) + " planes");
  const Residuals coarse = check_quasilinear_pde(shear_mesh(1.0, 64, 128));
  const Residuals fine = check_quasilinear_pde(shear_mesh(1.0, 128, 256));
  const double order = std::log2(coarse.quasilinear_pde / fine.quasilinear_pde);
  o.check(order > kMinOrder, fmt("quasilinear residual %.3f", coarse.quasilinear_pde) +
                                 fmt(" -> %.4f", fine.quasilinear_pde) + fmt(", order %.2f", order));
  o.check(grad < kGradBound, fmt("max |grad u|^2 = %.4f", grad) + fmt(" < %.4f", kGradBound));
  return o;
}

Outcome parallel_surfaces() {
  Outcome o;
  const SurfaceMesh& m = shear_mesh(1.0, 64, 128);
  double ratio = 0;
  for (double rho : {0.1, std::atan(m.lambda_sup()), -0.2}) {
    const SurfaceMesh p = parallel_surface(m, rho);
    const double tol = std::max(scheme_tolerance(m), scheme_tolerance(p));
    for (std::size_t v : m.core_vertices()) {
      const Eigen::Matrix2d I = parallel_metric(m.geom[v].I, m.geom[v].B, rho);
      const Eigen::Matrix2d dB = I * (p.geom[v].B - parallel_shape(m.geom[v].B, rho));
      ratio = std::max(ratio, op_norm(I, 0.5 * (dB + dB.transpose())) / tol);
    }
  }
  o.check(ratio < kParallelFactor, fmt("Shear(1): B_rho error <= %.2f x discretization tolerance", ratio));

  const PolarGrid g = PolarGrid::make(3.0, 64, 128);
  SurfaceMesh flat = mesh_from_heights(g, std::vector<double>(g.size(), 0.0), 2.0);
  fundamental_forms(flat);
  double closed = 0, measured = 0;
  for (double rho : {0.2, -0.5}) {
    closed = std::max(closed, (parallel_shape(Eigen::Matrix2d::Zero(), rho) + std::tan(rho) * Eigen::Matrix2d::Identity())
                                  .cwiseAbs()
                                  .maxCoeff());
    const SurfaceMesh p = parallel_surface(flat, rho);
    for (std::size_t v : p.core_vertices())
      measured = std::max(measured, (p.geom[v].B + std::tan(rho) * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
  }
  o.check(closed < kPlaneParallelTol && measured < kPlaneParallelTol,
          fmt("plane: B_rho + tan(rho) E closed form %.1e", closed) + fmt(", measured %.1e", measured));
  return o;
}

Outcome extension() {
  Outcome o;
  for (double t : {1.0, 2.0}) {
    const SurfaceMesh& m = shear_mesh(t, 64, 128);
    const DilatationField d = dilatation(m, ml_map(m));
    o.check(d.median_rel_error < kKMedian && d.max_rel_error < kKMax && d.max_jacobian_error < kJacobian,
            fmt("Shear(%g): K rel. error", t) + fmt(" median %.1e", d.median_rel_error) +
                fmt(" max %.1e", d.max_rel_error) + fmt(", |J - 1| %.1e", d.max_jacobian_error));
  }
  const SurfaceMesh plane = solve_maximal(kMobius, solver(64, 128));
  const DilatationField d = dilatation(plane, ml_map(plane));
  o.check(std::abs(d.K_measured_sup - 1) < kMobiusK && d.max_jacobian_error < kJacobian,
          fmt("Mobius: K - 1 = %.1e", d.K_measured_sup - 1) + fmt(", |J - 1| %.1e", d.max_jacobian_error));
  return o;
}

ExperimentConfig sweep(int n_r, int n_theta) {
  ExperimentConfig c;
  c.family = "shear";
  c.params = {0.25, 0.5, 1.0, 2.0};
  c.seed = 1;
  c.solver = solver(n_r, n_theta);
  c.slack_tolerance = kSlack;
  return c;
}

const Report& sweep_report() {
  static const Report r = run_experiment(sweep(64, 128));
  return r;
}

Outcome inequalities() {
  Outcome o;
  for (const ReportRow& r : sweep_report().rows) {
    if (!r.ok()) {
      o.check(false, fmt("Shear(%g) ", r.param) + r.error);
      continue;
    }
    o.check(r.flag_propC && r.flag_propG, fmt("Shear(%g):", r.param) + fmt(" C slack %.2e", r.slack_propC) +
                                              fmt(", G slack %.2e", r.slack_propG) +
                                              fmt(", F (advisory) slack %.2e", r.slack_propF));
  }
  return o;
}

Outcome constants() {
  Outcome o;
  const Report& coarse = sweep_report();
  const Report fine = run_experiment(sweep(128, 256));
  if (!coarse.constants || !fine.constants || !coarse.constants->C1_hat.value || !fine.constants->C1_hat.value) {
    o.check(false, "C1_hat unavailable");
    return o;
  }
  const double c1 = *coarse.constants->C1_hat.value, c1f = *fine.constants->C1_hat.value;
  const double drift = std::abs(c1f - c1) / c1;
  o.check(std::isfinite(c1) && drift <= kC1Stability,
          fmt("C1_hat %.4f", c1) + fmt(" -> %.4f", c1f) + fmt(" under refinement (%.1f%%)", 100 * drift));
  const Fit& c0 = coarse.constants->C0_lower_hat;
  if (!c0.value) {
    o.check(false, "C0_lower_hat has no small-norm rows");
    return o;
  }
  const Fit& c0f = fine.constants->C0_lower_hat;
  o.check(*c0.value >= kC0Lo && *c0.value <= kC0Hi,
          fmt("C0_lower_hat %.4f", *c0.value) + fmt(" (%.4f refined)", c0f.value.value_or(NAN)) +
              fmt(" vs window [%.1f,", kC0Lo) + fmt(" %.1f]", kC0Hi));
  return o;
}

Outcome determinism() {
  Outcome o;
  ExperimentConfig c = sweep(32, 64);
  c.params = {0.5, 1.0, 1.5};
  const std::string dir = (std::filesystem::temp_directory_path() / "ads3_acceptance").string();
  auto run = [&](const std::string& sub) {
    const Report r = run_experiment(c);
    std::string out;
    for (const char* f : {"csv", "json"}) {
      std::ifstream is(emit(r, f, dir + "/" + sub), std::ios::binary);
      std::stringstream ss;
      ss << is.rdbuf();
      out += ss.str();
    }
    return out;
  };
  const std::string a = run("a"), b = run("b");
  o.check(!a.empty() && a == b, "two verify runs: CSV and JSON " + std::string(a == b ? "byte-identical" : "differ") +
                                    " (" + std::to_string(a.size()) + " bytes)");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Lorentz core algebra", lorentz_core},
      {"cross ratio and norm", cross_ratios},
      {"width", widths},
      {"maximal solver", maximal_solver},
      {"PDE identities", pde_identities},
      {"parallel surfaces", parallel_surfaces},
      {"minimal Lagrangian extension", extension},
      {"inequality suite", inequalities},
      {"empirical constants", constants},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %-30s %s  (%.0f s) %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
