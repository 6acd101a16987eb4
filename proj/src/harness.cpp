#include "ads3/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "ads3/errors.hpp"
#include "ads3/extension.hpp"

namespace ads3 {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Plane level_plane(double z) { return Plane::from_dual({0.0, 0.0, -std::sin(z), std::cos(z)}); }

// Linear PDE residuals against the level planes just above and just below the graph.
void linear_checks(const SurfaceMesh& m, ReportRow& row) {
  row.res_linear = row.res_hessian = 0;
  row.grad_bound_margin = -std::numeric_limits<double>::infinity();
  const auto [lo, hi] = std::minmax_element(m.f.begin(), m.f.end());
  int used = 0;
  for (double z : {*hi + 0.1, *lo - 0.1}) {
    if (std::abs(z) >= kPi / 2) continue;
    try {
      const Residuals r = check_linear_pde(m, level_plane(z));
      row.res_linear = std::max(row.res_linear, r.linear_pde);
      row.res_hessian = std::max(row.res_hessian, r.hessian_identity);
      row.grad_bound_margin = std::max(row.grad_bound_margin, r.grad_bound_margin);
      row.scheme_tolerance = r.scheme_tolerance;
      ++used;
    } catch (const Error&) {
    }
  }
  if (used == 0) row.res_linear = row.res_hessian = row.grad_bound_margin = kNaN;
}

}  // namespace

CircleHomeo family_member(const std::string& family, double p) {
  if (family == "mobius") return CircleHomeo::mobius(Mobius::rotation(p) * Mobius::dilation(p));
  if (family == "shear") return CircleHomeo::shear(p);
  if (family == "power") {
    if (!(p > 0)) throw Error(ErrorCode::ConfigInvalid, "power family needs p > 0");
    return CircleHomeo::power(p);
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown family '" + family + "'");
}

void ExperimentConfig::validate() const {
  if (params.empty()) throw Error(ErrorCode::ConfigInvalid, "parameter list is empty");
  for (double p : params) family_member(family, p);
  solver.validate();
  if (threads < 0) throw Error(ErrorCode::ConfigInvalid, "threads must be >= 0");
  if (!(slack_tolerance >= 0)) throw Error(ErrorCode::ConfigInvalid, "slack_tolerance must be >= 0");
  if (width.samples < 64) throw Error(ErrorCode::ConfigInvalid, "width.samples must be >= 64");
}

std::uint64_t row_seed(std::uint64_t master, std::size_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void verify_inequalities(ReportRow& row, double tol) {
  const double lambda = row.lambda_sup;
  const bool width_limit = row.width_lb >= kPi / 2 - 1e-9;
  const bool lambda_limit = lambda >= 1 - 1e-12;
  row.limit_regime = width_limit || lambda_limit;
  const double inf = std::numeric_limits<double>::infinity();
  const double tw = width_limit ? inf : std::tan(row.width_lb);
  const double propC_rhs = lambda_limit ? inf : 2 * lambda / (1 - lambda * lambda);

  // inf - inf is the limit regime of both sides; it counts as equality.
  auto slack = [](double big, double small) { return std::isinf(big) && std::isinf(small) ? 0.0 : big - small; };
  row.slack_propC = slack(propC_rhs, tw);
  row.flag_propC = row.slack_propC >= -tol;
  row.slack_propG = slack(tw, std::tanh(row.norm_lb / 4));
  row.flag_propG = row.slack_propG >= -tol;
  row.slack_propF = slack(std::sinh(row.norm_lb / 2), tw);
  row.flag_propF = row.slack_propF >= -tol;

  row.ratio_thmA = tw > 0 ? lambda / tw : kNaN;
  row.ratio_thmB = (tw > 1 && !std::isinf(tw) && !lambda_limit) ? -std::log1p(-lambda) / std::log(tw) : kNaN;
  row.log_K = std::log(row.K_formula_sup);
}

ReportRow run_row(const ExperimentConfig& cfg, std::size_t index) {
  ReportRow row;
  row.family = cfg.family;
  row.param = cfg.params.at(index);
  row.seed = row_seed(cfg.seed, index);
  try {
    const CircleHomeo phi = family_member(cfg.family, row.param);
    SearchConfig sc = cfg.norm;
    sc.seed = row.seed;
    const NormEstimate n = cross_ratio_norm(phi, sc);
    row.norm_lb = n.value;
    row.norm_partial = n.partial;
    const WidthEstimate w = width_estimate(phi, cfg.width);
    row.width_lb = w.value;
    row.width_flagged = w.flagged;

    const SurfaceMesh m = solve_maximal(phi, cfg.solver);
    row.converged = m.converged;
    row.lambda_sup = m.lambda_sup();
    linear_checks(m, row);
    try {
      row.res_quasilinear = check_quasilinear_pde(m).quasilinear_pde;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllUmbilical) throw;
      row.res_quasilinear = kNaN;  // nothing to test on a plane
    }
    row.lipschitz_v = lipschitz_v(m);

    const SampledMap s = ml_map(m);
    const DilatationField d = dilatation(m, s);
    row.K_formula_sup = d.K_sup;
    row.K_measured_sup = d.K_measured_sup;
    row.K_median_rel_error = d.median_rel_error;
    row.K_max_rel_error = d.max_rel_error;
    row.jacobian_error = d.max_jacobian_error;
    verify_inequalities(row, cfg.slack_tolerance);
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Report rep;
  rep.config = cfg;
  rep.rows.resize(cfg.params.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(cfg.threads > 0 ? cfg.threads : hw, cfg.params.size());
  // Rows are independent and each is computed on one thread, so the output does not
  // depend on the schedule.
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.params.size(); i = next++) rep.rows[i] = run_row(cfg, i);
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < workers; ++k) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  try {
    rep.constants = fit_constants(rep, cfg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
  }
  return rep;
}

namespace {

enum class Pick { Max, Min };

Fit fit_ratio(const std::vector<std::pair<double, double>>& samples, Pick pick) {
  Fit f;
  if (samples.empty()) return f;
  double v = samples.front().second;
  for (const auto& [p, r] : samples) v = pick == Pick::Max ? std::max(v, r) : std::min(v, r);
  f.value = v;
  for (const auto& [p, r] : samples) {
    f.params.push_back(p);
    f.residual = std::max(f.residual, std::abs(r - v));
  }
  return f;
}

}  // namespace

ConstantFit fit_constants(const Report& report, const ExperimentConfig& cfg) {
  std::set<double> distinct;
  for (const ReportRow& r : report.rows)
    if (r.ok()) distinct.insert(r.param);
  if (distinct.size() < 3) throw Error(ErrorCode::InsufficientData, "need >= 3 completed rows with distinct params");

  std::vector<std::pair<double, double>> a, b, lip, up, lo;
  for (const ReportRow& r : report.rows) {
    if (!r.ok() || r.limit_regime) continue;
    const double tw = std::tan(r.width_lb);
    if (r.width_lb <= cfg.small_width && tw > 1e-9 && r.lambda_sup > 1e-9) a.emplace_back(r.param, r.lambda_sup / tw);
    if (r.lambda_sup >= cfg.high_lambda && tw > 1) b.emplace_back(r.param, -std::log1p(-r.lambda_sup) / std::log(tw));
    if (r.lambda_sup > 1e-9) lip.emplace_back(r.param, r.lipschitz_v);
    if (r.norm_lb > 1e-9 && r.log_K > 1e-12) {
      up.emplace_back(r.param, r.log_K / r.norm_lb);
      if (r.norm_lb <= cfg.small_norm + 1e-9) lo.emplace_back(r.param, r.log_K / r.norm_lb);
    }
  }
  if (a.empty() && b.empty() && lip.empty() && up.empty())
    throw Error(ErrorCode::InsufficientData, "every ratio is degenerate (0/0)");
  ConstantFit c;
  c.C1_hat = fit_ratio(a, Pick::Max);
  c.M_hat_widthlaw = fit_ratio(b, Pick::Max);
  c.M_hat_lipschitz = fit_ratio(lip, Pick::Max);
  c.C_upper_hat = fit_ratio(up, Pick::Max);
  c.C0_lower_hat = fit_ratio(lo, Pick::Min);
  return c;
}

bool has_violation(const Report& report) {
  return std::any_of(report.rows.begin(), report.rows.end(),
                     [](const ReportRow& r) { return r.ok() && (!r.flag_propC || !r.flag_propG); });
}

}  // namespace ads3
