#pragma once

// Experiment harness: runs a family of boundary maps through the norm search, the
// width estimate, the maximal solver and the extension, checks the inequalities
// between the measured quantities and fits the constants they leave open.
//
// Estimator directions. norm_lb and width_lb are lower bounds (a sup over finitely
// many quadruples, the width of a sampled hull) and lambda_sup is a max over core
// vertices. A check is a pass/fail flag only when those directions can not turn an
// estimator artifact into a violation:
//   propC  2 lambda / (1 - lambda^2) >= tan(width_lb) - tol
//   propG  tanh(norm_lb / 4) <= tan(width_lb) + tol
// propF (tan w <= sinh(norm / 2)) has lower bounds on both sides and is advisory.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ads3/boundary.hpp"
#include "ads3/surface.hpp"
#include "ads3/width.hpp"

namespace ads3 {

// Family templates, one boundary map per parameter p:
//   "mobius"  x -> e^p x followed by rotation by p (a Mobius map; the plane baseline)
//   "shear"   CircleHomeo::shear(p)
//   "power"   CircleHomeo::power(p), p > 0
CircleHomeo family_member(const std::string& family, double p);

struct ExperimentConfig {
  std::string family = "shear";
  std::vector<double> params;
  SearchConfig norm;
  WidthConfig width;
  SolverConfig solver;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 0;              // 0: hardware concurrency
  double slack_tolerance = 1e-3;
  // Row selection for the constant fits.
  double small_width = 0.5;     // C1_hat uses rows with width_lb <= small_width
  double small_norm = 0.5;      // C0_lower_hat uses rows with norm_lb <= small_norm
  double high_lambda = 0.5;     // M_hat_widthlaw uses rows with lambda_sup >= high_lambda and tan w > 1

  // Throws ConfigInvalid.
  void validate() const;
};

// JSON document; every key is optional except "family" and "params". Throws ConfigInvalid.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

// Per-row seed: splitmix64 of the master seed and the row index.
std::uint64_t row_seed(std::uint64_t master, std::size_t index);

struct ReportRow {
  std::string family;
  double param = 0;
  std::uint64_t seed = 0;

  double norm_lb = 0, width_lb = 0, lambda_sup = 0;
  double K_formula_sup = 1, K_measured_sup = 1;
  double K_median_rel_error = 0, K_max_rel_error = 0, jacobian_error = 0;
  double res_linear = 0, res_quasilinear = 0, res_hessian = 0, scheme_tolerance = 0;
  double grad_bound_margin = 0;
  double lipschitz_v = 0;
  bool converged = false;
  bool norm_partial = false, width_flagged = false;

  bool flag_propC = false, flag_propG = false, flag_propF = false;
  double slack_propC = 0, slack_propG = 0, slack_propF = 0;
  bool limit_regime = false;    // width at pi/2 or lambda at 1: tan w and K diverge
  double ratio_thmA = 0;        // lambda_sup / tan(width_lb)
  double ratio_thmB = 0;        // -ln(1 - lambda_sup) / ln(tan width_lb)
  double log_K = 0;             // ln K_formula_sup

  std::string error;            // empty when the row completed
  bool ok() const { return error.empty(); }
};

// One measured fit: value over the listed rows and the spread of the ratios about it.
struct Fit {
  std::optional<double> value;
  std::vector<double> params;   // params of the rows used
  double residual = 0;          // max |ratio - value| over the rows used
};

struct ConstantFit {
  Fit C1_hat, M_hat_widthlaw, M_hat_lipschitz, C_upper_hat, C0_lower_hat;
};

struct Report {
  ExperimentConfig config;
  std::vector<ReportRow> rows;  // ordered by parameter index
  std::optional<ConstantFit> constants;
};

// Fills flags, slacks and ratios of a row whose measured fields are set.
void verify_inequalities(ReportRow& row, double tolerance);

// Norm, width, surface, extension and checks for params[index].
ReportRow run_row(const ExperimentConfig& cfg, std::size_t index);

// All rows on a worker pool; a failing row records its error and the run continues.
// constants is filled when fit_constants succeeds. Throws ConfigInvalid.
Report run_experiment(const ExperimentConfig& cfg);

// Throws InsufficientData with fewer than 3 completed rows of distinct params, or
// when no fit has a usable row (all ratios 0/0).
ConstantFit fit_constants(const Report& report, const ExperimentConfig& cfg);

// true when some pass/fail flag of a completed row is false.
bool has_violation(const Report& report);

// Output. Each throws IoError on an empty report or a failed write.
std::string to_csv(const Report& report);
std::string to_json(const Report& report);
std::string to_svg(const Report& report);
Report report_from_json(const std::string& text);
// Writes report.<format> into dir and returns the path. format in {csv, json, svg}.
std::string emit(const Report& report, const std::string& format, const std::string& dir);

}  // namespace ads3
