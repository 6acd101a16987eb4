#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "ads3/errors.hpp"
#include "ads3/harness.hpp"

namespace ads3 {

using nlohmann::json;

namespace {

// Shortest text that reads back to the same double.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// JSON has no NaN or infinity; they travel as strings.
json jnum(double x) { return std::isfinite(x) ? json(x) : json(num(x)); }

double from_jnum(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw Error(ErrorCode::IoError, "bad number '" + s + "'");
}

void require_rows(const Report& r) {
  if (r.rows.empty()) throw Error(ErrorCode::IoError, "report has no rows");
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json fit_json(const Fit& f) {
  return {{"value", f.value ? jnum(*f.value) : json(nullptr)}, {"params", f.params}, {"residual", jnum(f.residual)}};
}

Fit fit_from(const json& j) {
  Fit f;
  if (!j.at("value").is_null()) f.value = from_jnum(j.at("value"));
  f.params = j.at("params").get<std::vector<double>>();
  f.residual = from_jnum(j.at("residual"));
  return f;
}

json config_json(const ExperimentConfig& c) {
  return {
      {"family", c.family},
      {"params", c.params},
      {"seed", c.seed},
      {"out_dir", c.out_dir},
      {"threads", c.threads},
      {"slack_tolerance", c.slack_tolerance},
      {"small_width", c.small_width},
      {"small_norm", c.small_norm},
      {"high_lambda", c.high_lambda},
      {"norm",
       {{"grid", c.norm.grid}, {"restarts", c.norm.restarts}, {"max_evals", c.norm.max_evals}, {"rho_max", c.norm.rho_max}}},
      {"width",
       {{"samples", c.width.samples},
        {"tol", c.width.tol},
        {"max_iters", c.width.max_iters},
        {"starts", c.width.starts},
        {"scan_points", c.width.scan_points},
        {"alternations", c.width.alternations},
        {"max_evals", c.width.max_evals}}},
      {"solver",
       {{"r_max", c.solver.r_max},
        {"n_r", c.solver.n_r},
        {"n_theta", c.solver.n_theta},
        {"tol_H", c.solver.tol_H},
        {"max_iters", c.solver.max_iters},
        {"damping", c.solver.damping},
        {"core_radius", c.solver.core_radius}}},
  };
}

ExperimentConfig config_from(const json& j) {
  ExperimentConfig c;
  if (!j.is_object() || !j.contains("family") || !j.contains("params"))
    throw Error(ErrorCode::ConfigInvalid, "config needs \"family\" and \"params\"");
  c.family = j.at("family").get<std::string>();
  c.params = j.at("params").get<std::vector<double>>();
  read_opt(j, "seed", c.seed);
  read_opt(j, "out_dir", c.out_dir);
  read_opt(j, "threads", c.threads);
  read_opt(j, "slack_tolerance", c.slack_tolerance);
  read_opt(j, "small_width", c.small_width);
  read_opt(j, "small_norm", c.small_norm);
  read_opt(j, "high_lambda", c.high_lambda);
  if (j.contains("norm")) {
    const json& n = j.at("norm");
    read_opt(n, "grid", c.norm.grid);
    read_opt(n, "restarts", c.norm.restarts);
    read_opt(n, "max_evals", c.norm.max_evals);
    read_opt(n, "rho_max", c.norm.rho_max);
  }
  if (j.contains("width")) {
    const json& w = j.at("width");
    read_opt(w, "samples", c.width.samples);
    read_opt(w, "tol", c.width.tol);
    read_opt(w, "max_iters", c.width.max_iters);
    read_opt(w, "starts", c.width.starts);
    read_opt(w, "scan_points", c.width.scan_points);
    read_opt(w, "alternations", c.width.alternations);
    read_opt(w, "max_evals", c.width.max_evals);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    read_opt(s, "r_max", c.solver.r_max);
    read_opt(s, "n_r", c.solver.n_r);
    read_opt(s, "n_theta", c.solver.n_theta);
    read_opt(s, "tol_H", c.solver.tol_H);
    read_opt(s, "max_iters", c.solver.max_iters);
    read_opt(s, "damping", c.solver.damping);
    read_opt(s, "core_radius", c.solver.core_radius);
  }
  return c;
}

json row_json(const ReportRow& r) {
  return {
      {"family", r.family},
      {"param", jnum(r.param)},
      {"seed", r.seed},
      {"norm_lb", jnum(r.norm_lb)},
      {"width_lb", jnum(r.width_lb)},
      {"lambda_sup", jnum(r.lambda_sup)},
      {"K_formula_sup", jnum(r.K_formula_sup)},
      {"K_measured_sup", jnum(r.K_measured_sup)},
      {"K_median_rel_error", jnum(r.K_median_rel_error)},
      {"K_max_rel_error", jnum(r.K_max_rel_error)},
      {"jacobian_error", jnum(r.jacobian_error)},
      {"res_linear", jnum(r.res_linear)},
      {"res_quasilinear", jnum(r.res_quasilinear)},
      {"res_hessian", jnum(r.res_hessian)},
      {"scheme_tolerance", jnum(r.scheme_tolerance)},
      {"grad_bound_margin", jnum(r.grad_bound_margin)},
      {"lipschitz_v", jnum(r.lipschitz_v)},
      {"converged", r.converged},
      {"norm_partial", r.norm_partial},
      {"width_flagged", r.width_flagged},
      {"flag_propC", r.flag_propC},
      {"flag_propG", r.flag_propG},
      {"flag_propF_advisory", r.flag_propF},
      {"slack_propC", jnum(r.slack_propC)},
      {"slack_propG", jnum(r.slack_propG)},
      {"slack_propF", jnum(r.slack_propF)},
      {"limit_regime", r.limit_regime},
      {"ratio_thmA", jnum(r.ratio_thmA)},
      {"ratio_thmB", jnum(r.ratio_thmB)},
      {"log_K", jnum(r.log_K)},
      {"error", r.error},
  };
}

ReportRow row_from(const json& j) {
  ReportRow r;
  r.family = j.at("family").get<std::string>();
  r.param = from_jnum(j.at("param"));
  r.seed = j.at("seed").get<std::uint64_t>();
  auto d = [&](const char* k) { return from_jnum(j.at(k)); };
  r.norm_lb = d("norm_lb"), r.width_lb = d("width_lb"), r.lambda_sup = d("lambda_sup");
  r.K_formula_sup = d("K_formula_sup"), r.K_measured_sup = d("K_measured_sup");
  r.K_median_rel_error = d("K_median_rel_error"), r.K_max_rel_error = d("K_max_rel_error");
  r.jacobian_error = d("jacobian_error");
  r.res_linear = d("res_linear"), r.res_quasilinear = d("res_quasilinear"), r.res_hessian = d("res_hessian");
  r.scheme_tolerance = d("scheme_tolerance"), r.grad_bound_margin = d("grad_bound_margin");
  r.lipschitz_v = d("lipschitz_v");
  r.converged = j.at("converged").get<bool>();
  r.norm_partial = j.at("norm_partial").get<bool>();
  r.width_flagged = j.at("width_flagged").get<bool>();
  r.flag_propC = j.at("flag_propC").get<bool>();
  r.flag_propG = j.at("flag_propG").get<bool>();
  r.flag_propF = j.at("flag_propF_advisory").get<bool>();
  r.slack_propC = d("slack_propC"), r.slack_propG = d("slack_propG"), r.slack_propF = d("slack_propF");
  r.limit_regime = j.at("limit_regime").get<bool>();
  r.ratio_thmA = d("ratio_thmA"), r.ratio_thmB = d("ratio_thmB"), r.log_K = d("log_K");
  r.error = j.at("error").get<std::string>();
  return r;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  try {
    return config_from(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config: ") + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

std::string to_csv(const Report& report) {
  require_rows(report);
  std::ostringstream os;
  os << "family,param,norm_lb,width_lb,lambda_sup,K_formula_sup,K_measured_sup,res_linear,res_quasilinear,"
        "res_hessian,flag_propC,flag_propG,slack_propC,slack_propG\n";
  for (const ReportRow& r : report.rows) {
    if (!r.ok()) {
      // Failed rows keep their place; the measured columns are empty.
      os << r.family << ',' << num(r.param) << ",,,,,,,,,,,,\n";
      continue;
    }
    os << r.family << ',' << num(r.param) << ',' << num(r.norm_lb) << ',' << num(r.width_lb) << ','
       << num(r.lambda_sup) << ',' << num(r.K_formula_sup) << ',' << num(r.K_measured_sup) << ','
       << num(r.res_linear) << ',' << num(r.res_quasilinear) << ',' << num(r.res_hessian) << ','
       << (r.flag_propC ? "true" : "false") << ',' << (r.flag_propG ? "true" : "false") << ',' << num(r.slack_propC)
       << ',' << num(r.slack_propG) << '\n';
  }
  return os.str();
}

std::string to_json(const Report& report) {
  require_rows(report);
  json j;
  j["config"] = config_json(report.config);
  j["rows"] = json::array();
  for (const ReportRow& r : report.rows) j["rows"].push_back(row_json(r));
  if (report.constants) {
    const ConstantFit& c = *report.constants;
    j["constants"] = {{"C1_hat", fit_json(c.C1_hat)},
                      {"M_hat_widthlaw", fit_json(c.M_hat_widthlaw)},
                      {"M_hat_lipschitz", fit_json(c.M_hat_lipschitz)},
                      {"C_upper_hat", fit_json(c.C_upper_hat)},
                      {"C0_lower_hat", fit_json(c.C0_lower_hat)}};
  } else {
    j["constants"] = nullptr;
  }
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Report r;
    r.config = config_from(j.at("config"));
    for (const json& row : j.at("rows")) r.rows.push_back(row_from(row));
    if (!j.at("constants").is_null()) {
      const json& c = j.at("constants");
      r.constants = ConstantFit{fit_from(c.at("C1_hat")), fit_from(c.at("M_hat_widthlaw")),
                                fit_from(c.at("M_hat_lipschitz")), fit_from(c.at("C_upper_hat")),
                                fit_from(c.at("C0_lower_hat"))};
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("report: ") + e.what());
  }
}

std::string to_svg(const Report& report) {
  require_rows(report);
  // Axes: x = norm_lb on [0, xmax], y = tan(width_lb) on [0, ymax].
  double xmax = 0.5;
  for (const ReportRow& r : report.rows)
    if (r.ok() && std::isfinite(r.norm_lb)) xmax = std::max(xmax, 1.1 * r.norm_lb);
  double ymax = std::max(0.5, std::sinh(xmax / 2) * 1.05);
  const double W = 640, H = 480, L = 60, B = 50, R = 20, T = 20;
  auto px = [&](double x) { return L + (W - L - R) * x / xmax; };
  auto py = [&](double y) { return H - B - (H - B - T) * std::min(y, ymax) / ymax; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << L << "\" y2=\"" << T << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (W + L) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">norm_lb</text>\n";
  os << "<text x=\"16\" y=\"" << (H - B + T) / 2 << "\" transform=\"rotate(-90 16 " << (H - B + T) / 2
     << ")\" text-anchor=\"middle\">tan(width_lb)</text>\n";
  auto curve = [&](auto f, const char* color, const char* label) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (int k = 0; k <= 200; ++k) {
      const double x = xmax * k / 200;
      os << num(px(x)) << ',' << num(py(f(x))) << (k < 200 ? " " : "");
    }
    os << "\"/>\n<text x=\"" << W - R - 4 << "\" y=\"" << py(f(xmax)) - 6 << "\" text-anchor=\"end\" fill=\"" << color
       << "\">" << label << "</text>\n";
  };
  curve([](double x) { return std::sinh(x / 2); }, "steelblue", "sinh(norm/2)");
  curve([](double x) { return std::tanh(x / 4); }, "darkorange", "tanh(norm/4)");
  for (const ReportRow& r : report.rows) {
    if (!r.ok() || !std::isfinite(r.norm_lb)) continue;
    os << "<circle cx=\"" << num(px(r.norm_lb)) << "\" cy=\"" << num(py(std::tan(r.width_lb)))
       << "\" r=\"4\" fill=\"" << (r.flag_propG ? "black" : "red") << "\"><title>" << r.family << ' ' << num(r.param)
       << "</title></circle>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string emit(const Report& report, const std::string& format, const std::string& dir) {
  std::string body;
  if (format == "csv") {
    body = to_csv(report);
  } else if (format == "json") {
    body = to_json(report);
  } else if (format == "svg") {
    body = to_svg(report);
  } else {
    throw Error(ErrorCode::ConfigInvalid, "format must be csv, json or svg");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string path = (std::filesystem::path(dir) / ("report." + format)).string();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path);
  os << body;
  if (!os) throw Error(ErrorCode::IoError, "write failed for " + path);
  return path;
}

}  // namespace ads3
