// Command-line front end for the experiment harness.
//
//   ads3 <norm|width|surface|extend|verify|report> --config cfg.json [--out dir]
//        [--seed n] [--format csv|json|svg]
//
// Exit status: 0 on success, 2 when verify/report finds a pass/fail inequality
// violated beyond the slack tolerance, 1 on any error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ads3/errors.hpp"
#include "ads3/extension.hpp"
#include "ads3/harness.hpp"

namespace fs = std::filesystem;
using namespace ads3;

namespace {

struct Options {
  std::string config, out, format = "csv";
  std::optional<std::uint64_t> seed;
};

ExperimentConfig load(const Options& o) {
  std::ifstream is(o.config);
  if (!is) throw Error(ErrorCode::IoError, "cannot read config " + o.config);
  std::stringstream ss;
  ss << is.rdbuf();
  ExperimentConfig cfg = config_from_json(ss.str());
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  return cfg;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream os(p, std::ios::binary);
  if (!os || !(os << body)) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  std::cout << p.string() << '\n';
}

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_norm(const ExperimentConfig& cfg) {
  std::string out = "family,param,norm_lb,evaluations,partial,w1,w2,w3,w4\n";
  for (std::size_t i = 0; i < cfg.params.size(); ++i) {
    SearchConfig sc = cfg.norm;
    sc.seed = row_seed(cfg.seed, i);
    const NormEstimate n = cross_ratio_norm(family_member(cfg.family, cfg.params[i]), sc);
    out += cfg.family + ',' + g(cfg.params[i]) + ',' + g(n.value) + ',' + std::to_string(n.evaluations) + ',' +
           (n.partial ? "true" : "false");
    for (double a : n.witness_angles) out += ',' + g(a);
    out += '\n';
  }
  write_file(fs::path(cfg.out_dir) / "norm.csv", out);
  return 0;
}

int cmd_width(const ExperimentConfig& cfg) {
  std::string out = "family,param,width_lb,samples,last_increment,flagged\n";
  for (double p : cfg.params) {
    const WidthEstimate w = width_estimate(family_member(cfg.family, p), cfg.width);
    out += cfg.family + ',' + g(p) + ',' + g(w.value) + ',' + std::to_string(w.samples) + ',' + g(w.last_increment) +
           ',' + (w.flagged ? "true" : "false") + '\n';
  }
  write_file(fs::path(cfg.out_dir) / "width.csv", out);
  return 0;
}

int cmd_surface(const ExperimentConfig& cfg) {
  std::string out = "family,param,converged,iterations,mean_curvature_sup,lambda_sup\n";
  for (std::size_t i = 0; i < cfg.params.size(); ++i) {
    const SurfaceMesh m = solve_maximal(family_member(cfg.family, cfg.params[i]), cfg.solver);
    const std::string stem = "surface_" + std::to_string(i);
    write_obj(m, (fs::path(cfg.out_dir) / (stem + ".obj")).string());
    write_table(m, (fs::path(cfg.out_dir) / (stem + ".txt")).string());
    out += cfg.family + ',' + g(cfg.params[i]) + ',' + (m.converged ? "true" : "false") + ',' +
           std::to_string(m.iterations) + ',' + g(m.mean_curvature_sup()) + ',' + g(m.lambda_sup()) + '\n';
  }
  write_file(fs::path(cfg.out_dir) / "surface.csv", out);
  return 0;
}

int cmd_extend(const ExperimentConfig& cfg) {
  std::string out = "family,param,K_formula_sup,K_measured_sup,K_median_rel_error,K_max_rel_error,jacobian_error,"
                    "pullback_left,pullback_right\n";
  for (std::size_t i = 0; i < cfg.params.size(); ++i) {
    const SurfaceMesh m = solve_maximal(family_member(cfg.family, cfg.params[i]), cfg.solver);
    const SampledMap s = ml_map(m);
    const DilatationField d = dilatation(m, s);
    write_map_table(s, d, (fs::path(cfg.out_dir) / ("map_" + std::to_string(i) + ".txt")).string());
    out += cfg.family + ',' + g(cfg.params[i]) + ',' + g(d.K_sup) + ',' + g(d.K_measured_sup) + ',' +
           g(d.median_rel_error) + ',' + g(d.max_rel_error) + ',' + g(d.max_jacobian_error) + ',' +
           g(s.pullback_left) + ',' + g(s.pullback_right) + '\n';
  }
  write_file(fs::path(cfg.out_dir) / "extend.csv", out);
  return 0;
}

int report_rows(const Report& rep) {
  for (const ReportRow& r : rep.rows)
    if (!r.ok()) std::cerr << "row " << r.family << ' ' << r.param << " failed: " << r.error << '\n';
  return has_violation(rep) ? 2 : 0;
}

int cmd_verify(const ExperimentConfig& cfg, const std::string& format) {
  const Report rep = run_experiment(cfg);
  std::cout << emit(rep, format, cfg.out_dir) << '\n';
  return report_rows(rep);
}

int cmd_report(const ExperimentConfig& cfg) {
  const Report rep = run_experiment(cfg);
  for (const char* f : {"csv", "json", "svg"}) std::cout << emit(rep, f, cfg.out_dir) << '\n';
  if (rep.constants) {
    auto show = [](const char* name, const Fit& f) {
      std::cout << name << " = " << (f.value ? g(*f.value) : std::string("n/a")) << " over " << f.params.size()
                << " rows\n";
    };
    show("C1_hat", rep.constants->C1_hat);
    show("M_hat_widthlaw", rep.constants->M_hat_widthlaw);
    show("M_hat_lipschitz", rep.constants->M_hat_lipschitz);
    show("C_upper_hat", rep.constants->C_upper_hat);
    show("C0_lower_hat", rep.constants->C0_lower_hat);
  }
  return report_rows(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal surfaces in AdS^3 and minimal Lagrangian extensions: experiment driver"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--config", o.config, "experiment config (JSON)")->required();
    sub->add_option("--out", o.out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "master seed (overrides the config)")->each([&](const std::string&) { o.seed = seed; });
    if (with_format) sub->add_option("--format", o.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
  };
  CLI::App* norm = app.add_subcommand("norm", "cross-ratio norm lower bounds");
  CLI::App* width = app.add_subcommand("width", "convex hull width lower bounds");
  CLI::App* surface = app.add_subcommand("surface", "maximal surfaces, OBJ and height tables");
  CLI::App* extend = app.add_subcommand("extend", "minimal Lagrangian extension tables");
  CLI::App* verify = app.add_subcommand("verify", "full pipeline and inequality flags");
  CLI::App* report = app.add_subcommand("report", "full pipeline, CSV + JSON + SVG and constant fits");
  for (CLI::App* s : {norm, width, surface, extend, report}) common(s, false);
  common(verify, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    const ExperimentConfig cfg = load(o);
    if (norm->parsed()) return cmd_norm(cfg);
    if (width->parsed()) return cmd_width(cfg);
    if (surface->parsed()) return cmd_surface(cfg);
    if (extend->parsed()) return cmd_extend(cfg);
    if (verify->parsed()) return cmd_verify(cfg, o.format);
    return cmd_report(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
