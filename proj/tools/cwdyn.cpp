#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "cwdyn/acceptance.hpp"
#include "cwdyn/chainrec.hpp"
#include "cwdyn/config.hpp"
#include "cwdyn/periodic.hpp"
#include "cwdyn/sectors.hpp"

using namespace cwdyn;
using nlohmann::json;

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::string model, out;
  double c = 0;
  int res = 0, depth = -1, horizon = 0;
  long seed = -1;
};

void add_common(CLI::App* app, Common& o) {
  app->add_option("--config", o.config_file, "config file (key = value lines)");
  app->add_option("--set", o.sets, "override, key=value");
  app->add_option("--model", o.model, "cat | sphere-pA | north-south");
  app->add_option("--c", o.c, "expansivity constant");
  app->add_option("--res", o.res, "discretization.resolution");
  app->add_option("--depth", o.depth, "dyadic refinement depth");
  app->add_option("--horizon", o.horizon, "iteration horizon");
  app->add_option("--seed", o.seed, "run seed");
  app->add_option("--out", o.out, "report file (line-delimited JSON); default stdout");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentConfig resolve(const Common& o) {
  ExperimentConfig cfg;
  if (!o.config_file.empty()) cfg = load_config(o.config_file);
  if (const char* dir = std::getenv("CWDYN_OUT_DIR")) cfg.output_dir = dir;
  for (const auto& s : o.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set", 0, "expected key=value, got '" + s + "'");
    set_config_key(cfg, s.substr(0, eq), s.substr(eq + 1), "--set");
  }
  if (!o.model.empty()) set_config_key(cfg, "model.kind", o.model, "--model");
  if (o.c > 0) set_config_key(cfg, "model.c", num(o.c), "--c");
  if (o.res > 0) set_config_key(cfg, "discretization.resolution", std::to_string(o.res), "--res");
  if (o.depth >= 0) set_config_key(cfg, "discretization.depth", std::to_string(o.depth), "--depth");
  if (o.horizon > 0) set_config_key(cfg, "discretization.horizon", std::to_string(o.horizon), "--horizon");
  if (o.seed >= 0) set_config_key(cfg, "run.seed", std::to_string(o.seed), "--seed");
  return cfg;
}

std::vector<double> parse_list(const std::string& s, std::size_t n, const std::string& flag) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(flag, 0, "bad number '" + tok + "'");
    }
  }
  if (n && v.size() != n) throw ConfigError(flag, 0, "expected " + std::to_string(n) + " comma-separated numbers");
  return v;
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;
  std::ostream* table = &std::cerr;
  explicit Output(const ExperimentConfig& cfg, const std::string& out) {
    if (out.empty()) return;
    std::string path = out;
    if (!cfg.output_dir.empty() && path.front() != '/') path = cfg.output_dir + "/" + path;
    file = std::make_unique<std::ofstream>(path);
    if (!*file) throw ConfigError("--out", 0, "cannot write " + path);
    os = file.get();
    table = &std::cout;
  }
};

json constants_json(const MetricConstants& k) {
  return {{"c", k.c}, {"m", k.m}, {"alpha", k.alpha}, {"n0", k.n0}, {"k", k.k}, {"lambda", k.lambda},
          {"xi", k.xi}, {"horizon", k.horizon}};
}

MetricConstants constants_of(const SystemModel& sys, const ExperimentConfig& cfg) {
  auto mode = cfg.calibration_mode == "structured" ? CalibrationMode::structured : CalibrationMode::full;
  return calibrate(sys, cfg.c, int(cfg.sample_budget), cfg.seed, mode);
}

void context(ReportWriter& w, const MetricConstants& k) {
  w.record("context", {{"constants", constants_json(k)}, {"tail_bound", std::pow(k.lambda, -double(k.horizon))}});
}

int cmd_calibrate(const ExperimentConfig& cfg, Output& out) {
  SystemModel sys = make_system(cfg);
  auto mode = cfg.calibration_mode == "structured" ? CalibrationMode::structured : CalibrationMode::full;
  auto rep = calibrate_report(sys, cfg.c, int(cfg.sample_budget), cfg.seed, mode);
  ReportWriter w(*out.os, cfg, "calibrate");
  w.header(utc_now());
  context(w, rep.consts);
  w.record("calibration", {{"samples", rep.samples}, {"structured_m", rep.structured_m}, {"random_m", rep.random_m},
                           {"constants", constants_json(rep.consts)}});
  *out.table << "m = " << rep.consts.m << "  lambda = " << rep.consts.lambda << "  xi = " << rep.consts.xi
             << "  horizon = " << rep.consts.horizon << "\n";
  return 0;
}

int cmd_metric(const ExperimentConfig& cfg, Output& out, const std::string& file, const std::string& sgl,
               const std::string& seg) {
  SystemModel sys = make_system(cfg);
  MarkedContinuum C;
  if (!file.empty()) C = load_continuum(sys, file);
  else if (!sgl.empty()) {
    auto v = parse_list(sgl, 2, "--singleton");
    C = singleton(make_point(sys, v[0], v[1]));
  } else if (!seg.empty()) {
    auto v = parse_list(seg, 4, "--segment");
    C = polyline({make_point(sys, v[0], v[1]), make_point(sys, v[2], v[3])}, 0, 1);
  } else {
    throw ConfigError("metric", 0, "one of --continuum, --singleton, --segment is required");
  }
  auto k = constants_of(sys, cfg);
  MetricEvaluator ev(sys, C, k, cfg.depth);
  auto n = ev.whole_n(0);
  double rh = ev.degenerate() ? 0.0 : ev.piece_rho(0, ev.cut_count() - 1, 0);
  double p = ev.p(0), dp = ev.d_prime(0);
  auto d = ev.d(0);
  ReportWriter w(*out.os, cfg, "metric");
  w.header(utc_now());
  context(w, k);
  json N = n.infinite ? json("inf") : json(n.n);
  w.record("metric", {{"continuum", to_json(C)}, {"N", N}, {"N_horizon", n.horizon}, {"rho", rh}, {"P", p},
                      {"Dprime", dp}, {"D", d.value}, {"achieved_index", d.achieved_index},
                      {"tail_bound", d.tail_bound}, {"horizon_hit", d.horizon_hit}});
  *out.table << "N = " << N.dump() << "  rho = " << rh << "  P = " << p << "  D' = " << dp << "  D = " << d.value << "\n";
  return 0;
}

int cmd_probe(const ExperimentConfig& cfg, Output& out, long budget, const std::string& gammas, double lo, double hi) {
  SystemModel sys = make_system(cfg);
  auto k = constants_of(sys, cfg);
  auto hp = holonomy_params(sys);
  ProbeOptions po;
  po.log10_min = lo;
  po.log10_max = hi;
  po.seed = cfg.seed;
  po.depth = std::min(cfg.depth, 2);
  auto grid = parse_list(gammas, 0, "--gamma");
  auto rep = pseudo_isometry_probe(sys, budget, grid, hp, k, po);
  ReportWriter w(*out.os, cfg, "holonomy-probe");
  w.header(utc_now());
  context(w, k);
  json rows = json::array();
  *out.table << "gamma      samples  dev_stable  dev_unstable  best_branch\n";
  for (const auto& r : rep.rows) {
    rows.push_back({{"gamma", r.gamma}, {"samples", r.samples}, {"max_dev_stable", r.max_dev_stable},
                    {"max_dev_unstable", r.max_dev_unstable}, {"best_branch_dev", r.best_branch_dev}});
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-10.3g %7ld  %10.3g  %12.3g  %11.3g\n", r.gamma, r.samples, r.max_dev_stable,
                  r.max_dev_unstable, r.best_branch_dev);
    *out.table << buf;
  }
  w.record("holonomy-probe", {{"params", {{"eps", hp.eps}, {"delta", hp.delta}}},
                              {"per_branch", {{"multi_branch", rep.multi_branch}, {"samples", rep.samples}}},
                              {"modulus_table", rows}, {"monotone_violations", rep.monotone_violations},
                              {"obstructions", rep.obstructions}});
  return 0;
}

int cmd_periodic(const ExperimentConfig& cfg, Output& out, const std::string& pstr, double alpha) {
  SystemModel sys = make_system(cfg);
  auto v = parse_list(pstr, 2, "--p");
  auto k = constants_of(sys, cfg);
  auto params = katok_params(sys, alpha, k);
  auto run = find_periodic_near(sys, make_point(sys, v[0], v[1]), params, k);
  ReportWriter w(*out.os, cfg, "periodic");
  w.header(utc_now());
  context(w, k);
  json steps = json::array();
  for (const auto& s : run.katok.steps)
    steps.push_back({{"y", to_json(s.y)}, {"residual", s.residual}, {"D_F", s.d_f}, {"envelope", s.envelope},
                     {"branches", s.branches}});
  auto [rat, rdist] = nearest_rational(run.q, 200);
  json prm = {{"alpha", params.alpha_target}, {"c", params.c}, {"d_c", params.d_c}, {"eps", params.eps},
              {"delta_prime", params.delta_prime}, {"delta", params.delta}, {"gamma", params.gamma},
              {"beta", params.beta}, {"return_radius", params.return_radius}, {"k0", params.k0}};
  w.record("periodic", {{"params", prm}, {"y_k_found", {{"y", to_json(run.ret.y)}, {"k", run.ret.k},
                                                        {"period", run.ret.period}, {"dist", run.ret.dist}}},
                        {"widened", run.widened}, {"steps", steps}, {"q", to_json(run.q)},
                        {"q_rational", {rat.nx, rat.ny, rat.den}}, {"residual", run.residual},
                        {"dist_to_p", run.dist_to_p}, {"envelope_ok", run.katok.envelope_ok}, {"ok", run.ok}});
  *out.table << "q = (" << rat.nx << "/" << rat.den << ", " << rat.ny << "/" << rat.den << ")  k = " << run.ret.k
             << "  residual = " << run.residual << "  d(q,p) = " << run.dist_to_p << "\n";
  return run.ok ? 0 : 3;
}

int cmd_chainrec(const ExperimentConfig& cfg, Output& out, double eps) {
  SystemModel sys = make_system(cfg);
  ChainClassGraph g;
  try {
    g = build_graph(sys, cfg.resolution, eps);
  } catch (const CwError& e) {
    if (e.kind() == ErrorKind::config) throw ConfigError("--eps", 0, e.what());
    throw;
  }
  auto part = analyze(g);
  auto verdict = transitivity_verdict(g, part);
  ReportWriter w(*out.os, cfg, "chainrec");
  w.header(utc_now());
  w.record("context", {{"constants", {{"eps", eps}, {"resolution", cfg.resolution}, {"diagonal", g.diagonal}}},
                       {"tail_bound", 0.0}});
  json classes = json::array(), roles = json::array(), order = json::array();
  for (std::size_t i = 0; i < part.classes.size(); ++i) {
    const auto& cl = part.classes[i];
    json cells = json::array();
    for (auto v : cl) cells.push_back(g.cells[v]);
    Vec2 c0 = g.center(cl.front());
    classes.push_back({{"id", i}, {"size", cl.size()}, {"first_center", {c0.x, c0.y}}, {"cells", cells}});
    roles.push_back(role_name(g.roles[i]));
  }
  for (auto [a, b] : g.class_order) order.push_back({a, b});
  w.record("chainrec", {{"system", g.system}, {"classes", classes}, {"order", order}, {"roles", roles},
                        {"verdict", verdict_name(verdict)}, {"nodes", g.node_count()}, {"edges", g.edge_count()}});
  *out.table << part.classes.size() << " chain classes, verdict " << verdict_name(verdict) << "\n";
  for (std::size_t i = 0; i < part.classes.size(); ++i)
    *out.table << "  class " << i << ": " << part.classes[i].size() << " cells, " << role_name(g.roles[i]) << "\n";
  return 0;
}

int cmd_sectors(const ExperimentConfig& cfg, Output& out, double eps, int seeds, long budget, int grid) {
  SystemModel sys = make_system(cfg);
  auto spines = enumerate_spines(sys, eps, cfg.resolution);
  auto found = find_sectors(sys, {}, eps, budget, seeds);
  auto mins = minimal_sectors(sys, found.sectors, spines);
  ReportWriter w(*out.os, cfg, "sectors");
  w.header(utc_now());
  w.record("context", {{"constants", {{"eps", eps}, {"seed_grid", seeds}, {"budget", budget}}}, {"tail_bound", 0.0}});
  json sj = json::array(), spj = json::array(), pj = json::array();
  for (const auto& h : spines) spj.push_back(to_json(h));
  for (const auto& s : found.sectors)
    sj.push_back({{"a1", to_json(s.a1)}, {"a2", to_json(s.a2)}, {"regular", s.regular},
                  {"spine", s.spine ? to_json(*s.spine) : json()}, {"area", sector_area(sys, s)}});
  for (const auto& s : mins) {
    if (!s.regular || !s.spine) continue;
    auto rep = sector_parametrization(sys, s, grid);
    auto e = enclosing_sector(sys, s, 4);
    pj.push_back({{"spine", to_json(*s.spine)}, {"grid", rep.grid}, {"monotone_violations", rep.monotone_violations},
                  {"duplicates", rep.duplicates}, {"missing", rep.missing}, {"max_modulus", rep.max_modulus},
                  {"enclosing", {{"found", e.found}, {"clearance", e.clearance}, {"report", e.report}}}});
  }
  w.record("sectors", {{"sectors", sj}, {"spines", spj}, {"parametrization_reports", pj},
                       {"partial", found.partial}, {"pairs", found.pairs}});
  *out.table << spines.size() << " spines, " << found.sectors.size() << " sectors, " << mins.size()
             << " minimal" << (found.partial ? " (partial)" : "") << "\n";
  return 0;
}

int cmd_acceptance(const ExperimentConfig& cfg, Output& out, const std::string& suite) {
  AcceptanceOptions opt;
  opt.seed = cfg.seed;
  opt.calibration_budget = int(cfg.sample_budget);
  if (suite != "all") {
    for (double v : parse_list(suite, 0, "--suite")) {
      if (v < 1 || v > 11 || v != int(v)) throw ConfigError("--suite", 0, "criteria are 1..11");
      if (v <= 10) opt.only.push_back(int(v));
    }
  }
  auto first = run_acceptance(opt);
  auto second = run_acceptance(opt);
  auto all = first;
  all.push_back(reproducibility(first, second));
  ReportWriter w(*out.os, cfg, "acceptance");
  w.header(utc_now());
  for (const auto& r : all) {
    w.record("criterion", result_body(r));
    *out.table << result_line(r) << "\n";
  }
  auto manifest = failure_manifest(all);
  w.record("manifest", manifest);
  if (!manifest["failed"].empty()) {
    std::cerr << "failure manifest: " << manifest.dump() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cwdyn: cw-hyperbolic toy dynamics"};
  app.require_subcommand(1);
  Common o;

  auto* cal = app.add_subcommand("calibrate", "estimate m and the metric constants");
  add_common(cal, o);
  long budget = 0;
  std::string mode;
  cal->add_option("--budget", budget, "random sample budget");
  cal->add_option("--mode", mode, "full | structured");

  auto* met = app.add_subcommand("metric", "N, rho, P, D', D of one continuum");
  add_common(met, o);
  std::string cont, sgl, seg;
  met->add_option("--continuum", cont, "continuum JSON file");
  met->add_option("--singleton", sgl, "x,y");
  met->add_option("--segment", seg, "x0,y0,x1,y1");

  auto* hol = app.add_subcommand("holonomy-probe", "pseudo-isometry probe");
  add_common(hol, o);
  long pbudget = 10000;
  std::string gammas = "1e-3,1e-2,0.1,1";
  double lo = -60, hi = -2;
  hol->add_option("--budget", pbudget, "rectangles to draw");
  hol->add_option("--gamma", gammas, "comma-separated gamma grid");
  hol->add_option("--log10-min", lo, "smallest side length exponent");
  hol->add_option("--log10-max", hi, "largest side length exponent");

  auto* per = app.add_subcommand("periodic", "periodic point near p");
  add_common(per, o);
  std::string pstr;
  double alpha = 1e-2;
  per->add_option("--p", pstr, "x,y")->required();
  per->add_option("--alpha", alpha, "target distance");

  auto* chn = app.add_subcommand("chainrec", "chain-recurrent classes on a grid");
  add_common(chn, o);
  double ceps = -1;
  chn->add_option("--eps", ceps, "pseudo-orbit jump; default 1.5/res (0.01 for north-south)");

  auto* sec = app.add_subcommand("sectors", "spines and sectors");
  add_common(sec, o);
  double seps = 0.1;
  int seeds = 24, pgrid = 33;
  long sbudget = 1 << 22;
  sec->add_option("--eps", seps, "arc half-length");
  sec->add_option("--seeds", seeds, "seed grid per side");
  sec->add_option("--budget", sbudget, "arc pairs");
  sec->add_option("--grid", pgrid, "parametrization grid");

  auto* acc = app.add_subcommand("acceptance", "run the acceptance suite twice and compare");
  add_common(acc, o);
  std::string suite = "all";
  acc->add_option("--suite", suite, "all or a comma-separated list of criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: command line: " << e.what() << "\n";
    return 1;
  }

  try {
    ExperimentConfig cfg = resolve(o);
    if (*cal) {
      if (budget > 0) set_config_key(cfg, "calibration.sample_budget", std::to_string(budget), "--budget");
      if (!mode.empty()) set_config_key(cfg, "calibration.mode", mode, "--mode");
    }
    Output out(cfg, o.out);
    if (*cal) return cmd_calibrate(cfg, out);
    if (*met) return cmd_metric(cfg, out, cont, sgl, seg);
    if (*hol) return cmd_probe(cfg, out, pbudget, gammas, lo, hi);
    if (*per) return cmd_periodic(cfg, out, pstr, alpha);
    if (*chn) {
      double eps = ceps > 0 ? ceps : (cfg.model_kind == "north-south" ? 0.01 : 1.5 / cfg.resolution);
      return cmd_chainrec(cfg, out, eps);
    }
    if (*sec) return cmd_sectors(cfg, out, seps, seeds, sbudget, pgrid);
    if (*acc) return cmd_acceptance(cfg, out, suite);
  } catch (const CwError& e) {
    if (e.kind() == ErrorKind::config) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
