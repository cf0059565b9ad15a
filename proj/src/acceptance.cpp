#include "cwdyn/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "cwdyn/chainrec.hpp"
#include "cwdyn/holonomy.hpp"
#include "cwdyn/periodic.hpp"
#include "cwdyn/sectors.hpp"

namespace cwdyn {

namespace {

using nlohmann::json;

struct Ctx {
  const AcceptanceOptions& opt;
  CriterionResult& r;
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> u{0.0, 1.0};

  double uni() { return u(rng); }
  double log_uniform(double lo, double hi) { return std::pow(10.0, lo + (hi - lo) * uni()); }
  void fail(const std::string& what) {
    if (r.failures.size() < 20) r.failures.push_back(what);
    r.pass = false;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const MetricConstants& constants_for(const SystemModel& sys, const AcceptanceOptions& opt) {
  static std::map<std::pair<int, std::uint64_t>, MetricConstants> cache;
  auto key = std::make_pair(int(sys.kind) * 1000003 + opt.calibration_budget, opt.seed);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, calibrate(sys, sys.c, opt.calibration_budget, opt.seed)).first;
  return it->second;
}

json constants_json(const MetricConstants& k) {
  return {{"m", k.m}, {"alpha", k.alpha}, {"n0", k.n0}, {"lambda", k.lambda}, {"xi", k.xi},
          {"horizon", k.horizon}};
}

MarkedContinuum random_arc(const SystemModel& sys, Ctx& cx, double top, double decades, int min_n) {
  std::vector<Point> pts;
  Vec2 v{cx.uni(), cx.uni()};
  int n = min_n + int(cx.uni() * 4);
  double scale = std::pow(10.0, -decades * cx.uni()) * top;
  for (int i = 0; i < n; ++i) {
    pts.push_back(make_point(sys, mod1(v.x), mod1(v.y)));
    double th = 6.283185307179586 * cx.uni();
    v = v + (scale / n) * Vec2{std::cos(th), std::sin(th)};
  }
  std::size_t a = std::size_t(cx.uni() * n), b = std::size_t(cx.uni() * n);
  return polyline(pts, a, b);
}

const std::vector<ModelKind> kMetricModels = {ModelKind::cat_map, ModelKind::sphere_pa};

void metric_axioms(Ctx& cx) {
  const int n = 1000, singletons = 10;
  json per = json::object();
  for (ModelKind kind : kMetricModels) {
    SystemModel sys = make_model(kind);
    const auto& k = constants_for(sys, cx.opt);
    long pos = 0, sym = 0, uni = 0, zero = 0;
    double worst_union = -1e300;
    for (int i = 0; i < n; ++i) {
      auto P = random_arc(sys, cx, 0.3, 3.0, 3);
      auto d = d_metric(sys, P, k, cx.opt.depth);
      if (d.value > 1e-12) ++pos;
      else cx.fail(std::string(model_name(kind)) + " sample " + std::to_string(i) + ": D = " + fmt("%.3g", d.value));
      auto rev = P;
      std::swap(rev.mark_p, rev.mark_q);
      if (d_metric(sys, rev, k, cx.opt.depth).value == d.value) ++sym;
      else cx.fail(std::string(model_name(kind)) + " sample " + std::to_string(i) + ": asymmetric");
      // A = vertices 0..n-2 marked (0, b), B = 1..n-1 marked (b, end); A u B = P marked (0, end)
      const std::size_t m = P.size();
      std::vector<Point> va(P.vertices.begin(), P.vertices.end() - 1);
      std::vector<Point> vb(P.vertices.begin() + 1, P.vertices.end());
      const std::size_t b = 1 + (m - 3) / 2;
      auto A = polyline(va, 0, b), B = polyline(vb, b - 1, vb.size() - 1);
      auto U = polyline(P.vertices, 0, m - 1);
      double slack = d_metric(sys, U, k, cx.opt.depth).value - d_metric(sys, A, k, cx.opt.depth).value -
                     d_metric(sys, B, k, cx.opt.depth).value;
      worst_union = std::max(worst_union, slack);
      if (slack <= 1e-9) ++uni;
      else cx.fail(std::string(model_name(kind)) + " sample " + std::to_string(i) + ": union slack " + fmt("%.3g", slack));
    }
    for (int i = 0; i < singletons; ++i) {
      auto S = singleton(make_point(sys, cx.uni(), cx.uni()));
      if (d_metric(sys, S, k, cx.opt.depth).value <= 1e-12) ++zero;
      else cx.fail(std::string(model_name(kind)) + ": singleton with positive D");
    }
    per[model_name(kind)] = {{"samples", n}, {"positive", pos}, {"symmetric", sym}, {"subadditive", uni},
                             {"singletons_zero", zero}, {"worst_union_slack", worst_union},
                             {"constants", constants_json(k)}};
  }
  cx.r.details = per;
  cx.r.summary = std::to_string(n) + " continua per model, positivity, exact symmetry, union slack <= 1e-9";
}

void hyperbolic_decay(Ctx& cx) {
  SystemModel cat = make_model(ModelKind::cat_map);
  const auto& k = constants_for(cat, cx.opt);
  const int n = 500;
  long checks = 0, bad = 0;
  double worst = 0;
  for (ArcKind kind : {ArcKind::stable, ArcKind::unstable}) {
    const long dir = kind == ArcKind::stable ? 1 : -1;
    for (int i = 0; i < n; ++i) {
      Point x = make_point(cat, cx.uni(), cx.uni());
      auto C = local_arc(cat, x, kind, cx.log_uniform(-15, -3), 3);
      MetricEvaluator ev(cat, C, k, cx.opt.depth);
      const double d0 = ev.d(0).value;
      for (long j = 0; j <= 10; ++j) {
        const double dj = ev.d(dir * j).value;
        const double bound = 4 * std::pow(k.lambda, -double(j)) * d0;
        ++checks;
        worst = std::max(worst, dj / bound);
        if (!(dj <= bound)) {
          ++bad;
          cx.fail(std::string(kind == ArcKind::stable ? "stable" : "unstable") + " arc " + std::to_string(i) +
                  " n=" + std::to_string(j) + ": ratio " + fmt("%.6g", dj / bound));
        }
      }
    }
  }
  cx.r.details = {{"continua_per_kind", n}, {"checks", checks}, {"violations", bad}, {"max_ratio_to_bound", worst}};
  cx.r.summary = std::to_string(n) + " stable + " + std::to_string(n) + " unstable arcs, n <= 10, " +
                 std::to_string(bad) + " violations";
}

void self_similarity(Ctx& cx) {
  SystemModel cat = make_model(ModelKind::cat_map);
  const auto& k = constants_for(cat, cx.opt);
  const double tail = std::pow(k.lambda, -double(k.horizon));
  const int n = 500;
  int found = 0, attempts = 0;
  double worst = 0;
  while (found < n && attempts < 40 * n) {
    ++attempts;
    auto C = random_arc(cat, cx, 1e-12, 3.0, 2);
    MetricEvaluator ev(cat, C, k, cx.opt.depth);
    const auto d0 = ev.d(0);
    const double d = d0.value;
    if (!(d <= k.xi) || d <= 0 || d0.horizon_hit) continue;
    ++found;
    const double m = std::max(ev.d(1).value, ev.d(-1).value);
    const double dev = std::fabs(m - k.lambda * d);
    worst = std::max(worst, dev / (k.lambda * d));
    if (dev > 1e-6 * k.lambda * d + tail) cx.fail("arc " + std::to_string(found) + ": rel dev " + fmt("%.3g", dev / (k.lambda * d)));
  }
  if (found < n) cx.fail("only " + std::to_string(found) + " continua with D <= xi");
  int stable = 0, s_attempts = 0;
  double worst_s = 0;
  while (stable < n && s_attempts < 40 * n) {
    ++s_attempts;
    Point x = make_point(cat, cx.uni(), cx.uni());
    auto C = local_arc(cat, x, ArcKind::stable, cx.log_uniform(-14.5, -13), 3);
    MetricEvaluator ev(cat, C, k, cx.opt.depth);
    const auto d0 = ev.d(0);
    const double d = d0.value;
    if (!(d <= k.xi) || d <= 0 || d0.horizon_hit) continue;
    ++stable;
    for (int j = 1; j <= 8; ++j) {
      const double want = std::pow(k.lambda, -double(j)) * d;
      const double dev = std::fabs(ev.d(j).value - want);
      worst_s = std::max(worst_s, dev / want);
      if (dev > 1e-6 * want + tail)
        cx.fail("stable arc " + std::to_string(stable) + " k=" + std::to_string(j) + ": rel dev " + fmt("%.3g", dev / want));
    }
  }
  if (stable < n) cx.fail("only " + std::to_string(stable) + " stable continua with D <= xi");
  cx.r.details = {{"continua", found}, {"attempts", attempts}, {"max_rel_dev", worst},
                  {"stable_continua", stable}, {"stable_max_rel_dev", worst_s}, {"xi", k.xi}};
  cx.r.summary = std::to_string(found) + " continua with D <= xi (max rel dev " + fmt("%.2g", worst) + "), " +
                 std::to_string(stable) + " stable arcs k <= 8 (max rel dev " + fmt("%.2g", worst_s) + ")";
}

void sandwich(Ctx& cx) {
  const int n = 500;
  json per = json::object();
  for (ModelKind kind : kMetricModels) {
    SystemModel sys = make_model(kind);
    const auto& k = constants_for(sys, cx.opt);
    long ok = 0;
    double worst_ratio = 0;
    for (int i = 0; i < n; ++i) {
      auto C = random_arc(sys, cx, 0.3, 4.0, 2);
      MetricEvaluator ev(sys, C, k, cx.opt.depth);
      const double p = ev.p(0), rh = ev.piece_rho(0, ev.cut_count() - 1, 0), dp = ev.d_prime(0);
      const double d = ev.d(0).value;
      if (p > 0) worst_ratio = std::max(worst_ratio, rh / p);
      bool good = p <= rh && rh <= 4 * p && d >= dp && dp >= p && dp <= 1.0;
      if (good) ++ok;
      else
        cx.fail(std::string(model_name(kind)) + " sample " + std::to_string(i) + ": P=" + fmt("%.6g", p) +
                " rho=" + fmt("%.6g", rh) + " D'=" + fmt("%.6g", dp) + " D=" + fmt("%.6g", d));
    }
    per[model_name(kind)] = {{"samples", n}, {"ok", ok}, {"max_rho_over_P", worst_ratio}};
  }
  cx.r.details = per;
  cx.r.summary = std::to_string(n) + " continua per model, P <= rho <= 4P, D >= D' >= P, D' <= 1";
}

void select_k_oracle(Ctx& cx) {
  const int n = 100;
  int ok = 0;
  for (int i = 0; i < n; ++i) {
    const double a = 1.0 + 9.0 * cx.uni();
    const double b = 0.05 + 0.9 * cx.uni();
    const double eps = cx.log_uniform(-8, -1);
    const int k = select_k(a, b, eps);
    const double r = a * std::pow(b, k);
    double term = 1.0, sum = 0.0;
    for (int j = 1; j <= 10000; ++j) {
      term *= r;
      sum += term;
    }
    bool good = sum <= eps;
    if (k > 0) {
      const double r1 = a * std::pow(b, k - 1);
      good = good && (r1 >= 1.0 || r1 / (1.0 - r1) > eps);
    }
    if (good) ++ok;
    else cx.fail("(a, b, eps) = (" + fmt("%.6g", a) + ", " + fmt("%.6g", b) + ", " + fmt("%.3g", eps) + "), k = " + std::to_string(k));
  }
  cx.r.details = {{"triples", n}, {"ok", ok}};
  cx.r.summary = std::to_string(ok) + "/" + std::to_string(n) + " triples: sums to 1e4 within eps, k-1 fails";
}

void periodic_density(Ctx& cx) {
  SystemModel cat = make_model(ModelKind::cat_map);
  const auto& k = constants_for(cat, cx.opt);
  auto params = katok_params(cat, 1e-2, k);
  int ok = 0, envelope = 0, rational = 0, widened = 0;
  json seeds = json::array();
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      // offset so that seeds are not themselves low-denominator rationals
      Point p = make_point(cat, (i + 0.5) / 10 + 0.0031415926, (j + 0.5) / 10 + 0.0027182818);
      bool good = false, env = false, rat = false;
      double residual = 1, dist = 1, rdist = 1;
      long period = 0;
      try {
        auto run = find_periodic_near(cat, p, params, k);
        auto chk = verify_periodic(cat, run.q, run.ret.k, 1e-9);
        residual = chk.residual;
        dist = distance(cat, run.q, p);
        good = chk.ok && dist < 1e-2;
        env = run.katok.envelope_ok;
        rdist = nearest_rational(run.q, 200).second;
        rat = rdist <= 1e-6;
        period = run.ret.k;
        widened += run.widened ? 1 : 0;
      } catch (const CwError& e) {
        cx.fail("seed " + std::to_string(i * 10 + j) + ": " + e.what());
      }
      ok += good;
      envelope += env;
      rational += rat;
      if (!env) cx.fail("seed " + std::to_string(i * 10 + j) + ": envelope violated");
      if (!rat) cx.fail("seed " + std::to_string(i * 10 + j) + ": no rational within 1e-6");
      seeds.push_back({{"k", period}, {"residual", residual}, {"dist", dist}, {"rational_dist", rdist}});
    }
  }
  if (ok < 95) cx.fail("only " + std::to_string(ok) + "/100 seeds periodic within 1e-2");
  cx.r.details = {{"ok", ok}, {"envelope_ok", envelope}, {"rational_matches", rational},
                  {"widened_returns", widened}, {"k0", params.k0}, {"seeds", seeds}};
  cx.r.summary = std::to_string(ok) + "/100 seeds periodic, envelope " + std::to_string(envelope) +
                 "/100, rational cross-check " + std::to_string(rational) + "/100";
}

void holonomy_correctness(Ctx& cx) {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto hp = holonomy_params(cat);
  const int n = 1000;
  double worst = 0;
  int instances = 0;
  for (int i = 0; i < n; ++i) {
    const ArcKind kind = i % 2 ? ArcKind::unstable : ArcKind::stable;
    Vec2 xl{cx.uni(), cx.uni()};
    Point x = make_point(cat, xl.x, xl.y);
    Vec2 off{cx.uni() - 0.5, cx.uni() - 0.5};
    Point y = project(cat, xl + (0.9 * hp.delta * cx.uni() / norm(off)) * off);
    Vec2 e = kind == ArcKind::stable ? cat.e_s : cat.e_u;
    Point z = project(cat, xl + (0.9 * hp.delta * (2 * cx.uni() - 1)) * e);
    auto r = holonomy(cat, x, y, z, kind, hp);
    ++instances;
    if (r.size() != 1) {
      cx.fail("instance " + std::to_string(i) + ": " + std::to_string(r.size()) + " points");
      continue;
    }
    double d = chart_distance(r[0], closed_form_holonomy(cat, y, z, kind));
    worst = std::max(worst, d);
    if (!(d <= 1e-10)) cx.fail("instance " + std::to_string(i) + ": deviation " + fmt("%.3g", d));
  }
  SystemModel pa = make_model(ModelKind::sphere_pa);
  auto hpa = holonomy_params(pa);
  Vec2 h{0.5, 0.5};
  Point x = project(pa, h + 0.004 * pa.e_u + 0.003 * pa.e_s);
  Point y = project(pa, h + 0.002 * pa.e_u - 0.004 * pa.e_s);
  auto two = holonomy(pa, x, y, x, ArcKind::stable, hpa);
  bool distinct = two.size() == 2 && chart_distance(two[0], two[1]) > 1e-6;
  if (!distinct) cx.fail("sphere-pA near spine: " + std::to_string(two.size()) + " points");
  cx.r.details = {{"instances", instances}, {"max_deviation", worst}, {"sphere_points", two.size()}};
  cx.r.summary = std::to_string(instances) + " cat-map holonomies, max deviation " + fmt("%.2g", worst) +
                 ", sphere-pA near spine gives " + std::to_string(two.size()) + " points";
}

void pseudo_isometry(Ctx& cx) {
  SystemModel cat = make_model(ModelKind::cat_map);
  const auto& k = constants_for(cat, cx.opt);
  auto hp = holonomy_params(cat);
  ProbeOptions po;
  po.log10_min = -70;
  po.log10_max = -44;
  po.seed = cx.opt.seed;
  long budget = 10000;
  ProbeReport rep;
  for (int round = 0; round < 4; ++round) {
    rep = pseudo_isometry_probe(cat, budget, {1e-3}, hp, k, po);
    if (rep.rows[0].samples >= 10000) break;
    budget = budget * 10000 / std::max<long>(1, rep.rows[0].samples) + 100;
  }
  const auto& row = rep.rows[0];
  const double dev = std::max(row.max_dev_stable, row.max_dev_unstable);
  if (row.samples < 10000) cx.fail("only " + std::to_string(row.samples) + " rectangles below gamma");
  if (!(dev <= 1e-6)) cx.fail("max ratio deviation " + fmt("%.3g", dev));
  cx.r.details = {{"gamma", row.gamma}, {"rectangles", row.samples}, {"drawn", rep.samples},
                  {"max_dev_stable", row.max_dev_stable}, {"max_dev_unstable", row.max_dev_unstable},
                  {"best_branch_dev", row.best_branch_dev}, {"obstructions", rep.obstructions},
                  {"multi_branch", rep.multi_branch}};
  cx.r.summary = std::to_string(row.samples) + " rectangles below gamma = 1e-3, max ratio deviation " + fmt("%.2g", dev);
}

void chain_recurrence(Ctx& cx) {
  json runs = json::array();
  for (ModelKind kind : kMetricModels) {
    SystemModel sys = make_model(kind);
    for (int res : {64, 128, 256}) {
      auto g = build_graph(sys, res, 1.5 / res);
      auto p = analyze(g);
      auto v = transitivity_verdict(g, p);
      runs.push_back({{"model", model_name(kind)}, {"res", res}, {"classes", p.classes.size()},
                      {"verdict", verdict_name(v)}});
      if (p.classes.size() != 1 || v != Verdict::transitive_candidate)
        cx.fail(std::string(model_name(kind)) + " res " + std::to_string(res) + ": " +
                std::to_string(p.classes.size()) + " classes");
    }
  }
  SystemModel ns = make_model(ModelKind::north_south);
  auto g = build_graph(ns, 256, 0.01);
  auto p = analyze(g);
  bool good = p.classes.size() == 2;
  std::string order;
  if (good) {
    good = g.class_order.size() == 1;
    if (good) {
      auto [lo, hi] = g.class_order[0];
      good = g.roles[std::size_t(lo)] == Role::repeller && g.roles[std::size_t(hi)] == Role::attractor;
      order = std::string(role_name(g.roles[std::size_t(lo)])) + " < " + role_name(g.roles[std::size_t(hi)]);
    }
  }
  if (!good) cx.fail("north-south: " + std::to_string(p.classes.size()) + " classes, order '" + order + "'");
  runs.push_back({{"model", "north-south"}, {"res", 256}, {"classes", p.classes.size()}, {"order", order},
                  {"verdict", verdict_name(transitivity_verdict(g, p))}});
  cx.r.details = {{"runs", runs}};
  cx.r.summary = "cat-map, sphere-pA single class at 64/128/256; north-south " + std::to_string(p.classes.size()) +
                 " classes (" + order + ")";
}

void sector_geometry(Ctx& cx) {
  SystemModel pa = make_model(ModelKind::sphere_pa);
  const double eps = 0.1;
  auto spines = enumerate_spines(pa, eps, 16);
  if (spines.size() != 4) cx.fail(std::to_string(spines.size()) + " spines");
  auto found = find_sectors(pa, {}, eps, 1 << 22, 24);
  if (found.partial) cx.fail("sector search hit its budget");
  auto mins = minimal_sectors(pa, found.sectors, spines);
  if (mins.size() != spines.size()) cx.fail(std::to_string(mins.size()) + " minimal sectors");
  int regular = 0, single = 0, enclosed = 0;
  long violations = 0, duplicates = 0;
  double min_clearance = 1e300;
  for (const auto& s : mins) {
    int inside = 0;
    for (const auto& h : spines) inside += sector_contains(pa, s, h) ? 1 : 0;
    regular += s.regular;
    single += inside == 1;
    if (!s.regular) cx.fail("non-regular minimal sector");
    if (inside != 1) cx.fail("minimal sector with " + std::to_string(inside) + " spines");
    if (!s.regular || !s.spine) continue;
    auto e = enclosing_sector(pa, s, 4);
    if (e.found && e.clearance > 0) {
      ++enclosed;
      min_clearance = std::min(min_clearance, e.clearance);
    } else {
      cx.fail("enclosing_sector: " + e.report);
    }
    auto rep = sector_parametrization(pa, s, 33);
    violations += rep.monotone_violations;
    duplicates += rep.duplicates + rep.missing;
  }
  if (violations) cx.fail(std::to_string(violations) + " monotonicity violations");
  if (duplicates) cx.fail(std::to_string(duplicates) + " non-injective or missing samples");
  cx.r.details = {{"spines", spines.size()}, {"sectors", found.sectors.size()}, {"minimal", mins.size()},
                  {"regular", regular}, {"single_spine", single}, {"enclosed", enclosed},
                  {"min_clearance", min_clearance}, {"monotone_violations", violations}};
  cx.r.summary = std::to_string(spines.size()) + " spines, " + std::to_string(regular) + " regular minimal sectors, " +
                 std::to_string(enclosed) + " enclosed, " + std::to_string(violations) + " violations on 33x33";
}

struct Entry {
  int id;
  const char* name;
  double limit;
  void (*fn)(Ctx&);
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {1, "metric-axioms", 120, metric_axioms},       {2, "hyperbolic-decay", 120, hyperbolic_decay},
      {3, "self-similarity", 180, self_similarity},   {4, "sandwich", 60, sandwich},
      {5, "select-k", 10, select_k_oracle},           {6, "periodic-density", 60, periodic_density},
      {7, "holonomy", 60, holonomy_correctness},      {8, "pseudo-isometry", 120, pseudo_isometry},
      {9, "chain-recurrence", 180, chain_recurrence}, {10, "sectors", 180, sector_geometry}};
  return e;
}

}  // namespace

const std::vector<std::pair<int, std::string>>& criterion_names() {
  static std::vector<std::pair<int, std::string>> n = [] {
    std::vector<std::pair<int, std::string>> v;
    for (const auto& e : entries()) v.emplace_back(e.id, e.name);
    v.emplace_back(11, "reproducibility");
    return v;
  }();
  return n;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
  auto it = std::find_if(entries().begin(), entries().end(), [&](const Entry& e) { return e.id == id; });
  if (it == entries().end()) throw CwError(ErrorKind::domain, "no criterion " + std::to_string(id));
  CriterionResult r;
  r.id = id;
  r.name = it->name;
  r.time_limit = it->limit;
  r.pass = true;
  Ctx cx{opt, r, std::mt19937_64(opt.seed * 1000003ull + std::uint64_t(id))};
  auto t0 = std::chrono::steady_clock::now();
  try {
    it->fn(cx);
  } catch (const std::exception& e) {
    cx.fail(std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > r.time_limit) cx.fail("runtime " + fmt("%.1f", r.seconds) + " s over " + fmt("%.0f", r.time_limit) + " s");
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> out;
  for (const auto& e : entries())
    if (opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), e.id) != opt.only.end())
      out.push_back(run_criterion(e.id, opt));
  return out;
}

CriterionResult reproducibility(const std::vector<CriterionResult>& first,
                                const std::vector<CriterionResult>& second) {
  CriterionResult r;
  r.id = 11;
  r.name = "reproducibility";
  r.pass = first.size() == second.size();
  long same = 0;
  for (std::size_t i = 0; i < std::min(first.size(), second.size()); ++i) {
    // runtime failures are timing, not report content
    auto strip = [](const CriterionResult& c) {
      json b = result_body(c);
      b.erase("pass");
      json f = json::array();
      for (const auto& s : c.failures)
        if (s.rfind("runtime ", 0) != 0) f.push_back(s);
      b["failures"] = f;
      return b.dump();
    };
    if (strip(first[i]) == strip(second[i])) ++same;
    else {
      r.pass = false;
      r.failures.push_back("criterion " + std::to_string(first[i].id) + " differs between runs");
    }
  }
  r.details = {{"compared", std::min(first.size(), second.size())}, {"identical", same}};
  r.summary = std::to_string(same) + "/" + std::to_string(first.size()) + " criterion bodies identical across two runs";
  return r;
}

std::string result_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%s] %2d %-18s ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
  std::string s = buf + r.summary;
  if (r.time_limit > 0) s += " (" + fmt("%.1f", r.seconds) + " s, limit " + fmt("%.0f", r.time_limit) + " s)";
  return s;
}

json result_body(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"summary", r.summary},
          {"details", r.details}, {"failures", r.failures}};
}

json failure_manifest(const std::vector<CriterionResult>& results) {
  json failed = json::array();
  long passed = 0;
  for (const auto& r : results) {
    if (r.pass) ++passed;
    else failed.push_back({{"id", r.id}, {"name", r.name}, {"failures", r.failures}});
  }
  return {{"passed", passed}, {"failed", failed}, {"total", results.size()}};
}

}  // namespace cwdyn
