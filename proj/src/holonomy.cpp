#include "cwdyn/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cwdyn {

namespace {

std::pair<double, double> split(const SystemModel& sys, Vec2 d) {
  const double det = sys.e_u.x * sys.e_s.y - sys.e_s.x * sys.e_u.y;
  return {(d.x * sys.e_s.y - sys.e_s.x * d.y) / det, (sys.e_u.x * d.y - d.x * sys.e_u.y) / det};
}

MarkedContinuum segment(const SystemModel& sys, Vec2 from, Vec2 step) {
  MarkedContinuum c;
  c.vertices = {project(sys, from), project(sys, from + step)};
  c.lift = {from, from + step};
  c.mark_p = 0;
  c.mark_q = 1;
  return c;
}

MarkedContinuum micro_segment(const SystemModel& sys, Vec2 from, Vec2 step) {
  MarkedContinuum c = segment(sys, from, step);
  c.micro = {Vec2{0, 0}, step};
  return c;
}

MarkedContinuum piece(const MarkedContinuum& arc, const Point& a, const Point& b, double tol) {
  if (chart_distance(a, b) <= tol) return singleton(a);
  return subcontinuum(arc, a, b, tol);
}

double deviation(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : 1.0;
  return std::fabs(num / den - 1.0);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return std::pow(10.0, u(rng));
}

}  // namespace

double product_structure_radius(const SystemModel& sys, double eps, int grid, int directions) {
  const double two_pi = 2.0 * std::acos(-1.0);
  auto holds = [&](double r) {
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        Vec2 x{(i + 0.37) / grid, (j + 0.61) / grid};
        MarkedContinuum sx = local_arc(sys, project(sys, x), ArcKind::stable, eps, 2);
        for (int k = 0; k < directions; ++k) {
          double th = two_pi * k / directions;
          Point y = project(sys, x + r * Vec2{std::cos(th), std::sin(th)});
          if (intersect(sx, local_arc(sys, y, ArcKind::unstable, eps, 2)).empty()) return false;
        }
      }
    return true;
  };
  if (holds(eps)) return eps;
  double lo = 0.0, hi = eps;
  for (int it = 0; it < 30; ++it) {
    double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return lo;
}

HolonomyParams holonomy_params(const SystemModel& sys) {
  HolonomyParams p;
  p.eps = sys.c / 2;
  p.delta = product_structure_radius(sys, p.eps) / 2;
  return p;
}

std::vector<Point> holonomy(const SystemModel& sys, const Point& x, const Point& y, const Point& z,
                            ArcKind kind, const HolonomyParams& params) {
  if (!(params.delta < params.eps && params.eps < sys.c))
    throw CwError(ErrorKind::domain, "holonomy: need delta < eps < c");
  if (distance(sys, x, y) >= params.delta)
    throw CwError(ErrorKind::domain, "holonomy: d(x, y) must be below delta");
  MarkedContinuum base = local_arc(sys, x, kind, params.delta, 2);
  if (locate(base, z).dist > params.tol)
    throw CwError(ErrorKind::off_continuum, "holonomy: z is not on the local arc of x");
  ArcKind across = kind == ArcKind::stable ? ArcKind::unstable : ArcKind::stable;
  auto pts = intersect(local_arc(sys, z, across, params.eps, 2),
                       local_arc(sys, y, kind, params.eps, 2), params.tol);
  if (pts.empty()) throw CwError(ErrorKind::model_fault, "holonomy: empty intersection");
  return pts;
}

Point closed_form_holonomy(const SystemModel& sys, const Point& y, const Point& z, ArcKind kind) {
  Vec2 v = nearest_lift(sys.chart(), y.c, z.c) - z.c;
  auto [a, b] = split(sys, v);
  Vec2 w = kind == ArcKind::stable ? z.c + a * sys.e_u : z.c + b * sys.e_s;
  return project(sys, w);
}

RectangleResult build_rectangle(const SystemModel& sys, const MarkedContinuum& C,
                                const Point& pstar, const MarkedContinuum& Cprime,
                                const HolonomyParams& params, const MetricConstants& consts,
                                int depth) {
  const Point p = C.p(), q = C.q();
  if (locate(Cprime, p).dist > params.tol || locate(Cprime, pstar).dist > params.tol)
    throw CwError(ErrorKind::off_continuum, "build_rectangle: p or p* is not on C'");
  RectangleResult res;
  MarkedContinuum arc_s = local_arc(sys, pstar, ArcKind::stable, params.eps, 2);
  MarkedContinuum arc_u = local_arc(sys, q, ArcKind::unstable, params.eps, 2);
  auto cands = intersect(arc_s, arc_u, params.tol);
  if (cands.empty()) {
    res.obstruction = "no q* on C^s(p*) ∩ C^u(q)";
    return res;
  }
  HolonomyRectangle& r = res.rect;
  r.C = C;
  r.Cprime = piece(Cprime, p, pstar, params.tol);
  r.dC = d_metric(sys, r.C, consts, depth).value;
  r.dCprime = d_metric(sys, r.Cprime, consts, depth).value;
  r.branches = int(cands.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    MarkedContinuum cs = piece(arc_s, pstar, cands[i], params.tol);
    MarkedContinuum css = piece(arc_u, q, cands[i], params.tol);
    double ds = d_metric(sys, cs, consts, depth).value;
    double dss = d_metric(sys, css, consts, depth).value;
    r.branch_d.push_back({ds, dss});
    if (std::max(ds, dss) < best) {
      best = std::max(ds, dss);
      r.chosen = int(i);
      r.Cstar = cs;
      r.Cstarstar = css;
      r.dCstar = ds;
      r.dCstarstar = dss;
      r.corners = {p, q, pstar, cands[i]};
    }
  }
  res.ok = true;
  return res;
}

ProbeReport pseudo_isometry_probe(const SystemModel& sys, long sample_budget,
                                  const std::vector<double>& gamma_grid,
                                  const HolonomyParams& params, const MetricConstants& consts,
                                  const ProbeOptions& opt) {
  ProbeReport rep;
  std::vector<double> grid = gamma_grid;
  std::sort(grid.begin(), grid.end());
  for (double g : grid) rep.rows.push_back(ProbeRow{g});
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double top = std::min(opt.log10_max, std::log10(params.delta));
  for (long s = 0; s < sample_budget; ++s) {
    Vec2 pl{u01(rng), u01(rng)};
    double t = log_uniform(rng, opt.log10_min, top) * (u01(rng) < 0.5 ? -1 : 1);
    double w = log_uniform(rng, opt.log10_min, top) * (u01(rng) < 0.5 ? -1 : 1);
    ++rep.samples;
    double dC, dCp;
    std::vector<std::array<double, 2>> branches;
    if (std::fabs(t) >= opt.chart_floor && std::fabs(w) >= opt.chart_floor) {
      pl = project(sys, pl).c;
      MarkedContinuum C = segment(sys, pl, t * sys.e_s);
      MarkedContinuum Cp = segment(sys, pl, w * sys.e_u);
      RectangleResult r = build_rectangle(sys, C, Cp.q(), Cp, params, consts, opt.depth);
      if (!r.ok) {
        ++rep.obstructions;
        continue;
      }
      dC = r.rect.dC;
      dCp = r.rect.dCprime;
      branches = r.rect.branch_d;
    } else {
      // eigen-coordinates relative to p: q = (0, t), p* = (w, 0), q* = (p*_u, q_s)
      Vec2 pe{0, 0}, qe{0, t}, pse{w, 0};
      Vec2 qse{pse.x, qe.y};
      auto cart = [&](Vec2 e) { return e.x * sys.e_u + e.y * sys.e_s; };
      MarkedContinuum C = micro_segment(sys, pl, cart(qe - pe));
      MarkedContinuum Cp = micro_segment(sys, pl, cart(pse - pe));
      MarkedContinuum Cs = micro_segment(sys, pl + cart(pse), cart(qse - pse));
      MarkedContinuum Css = micro_segment(sys, pl + cart(qe), cart(qse - qe));
      dC = d_metric(sys, C, consts, opt.depth).value;
      dCp = d_metric(sys, Cp, consts, opt.depth).value;
      branches.push_back({d_metric(sys, Cs, consts, opt.depth).value,
                          d_metric(sys, Css, consts, opt.depth).value});
    }
    if (branches.size() > 1) ++rep.multi_branch;
    double worst_s = 0, worst_u = 0, best = std::numeric_limits<double>::infinity();
    for (auto& b : branches) {
      double ds = deviation(b[0], dC), du = deviation(b[1], dCp);
      worst_s = std::max(worst_s, ds);
      worst_u = std::max(worst_u, du);
      best = std::min(best, std::max(ds, du));
    }
    double size = std::max(dC, dCp);
    for (auto& row : rep.rows) {
      if (size > row.gamma) continue;
      ++row.samples;
      row.max_dev_stable = std::max(row.max_dev_stable, worst_s);
      row.max_dev_unstable = std::max(row.max_dev_unstable, worst_u);
      row.best_branch_dev = std::max(row.best_branch_dev, best);
    }
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i - 1];
    const auto& b = rep.rows[i];
    if (std::max(a.max_dev_stable, a.max_dev_unstable) >
        std::max(b.max_dev_stable, b.max_dev_unstable))
      ++rep.monotone_violations;
  }
  return rep;
}

IsometryReport isometry_check(const SystemModel& sys, long sample_budget,
                              const HolonomyParams& params, const MetricConstants& consts,
                              double rel_tol, std::uint64_t seed, int depth) {
  IsometryReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (long s = 0; s < sample_budget; ++s) {
    Vec2 xl = project(sys, Vec2{u01(rng), u01(rng)}).c;
    double th = two_pi * u01(rng);
    Point x = project(sys, xl);
    Point y = project(sys, xl + (0.9 * params.delta * u01(rng)) * Vec2{std::cos(th), std::sin(th)});
    double t = log_uniform(rng, -6.0, std::log10(0.9 * params.delta));
    MarkedContinuum C = segment(sys, xl, t * sys.e_s);
    ++rep.samples;
    auto ps = holonomy(sys, x, y, C.p(), ArcKind::stable, params);
    auto qs = holonomy(sys, x, y, C.q(), ArcKind::stable, params);
    if (ps.size() > 1 || qs.size() > 1) ++rep.multi_branch;
    MarkedContinuum arc_y = local_arc(sys, y, ArcKind::stable, params.eps, 2);
    double dC = d_metric(sys, C, consts, depth).value;
    double best = std::numeric_limits<double>::infinity();
    for (const Point& a : ps)
      for (const Point& b : qs) {
        if (locate(arc_y, a).dist > params.tol || locate(arc_y, b).dist > params.tol) continue;
        double d = d_metric(sys, piece(arc_y, a, b, params.tol), consts, depth).value;
        best = std::min(best, deviation(d, dC));
      }
    if (best <= rel_tol) ++rep.successes;
    if (std::isfinite(best)) rep.max_best_dev = std::max(rep.max_best_dev, best);
  }
  return rep;
}

}  // namespace cwdyn
