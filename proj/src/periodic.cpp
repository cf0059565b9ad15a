#include "cwdyn/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cwdyn {

namespace {

constexpr long kFloatMaxK = 16;

MarkedContinuum micro_seg(const SystemModel& sys, Vec2 from, Vec2 step) {
  MarkedContinuum c;
  c.vertices = {project(sys, from), project(sys, from + step)};
  c.lift = {from, from + step};
  c.micro = {Vec2{0, 0}, step};
  c.mark_q = 1;
  return c;
}

double seg_d(const SystemModel& sys, const MetricConstants& consts, Vec2 dir, double len) {
  return d_metric(sys, micro_seg(sys, Vec2{0.3, 0.6}, len * dir), consts, 0).value;
}

std::vector<Vec2> probe_directions(const SystemModel& sys) {
  const double pi = std::acos(-1.0);
  std::vector<Vec2> dirs{sys.e_u, sys.e_s};
  for (int j = 0; j < 16; ++j) dirs.push_back({std::cos(pi * j / 16), std::sin(pi * j / 16)});
  return dirs;
}

double wrap_dist(Vec2 a, Vec2 b) { return norm(wrap_half(a - b)); }

SystemModel with_horizon(const SystemModel& sys, long k) {
  SystemModel s = sys;
  s.horizon = int(std::max<long>(sys.horizon, k + 1));
  return s;
}

MarkedContinuum stable_piece(const SystemModel& sys, const Point& y, const Point& z) {
  if (chart_distance(y, z) == 0.0) return singleton(y);
  MarkedContinuum c;
  c.vertices = {y, z};
  c.lift = {y.c, nearest_lift(sys.chart(), z.c, y.c)};
  c.mark_q = 1;
  return c;
}

}  // namespace

int select_k(double a, double b, double eps) {
  if (!(a > 1.0) || !(b > 0.0 && b < 1.0) || !(eps > 0.0))
    throw CwError(ErrorKind::domain, "select_k: need a > 1, 0 < b < 1, eps > 0");
  int k = std::max(0, int(std::floor(-std::log(a) / std::log(b))) - 1);
  for (;; ++k) {
    double r = a * std::pow(b, k);
    if (r < 1.0 && r / (1.0 - r) <= eps) return k;
  }
}

KatokParams katok_params(const SystemModel& sys, double alpha_target,
                         const MetricConstants& consts) {
  if (!(alpha_target > 0.0)) throw CwError(ErrorKind::domain, "katok: alpha must be positive");
  KatokParams kp;
  kp.alpha_target = alpha_target;
  kp.c = std::min(0.49 * alpha_target, 0.49 * sys.c);
  const auto dirs = probe_directions(sys);
  kp.eps = std::numeric_limits<double>::infinity();
  for (Vec2 d : dirs) {
    double v = seg_d(sys, consts, d, kp.c);
    kp.eps = std::min(kp.eps, v);
    kp.d_c = std::max(kp.d_c, v);
  }
  kp.delta_prime = kp.eps;
  kp.delta = kp.delta_prime / 2;
  kp.gamma = 0.49 * kp.delta;
  kp.beta = 0.33 * kp.gamma;
  int k_a = 0;
  while (4.0 * std::pow(consts.lambda, -k_a) * kp.d_c > kp.beta) ++k_a;
  int k_b = select_k((1 + kp.delta) * (1 + kp.delta) * 4.0, 1.0 / consts.lambda, kp.beta);
  kp.k0 = std::max(k_a, k_b);
  kp.k = kp.k0;
  // largest length whose segments all have D <= delta/2
  kp.return_radius = kp.c;
  for (Vec2 d : dirs) {
    double lo = -60.0, hi = std::log10(kp.return_radius);
    if (seg_d(sys, consts, d, std::pow(10.0, hi)) <= kp.delta / 2) continue;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      (seg_d(sys, consts, d, std::pow(10.0, mid)) <= kp.delta / 2 ? lo : hi) = mid;
    }
    kp.return_radius = std::pow(10.0, lo);
  }
  return kp;
}

long rational_period(const SystemModel& sys, const Point& p) {
  if (!p.q.valid() || !sys.linear()) return 0;
  const std::int64_t N = p.q.den;
  auto md = [N](std::int64_t v) { return ((v % N) + N) % N; };
  const std::int64_t u0 = md(p.q.nx), v0 = md(p.q.ny);
  std::int64_t u = u0, v = v0;
  const bool quotient = sys.kind == ModelKind::sphere_pa;
  for (long n = 1;; ++n) {
    std::int64_t nu = md(sys.m[0] * u + sys.m[1] * v);
    std::int64_t nv = md(sys.m[2] * u + sys.m[3] * v);
    u = nu;
    v = nv;
    if (u == u0 && v == v0) return n;
    if (quotient && u == md(-u0) && v == md(-v0)) return n;
  }
}

ReturnResult find_return(const SystemModel& sys, const Point& p, double bound, long k_min,
                         long search_budget, int max_den) {
  if (!sys.linear())
    throw CwError(ErrorKind::unsupported, "find_return: rational returns need a linear model");
  if (k_min < 1) k_min = 1;
  ReturnResult best;
  best.dist = std::numeric_limits<double>::infinity();
  long checked = 0;
  for (int N = 1; N <= max_den && checked < search_budget; ++N) {
    const std::int64_t i0 = std::int64_t(std::floor(p.c.x * N));
    const std::int64_t j0 = std::int64_t(std::floor(p.c.y * N));
    for (std::int64_t di = 0; di <= 1; ++di)
      for (std::int64_t dj = 0; dj <= 1; ++dj) {
        if (++checked > search_budget) break;
        Point y = rational_point(sys, i0 + di, j0 + dj, N);
        double d = distance(sys, y, p);
        if (d < bound && d < best.dist) {
          best.dist = d;
          best.y = y;
        }
      }
  }
  best.checked = checked;
  if (!std::isfinite(best.dist)) {
    std::ostringstream os;
    os << "find_return: no rational point with denominator <= " << max_den << " within "
       << bound << " of (" << p.c.x << ", " << p.c.y << ") after " << checked << " candidates";
    throw CwError(ErrorKind::search_failure, os.str());
  }
  best.period = rational_period(sys, best.y);
  best.k = best.period * ((k_min + best.period - 1) / best.period);
  return best;
}

PeriodicCheck verify_periodic(const SystemModel& sys, const Point& q, long k, double tol) {
  PeriodicCheck r;
  r.residual = distance(sys, q, iterate(with_horizon(sys, k), q, k));
  r.ok = r.residual < tol;
  return r;
}

KatokRun katok_iterate(const SystemModel& sys, const Point& y0, long k, const KatokParams& params,
                       const MetricConstants& consts, int max_steps, double tol) {
  if (!sys.linear()) throw CwError(ErrorKind::unsupported, "katok: model is not cw-hyperbolic");
  if (k < 1) throw CwError(ErrorKind::domain, "katok: k must be >= 1");
  const SystemModel sk = with_horizon(sys, k);
  const double arc = sys.c / 2;
  const double rate = (1 + params.delta) * (1 + params.delta) * 4.0 * std::pow(consts.lambda, -double(k));
  KatokRun run;
  auto envelope = [&](int n) { return std::pow(rate, n) * params.d_c; };
  auto record = [&](KatokStep st, int n) {
    st.envelope = envelope(n);
    if (st.d_f > st.envelope * (1 + 1e-12) && run.envelope_ok) {
      run.envelope_ok = false;
      std::ostringstream os;
      os.precision(17);
      os << "step " << n << ": D(F) = " << st.d_f << " > envelope " << st.envelope
         << " at y = (" << st.y.c.x << ", " << st.y.c.y << "), k = " << k;
      run.counterexample = os.str();
    }
    run.steps.push_back(st);
  };

  Point gy = iterate(sk, y0, k);
  double res0 = distance(sys, y0, gy);
  if (res0 <= tol || (y0.q.valid() && res0 == 0.0)) {
    KatokStep st{y0, res0, 0.0};
    record(st, 0);
    run.q = y0;
    run.converged = true;
    return run;
  }
  if (k > kFloatMaxK)
    throw CwError(ErrorKind::unsupported,
                  "katok: floating rectangle iteration needs k <= 16 unless y is k-periodic");

  // z on C^s(y) ∩ C^u(f^k y), choosing the branch with least D(F)
  auto rectangle = [&](const Point& y, Point& z, double& dF, int& branches) {
    Point g = iterate(sk, y, k);
    auto zs = intersect(local_arc(sys, g, ArcKind::unstable, arc, 2),
                        local_arc(sys, y, ArcKind::stable, arc, 2));
    if (zs.empty()) throw CwError(ErrorKind::model_fault, "katok: empty rectangle corner");
    branches = int(zs.size());
    dF = std::numeric_limits<double>::infinity();
    for (const Point& c : zs) {
      double v = d_metric(sys, stable_piece(sys, y, c), consts, 0).value;
      if (v < dF) {
        dF = v;
        z = c;
      }
    }
    return g;
  };

  Point y = y0;
  int cauchy = 0;
  for (int n = 0; n < max_steps; ++n) {
    Point z;
    double dF;
    int branches;
    Point g = rectangle(y, z, dF, branches);
    KatokStep st{y, distance(sys, y, g), dF};
    st.branches = branches;
    record(st, n);
    Point gz = iterate(sk, z, -k);
    auto next = intersect(local_arc(sys, g, ArcKind::unstable, arc, 2),
                          local_arc(sys, gz, ArcKind::stable, arc, 2));
    if (next.empty()) throw CwError(ErrorKind::model_fault, "katok: empty transport");
    Point best = next.front();
    if (next.size() > 1) {
      double bd = std::numeric_limits<double>::infinity();
      for (const Point& c : next) {
        Point zz;
        double d;
        int b;
        rectangle(c, zz, d, b);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
    }
    double step = distance(sys, y, best);
    y = best;
    cauchy = step < tol ? cauchy + 1 : 0;
    if (cauchy >= 3) {
      run.converged = true;
      break;
    }
  }
  run.q = y;
  return run;
}

PeriodicRun find_periodic_near(const SystemModel& sys, const Point& p, const KatokParams& params,
                               const MetricConstants& consts, long search_budget) {
  PeriodicRun run;
  run.params = params;
  try {
    run.ret = find_return(sys, p, params.return_radius, params.k0, search_budget);
  } catch (const CwError& e) {
    if (e.kind() != ErrorKind::search_failure) throw;
    run.widened = true;
    run.ret = find_return(sys, p, params.alpha_target / 4, params.k0, search_budget);
  }
  run.katok = katok_iterate(sys, run.ret.y, run.ret.k, params, consts);
  run.q = run.katok.q;
  run.residual = verify_periodic(sys, run.q, run.ret.k, 1e-9).residual;
  run.dist_to_p = distance(sys, run.q, p);
  run.ok = run.katok.converged && run.residual < 1e-9 && run.dist_to_p < params.alpha_target;
  return run;
}

std::pair<Rational, double> nearest_rational(const Point& q, int max_den) {
  Rational best;
  double bd = std::numeric_limits<double>::infinity();
  const bool quotient = q.chart == Chart::sphere_quotient;
  for (int N = 1; N <= max_den; ++N) {
    for (int s : {1, -1}) {
      if (s < 0 && !quotient) continue;
      Vec2 v = double(s) * q.c;
      std::int64_t i = std::int64_t(std::llround(v.x * N)), j = std::int64_t(std::llround(v.y * N));
      double d = wrap_dist(v, Vec2{double(i) / N, double(j) / N});
      if (d < bd) {
        bd = d;
        best = Rational{N, ((i % N) + N) % N, ((j % N) + N) % N};
      }
    }
  }
  return {best, bd};
}

}  // namespace cwdyn
