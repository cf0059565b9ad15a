#include "cwdyn/cwmetric.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <random>

#include "cwdyn/kernels.hpp"

namespace cwdyn {

namespace {

constexpr int kBig = 1 << 28;

double sq(Vec2 v) { return v.x * v.x + v.y * v.y; }

Vec2 mat_apply(const std::array<std::int64_t, 4>& m, Vec2 v) {
  return {double(m[0]) * v.x + double(m[1]) * v.y, double(m[2]) * v.x + double(m[3]) * v.y};
}

// eigen-coordinates of d; components below the representation resolution are zero
std::pair<double, double> eigen_split(const SystemModel& sys, Vec2 d, double abs_snap) {
  const double det = sys.e_u.x * sys.e_s.y - sys.e_s.x * sys.e_u.y;
  double a = (d.x * sys.e_s.y - sys.e_s.x * d.y) / det;
  double b = (sys.e_u.x * d.y - d.x * sys.e_u.y) / det;
  const double kSnap = std::max(abs_snap, 1e-15 * std::sqrt(sq(d)));
  if (std::fabs(a) <= kSnap) a = 0.0;
  if (std::fabs(b) <= kSnap) b = 0.0;
  return {a, b};
}

// {n : |M^n d| <= thr} for d with eigen-coordinates e, as an interval; empty is {kBig, -kBig}
std::pair<int, int> pair_window(const SystemModel& sys, Vec2 e, double thr, int H) {
  const double t2 = thr * thr;
  double a = e.x, b = e.y;
  const double kSnap = 1e-15 * std::sqrt(a * a + b * b);
  if (std::fabs(a) <= kSnap) a = 0.0;
  if (std::fabs(b) <= kSnap) b = 0.0;
  if (a == 0.0 && b == 0.0) return {-kBig, kBig};
  auto r2 = [&](int n) {
    Vec2 v = (a * std::pow(sys.mu_u, n)) * sys.e_u + (b * std::pow(sys.mu_s, n)) * sys.e_s;
    return sq(v);
  };
  double r0 = r2(0);
  int lo = kBig, hi = -kBig;
  if (r0 <= t2) lo = hi = 0;
  for (int dir : {1, -1}) {
    double prev = r0;
    for (int n = 1; n <= H + 1; ++n) {
      double r = r2(dir * n);
      if (r <= t2) {
        lo = std::min(lo, dir * n);
        hi = std::max(hi, dir * n);
        if (n == H + 1) {
          if (dir > 0) hi = kBig;
          else lo = -kBig;
        }
      } else if (r > prev) {
        break;
      }
      prev = r;
    }
  }
  return {lo, hi};
}

// minimal |n| with the lifted vertex diameter of M^n V above c
int exit_time(const SystemModel& sys, std::vector<Vec2> V, double c, int H) {
  const std::size_t n = V.size();
  std::vector<double> xs(n), ys(n);
  auto diam_after = [&](const std::vector<Vec2>& W) {
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = W[i].x;
      ys[i] = W[i].y;
    }
    return kernels::max_pair_dist(xs.data(), ys.data(), n);
  };
  if (diam_after(V) > c) return 0;
  std::vector<Vec2> fw = V, bw = V;
  for (int k = 1; k <= H; ++k) {
    for (auto& v : fw) v = mat_apply(sys.m, v);
    for (auto& v : bw) v = mat_apply(sys.minv, v);
    if (diam_after(fw) > c || diam_after(bw) > c) return k;
  }
  return -1;
}

}  // namespace

MetricConstants constants_from(double c, int m) {
  if (m < 1) throw CwError(ErrorKind::calibration, "m must be >= 1");
  MetricConstants k;
  k.c = c;
  k.m = m;
  k.alpha = std::pow(2.0, 1.0 / m);
  k.n0 = 2 * m + 1;
  k.k = std::pow(2.0, double(k.n0 - 2 * m) / m);
  k.lambda = std::pow(2.0, 1.0 / (double(m) * k.n0));
  k.xi = 1.0 / (4.0 * k.alpha * std::pow(k.lambda, k.n0 - 1));
  k.horizon = int(std::floor(12.0 * std::log(10.0) / std::log(k.lambda))) + 1;
  return k;
}

CalibrationResult calibrate_report(const SystemModel& sys, double c, int sample_budget,
                                   std::uint64_t seed, CalibrationMode mode) {
  if (!sys.linear())
    throw CwError(ErrorKind::calibration,
                  "calibrate: north-south is not cw-expansive; no m exists");
  if (!(c > 0.0 && c < 0.5)) throw CwError(ErrorKind::calibration, "calibrate: c out of range");
  const int H = 200;
  CalibrationResult res;
  auto fail = [] {
    throw CwError(ErrorKind::calibration, "calibrate: no m within the search horizon");
  };
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (Vec2 e : {sys.e_s, sys.e_u})
        for (double len : {0.51 * c, 0.75 * c, c}) {
          Vec2 x{i / 8.0, j / 8.0};
          int t = exit_time(sys, {x - (len / 2) * e, x + (len / 2) * e}, c, H);
          if (t < 0) fail();
          res.structured_m = std::max(res.structured_m, t);
          ++res.samples;
        }
  if (mode == CalibrationMode::full) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double pi = std::acos(-1.0);
    for (int s = 0; s < sample_budget; ++s) {
      Vec2 x{u01(rng), u01(rng)};
      double len = c / 2 + (c / 2) * (1.0 - u01(rng));  // (c/2, c]
      double th = pi * u01(rng);
      Vec2 dir{std::cos(th), std::sin(th)};
      std::vector<Vec2> V;
      if (s % 3 == 2) {
        double th2 = pi * u01(rng);
        Vec2 dir2{std::cos(th2), std::sin(th2)};
        V = {x + (0.5 * u01(rng)) * dir, x, x + (0.5 * u01(rng)) * dir2};
        double d = kernels::scalar::max_pair_dist(
            std::vector<double>{V[0].x, V[1].x, V[2].x}.data(),
            std::vector<double>{V[0].y, V[1].y, V[2].y}.data(), 3);
        if (d <= 0.0) continue;
        for (auto& v : V) v = x + (len / d) * (v - x);
      } else {
        V = {x - (len / 2) * dir, x + (len / 2) * dir};
      }
      int t = exit_time(sys, V, c, H);
      if (t < 0) fail();
      res.random_m = std::max(res.random_m, t);
      ++res.samples;
    }
  }
  int m = std::max(res.structured_m, res.random_m);
  res.consts = constants_from(c, std::max(m, 1));
  return res;
}

MetricConstants calibrate(const SystemModel& sys, double c, int sample_budget, std::uint64_t seed,
                          CalibrationMode mode) {
  return calibrate_report(sys, c, sample_budget, seed, mode).consts;
}

MetricEvaluator::MetricEvaluator(const SystemModel& sys, const MarkedContinuum& C,
                                 const MetricConstants& k, int depth)
    : sys_(&sys), k_(k) {
  if (!sys.linear()) throw CwError(ErrorKind::unsupported, "metric: model is not cw-expansive");
  if (C.vertices.empty()) throw CwError(ErrorKind::domain, "metric: empty continuum");
  if (depth < 0 || depth > 12) throw CwError(ErrorKind::domain, "metric: depth out of range");
  pow_alpha_.resize(std::size_t(k.horizon) + 2);
  for (std::size_t i = 0; i < pow_alpha_.size(); ++i) pow_alpha_[i] = std::pow(k.alpha, -double(i));

  const std::size_t V = C.size();
  if (V == 1) {
    degenerate_ = true;
    return;
  }
  const auto lifts = lift_of(C);
  const auto steps = steps_of(C);
  const std::size_t R = std::size_t(1) << depth;
  const double inv = 1.0 / double(R);
  M_ = (V - 1) * R + 1;
  std::size_t pa = C.mark_p * R, pb = C.mark_q * R;
  a_ = std::min(pa, pb);
  b_ = std::max(pa, pb);

  // edges are snapped once in eigen-coordinates, so sub-pieces keep their direction
  const double snap = C.micro.size() == V ? 0.0 : 1e-15;
  std::vector<Vec2> edge_eig(V - 1);
  for (std::size_t e = 0; e + 1 < V; ++e) {
    auto [a, b] = eigen_split(sys, steps[e], snap);
    edge_eig[e] = {a, b};
  }
  std::vector<Vec2> delta(M_ - 1), pos(M_);
  bool any = false;
  for (std::size_t r = 0; r + 1 < M_; ++r) {
    delta[r] = inv * edge_eig[r / R];
    any = any || sq(delta[r]) > 0.0;
  }
  if (!any) {
    degenerate_ = true;
    return;
  }
  for (std::size_t r = 0; r < M_; ++r) {
    std::size_t e = std::min(r / R, V - 2);
    double t = double(r - e * R) * inv;
    pos[r] = t > 0.0 ? lifts[e] + t * steps[e] : lifts[e];
  }

  quotient_ = sys.kind == ModelKind::sphere_pa;
  const int H = k.horizon;
  lo_.assign(M_ * M_, kBig);
  hi_.assign(M_ * M_, -kBig);
  std::vector<int> hi2;
  if (quotient_) {
    lo2_.assign(M_ * M_, kBig);
    hi2.assign(M_ * M_, -kBig);
    mask_.assign(M_ * M_, 0);
  }
  for (std::size_t s = M_ - 1; s-- > 0;) {
    Vec2 d{0, 0};
    for (std::size_t t = s + 1; t < M_; ++t) {
      d = d + delta[t - 1];
      auto [pl, ph] = pair_window(sys, d, k.c, H);
      int l = pl, h = ph;
      if (t > s + 1) {
        l = std::max({l, lo_[at(s, t - 1)], lo_[at(s + 1, t)]});
        h = std::min({h, hi_[at(s, t - 1)], hi_[at(s + 1, t)]});
      }
      lo_[at(s, t)] = l;
      hi_[at(s, t)] = h;
      if (quotient_) {
        auto [ql, qh] = pair_window(sys, d, 2 * k.c, H);
        if (t > s + 1) {
          ql = std::max({ql, lo2_[at(s, t - 1)], lo2_[at(s + 1, t)]});
          qh = std::min({qh, hi2[at(s, t - 1)], hi2[at(s + 1, t)]});
        }
        lo2_[at(s, t)] = ql;
        hi2[at(s, t)] = qh;
      }
    }
  }

  lo_min_ = kBig;
  hi_max_ = -kBig;
  for (std::size_t s = 0; s < M_; ++s)
    for (std::size_t t = s + 1; t < M_; ++t) {
      int l = quotient_ ? lo2_[at(s, t)] : lo_[at(s, t)];
      int h = quotient_ ? hi2[at(s, t)] : hi_[at(s, t)];
      if (l <= h) {
        lo_min_ = std::min(lo_min_, std::max(l, -H));
        hi_max_ = std::max(hi_max_, std::min(h, H));
      }
    }
  if (!quotient_) return;

  // quotient: inside the 2c window but outside the c window, test vertex diameters
  int nmin = 0, nmax = 0;
  for (std::size_t s = 0; s < M_; ++s)
    for (std::size_t t = s + 1; t < M_; ++t) {
      int l2 = lo2_[at(s, t)], h2 = hi2[at(s, t)], l1 = lo_[at(s, t)], h1 = hi_[at(s, t)];
      if (l2 > h2 || l2 <= -kBig / 2 || h2 >= kBig / 2) continue;
      if (l1 > h1) {
        nmin = std::min(nmin, l2);
        nmax = std::max(nmax, h2);
      } else {
        if (l2 < l1) nmin = std::min(nmin, l2);
        if (h2 > h1) nmax = std::max(nmax, h2);
      }
    }
  const std::size_t P = M_ * M_;
  std::vector<Vec2> D(P), S(P);
  std::vector<double> diam(P, 0.0);
  auto init = [&] {
    for (std::size_t s = 0; s < M_; ++s) {
      Vec2 d{0, 0};
      for (std::size_t t = s + 1; t < M_; ++t) {
        d = d + delta[t - 1];
        D[at(s, t)] = d.x * sys.e_u + d.y * sys.e_s;
        Vec2 sum = pos[s] + pos[t];
        S[at(s, t)] = {mod1(sum.x), mod1(sum.y)};
      }
    }
  };
  auto evaluate = [&](int n) {
    for (std::size_t s = M_ - 1; s-- > 0;)
      for (std::size_t t = s + 1; t < M_; ++t) {
        const std::size_t id = at(s, t);
        double qd = std::min(norm(wrap_half(D[id])), norm(wrap_half(S[id])));
        if (t > s + 1) qd = std::max({qd, diam[at(s, t - 1)], diam[at(s + 1, t)]});
        diam[id] = qd;
        int l2 = lo2_[id], h2 = hi2[id];
        if (n < l2 || n > h2 || (n >= lo_[id] && n <= hi_[id])) continue;
        int bit = n - l2;
        if (bit < 64 && qd <= k.c) mask_[id] |= (std::uint64_t(1) << bit);
      }
  };
  auto advance = [&](const std::array<std::int64_t, 4>& m) {
    for (std::size_t s = 0; s < M_; ++s)
      for (std::size_t t = s + 1; t < M_; ++t) {
        const std::size_t id = at(s, t);
        D[id] = mat_apply(m, D[id]);
        Vec2 w = mat_apply(m, S[id]);
        S[id] = {mod1(w.x), mod1(w.y)};
      }
  };
  init();
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) advance(sys.m);
    evaluate(n);
  }
  init();
  for (int n = -1; n >= nmin; --n) {
    advance(sys.minv);
    evaluate(n);
  }
  for (std::size_t s = 0; s < M_; ++s)
    for (std::size_t t = s + 1; t < M_; ++t) {
      const std::size_t id = at(s, t);
      if (lo_[id] <= hi_[id]) {
        // mirror the c window into the mask range for uniform lookups
        for (int n = std::max(lo_[id], lo2_[id]); n <= hi_[id] && n - lo2_[id] < 64; ++n)
          mask_[id] |= (std::uint64_t(1) << (n - lo2_[id]));
      }
    }
}

bool MetricEvaluator::small_at(std::size_t s, std::size_t t, long n) const {
  const std::size_t id = at(s, t);
  if (n >= lo_[id] && n <= hi_[id]) return true;
  if (!quotient_) return false;
  long bit = n - lo2_[id];
  if (bit < 0 || bit >= 64) return false;
  return (mask_[id] >> bit) & 1u;
}

NValue MetricEvaluator::piece_n(std::size_t s, std::size_t t, long shift) const {
  NValue r;
  if (degenerate_ || s == t) {
    r.infinite = true;
    return r;
  }
  if (s > t) std::swap(s, t);
  const long H = k_.horizon;
  if (!quotient_) {
    const long lo = lo_[at(s, t)], hi = hi_[at(s, t)];
    if (shift < lo || shift > hi) return r;
    long n = std::min(shift - lo + 1, hi - shift + 1);
    if (n > H) {
      r.n = H;
      r.horizon = true;
    } else {
      r.n = n;
    }
    return r;
  }
  for (long k = 0; k <= H; ++k) {
    if (!small_at(s, t, shift + k) || !small_at(s, t, shift - k)) {
      r.n = k;
      return r;
    }
  }
  r.n = H;
  r.horizon = true;
  return r;
}

double MetricEvaluator::piece_rho(std::size_t s, std::size_t t, long shift) const {
  NValue n = piece_n(s, t, shift);
  if (n.infinite || n.horizon) return 0.0;
  return pow_alpha_[std::size_t(n.n)];
}

double MetricEvaluator::p(long shift) {
  if (degenerate_) return 0.0;
  if (shift < lo_min_ || shift > hi_max_) return 1.0;
  auto it = p_cache_.find(shift);
  if (it != p_cache_.end()) return it->second;
  const std::size_t last = M_ - 1;
  double best = piece_rho(0, last, shift);
  std::vector<double> F(M_, 1e300);
  const std::size_t first_end = std::max<std::size_t>(a_, 1);
  for (std::size_t t = first_end; t < last; ++t) {
    double v = piece_rho(0, t, shift);
    for (std::size_t s = first_end; s < t; ++s) v = std::min(v, F[s] + piece_rho(s, t, shift));
    F[t] = v;
  }
  for (std::size_t s = first_end; s <= b_ && s < last; ++s)
    best = std::min(best, F[s] + piece_rho(s, last, shift));
  p_cache_[shift] = best;
  return best;
}

double MetricEvaluator::d_prime(long shift) {
  if (degenerate_) return 0.0;
  auto it = dp_cache_.find(shift);
  if (it != dp_cache_.end()) return it->second;
  double best = p(shift);
  for (int j = 1; j <= k_.n0 - 1; ++j) {
    double lj = std::pow(k_.lambda, j);
    best = std::max(best, p(shift - j) / lj);
    best = std::max(best, p(shift + j) / lj);
  }
  dp_cache_[shift] = best;
  return best;
}

DResult MetricEvaluator::d(long shift) {
  DResult r;
  if (degenerate_) return r;
  double best = -1.0;
  const int H = k_.horizon;
  for (int k = 0; k <= H; ++k) {
    const double lk = std::pow(k_.lambda, k);
    for (int sgn : {-1, 1}) {
      if (k == 0 && sgn > 0) continue;
      double v = d_prime(shift + sgn * k) / lk;
      if (v > best) {
        best = v;
        r.achieved_index = sgn * k;
      }
    }
    if (1.0 / std::pow(k_.lambda, k + 1) <= best) {
      r.value = best;
      return r;
    }
  }
  r.value = best;
  r.tail_bound = std::pow(k_.lambda, -double(H));
  r.horizon_hit = true;
  return r;
}

NValue capital_n(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k) {
  return MetricEvaluator(sys, C, k, 0).whole_n(0);
}

double rho(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k) {
  return MetricEvaluator(sys, C, k, 0).piece_rho(0, C.size() - 1, 0);
}

double p_metric(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k,
                int depth) {
  return MetricEvaluator(sys, C, k, depth).p(0);
}

double d_prime(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k,
               int depth) {
  return MetricEvaluator(sys, C, k, depth).d_prime(0);
}

DResult d_metric(const SystemModel& sys, const MarkedContinuum& C, const MetricConstants& k,
                 int depth) {
  return MetricEvaluator(sys, C, k, depth).d(0);
}

}  // namespace cwdyn
