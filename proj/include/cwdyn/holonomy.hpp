#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cwdyn/cwmetric.hpp"

namespace cwdyn {

struct HolonomyParams {
  double eps = 0.125;
  double delta = 0.0625;
  double tol = kDefaultTol;
};

// largest r (bisection) with C^s_eps(x) and C^u_eps(y) meeting for all sampled d(x,y) <= r
double product_structure_radius(const SystemModel& sys, double eps, int grid = 4,
                                int directions = 16);
// eps = c/2, delta = radius/2
HolonomyParams holonomy_params(const SystemModel& sys);

// stable: C^u_eps(z) ∩ C^s_eps(y) with z on C^s_delta(x); unstable is the dual
std::vector<Point> holonomy(const SystemModel& sys, const Point& x, const Point& y, const Point& z,
                            ArcKind kind, const HolonomyParams& params);
// linear solve in the eigenbasis, nearest lift of y to z
Point closed_form_holonomy(const SystemModel& sys, const Point& y, const Point& z, ArcKind kind);

struct HolonomyRectangle {
  MarkedContinuum C;          // stable, p to q
  MarkedContinuum Cprime;     // unstable, p to p*
  MarkedContinuum Cstar;      // stable, p* to q*
  MarkedContinuum Cstarstar;  // unstable, q to q*
  std::array<Point, 4> corners;  // p, q, p*, q*
  double dC = 0, dCprime = 0, dCstar = 0, dCstarstar = 0;
  int branches = 0;
  int chosen = 0;
  std::vector<std::array<double, 2>> branch_d;  // D(C*), D(C**) per q* branch
};

struct RectangleResult {
  bool ok = false;
  HolonomyRectangle rect;
  std::string obstruction;
};

RectangleResult build_rectangle(const SystemModel& sys, const MarkedContinuum& C,
                                const Point& pstar, const MarkedContinuum& Cprime,
                                const HolonomyParams& params, const MetricConstants& consts,
                                int depth = 1);

struct ProbeOptions {
  double log10_min = -60.0;  // side lengths are log-uniform in this decade range
  double log10_max = -2.0;
  double chart_floor = 1e-7;  // below this, rectangles are built in eigen-coordinates
  int depth = 1;
  std::uint64_t seed = 1;
};

struct ProbeRow {
  double gamma = 0;
  long samples = 0;
  double max_dev_stable = 0;    // |D(C*)/D(C) - 1|, worst branch
  double max_dev_unstable = 0;  // |D(C**)/D(C') - 1|
  double best_branch_dev = 0;
};

struct ProbeReport {
  std::vector<ProbeRow> rows;
  long samples = 0;
  long obstructions = 0;
  long multi_branch = 0;
  long monotone_violations = 0;
};

ProbeReport pseudo_isometry_probe(const SystemModel& sys, long sample_budget,
                                  const std::vector<double>& gamma_grid,
                                  const HolonomyParams& params, const MetricConstants& consts,
                                  const ProbeOptions& opt = {});

struct IsometryReport {
  long samples = 0;
  long successes = 0;
  long multi_branch = 0;
  double max_best_dev = 0;
  double success_rate() const { return samples ? double(successes) / double(samples) : 1.0; }
};

IsometryReport isometry_check(const SystemModel& sys, long sample_budget,
                              const HolonomyParams& params, const MetricConstants& consts,
                              double rel_tol = 1e-6, std::uint64_t seed = 1, int depth = 1);

}  // namespace cwdyn
