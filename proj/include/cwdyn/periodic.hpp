#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "cwdyn/holonomy.hpp"

namespace cwdyn {

// smallest k with r = a b^k < 1 and r / (1 - r) <= eps
int select_k(double a, double b, double eps);

struct KatokParams {
  double alpha_target = 1e-2;
  double c = 0.0;      // rectangle length scale, < alpha_target / 2
  double d_c = 0.0;    // largest D of a segment of length c
  double eps = 0.0;    // D(C) < eps forces diam(C) < c
  double delta_prime = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double return_radius = 0.0;  // diam <= radius forces D <= delta / 2
  int k0 = 0;
  int k = 0;
};

KatokParams katok_params(const SystemModel& sys, double alpha_target, const MetricConstants& consts);

struct ReturnResult {
  Point y;
  long k = 0;
  long period = 0;
  double dist = 0.0;
  long checked = 0;
};

// nearest rational point with denominator <= max_den inside the bound; k is a multiple of its period
ReturnResult find_return(const SystemModel& sys, const Point& p, double bound, long k_min,
                         long search_budget, int max_den = 200);

// exact period of a rational point (0 if p carries no rational tag)
long rational_period(const SystemModel& sys, const Point& p);

struct KatokStep {
  Point y;
  double residual = 0.0;  // d(y_n, f^k y_n)
  double d_f = 0.0;       // D(F_n)
  double envelope = 0.0;
  int branches = 1;
};

struct KatokRun {
  std::vector<KatokStep> steps;
  Point q;
  bool converged = false;
  bool envelope_ok = true;
  std::string counterexample;
};

KatokRun katok_iterate(const SystemModel& sys, const Point& y, long k, const KatokParams& params,
                       const MetricConstants& consts, int max_steps = 64, double tol = 1e-12);

struct PeriodicCheck {
  bool ok = false;
  double residual = 0.0;
};
PeriodicCheck verify_periodic(const SystemModel& sys, const Point& q, long k, double tol);

struct PeriodicRun {
  KatokParams params;
  ReturnResult ret;
  bool widened = false;
  KatokRun katok;
  Point q;
  double residual = 0.0;
  double dist_to_p = 0.0;
  bool ok = false;
};

// return search at delta/2, widened to alpha/4, then the rectangle iteration
PeriodicRun find_periodic_near(const SystemModel& sys, const Point& p, const KatokParams& params,
                               const MetricConstants& consts, long search_budget = 1 << 16);

// nearest rational point with denominator <= max_den, and its distance
std::pair<Rational, double> nearest_rational(const Point& q, int max_den);

}  // namespace cwdyn
