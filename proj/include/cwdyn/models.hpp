#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cwdyn/geometry.hpp"

namespace cwdyn {

enum class ModelKind { cat_map, sphere_pa, north_south };
enum class ArcKind { stable, unstable };

const char* model_name(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

struct SystemModel {
  ModelKind kind = ModelKind::cat_map;
  std::array<std::int64_t, 4> m{2, 1, 1, 1};
  std::array<std::int64_t, 4> minv{1, -1, -1, 2};
  double c = 0.25;
  int resolution = 64;
  int horizon = 60;
  double ns_a = 0.5;  // north-south Mobius parameter

  // eigen data of m (linear models)
  double mu_u = 0.0;  // expanding eigenvalue (signed)
  double mu_s = 0.0;  // contracting eigenvalue (signed)
  Vec2 e_u;
  Vec2 e_s;

  Chart chart() const;
  bool linear() const { return kind != ModelKind::north_south; }
  double expansion() const { return std::fabs(mu_u); }
};

SystemModel make_model(ModelKind kind, std::array<std::int64_t, 4> m = {2, 1, 1, 1},
                       double c = 0.25);

// Build a point in the model's chart, reduced to canonical form.
Point make_point(const SystemModel& sys, double x, double y);
// Exact rational point nx/den, ny/den.
Point rational_point(const SystemModel& sys, std::int64_t nx, std::int64_t ny, std::int64_t den);

Point iterate(const SystemModel& sys, const Point& x, long n);
double distance(const SystemModel& sys, const Point& a, const Point& b);
// Chart-only distance (no model check).
double chart_distance(const Point& a, const Point& b);

// M^n v on R^2 (linear models only, no reduction)
Vec2 apply_linear(const SystemModel& sys, Vec2 v, long n);

// lifting helpers for torus / sphere-quotient charts
Vec2 nearest_lift(Chart chart, Vec2 v, Vec2 ref);
Point project(const SystemModel& sys, Vec2 lifted);
Point project_chart(Chart chart, Vec2 lifted);
std::vector<Vec2> lift_polyline(const std::vector<Point>& pts);
// edge vectors computed from consecutive vertices only (slice-independent)
std::vector<Vec2> lifted_steps(const std::vector<Point>& pts);
// carried lift when present, otherwise derived
std::vector<Vec2> lift_of(const MarkedContinuum& C);
std::vector<Vec2> steps_of(const MarkedContinuum& C);

// one-prong points of the sphere quotient (canonical reps)
std::vector<Point> sphere_spines(const SystemModel& sys);

MarkedContinuum local_arc(const SystemModel& sys, const Point& x, ArcKind kind, double eps,
                          int resolution);
bool is_spine(const SystemModel& sys, const Point& x, double eps, double tol);

}  // namespace cwdyn
