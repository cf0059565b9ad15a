#pragma once
#include <vector>

#include "cwdyn/models.hpp"

namespace cwdyn {

constexpr double kDefaultTol = 1e-9;

MarkedContinuum singleton(const Point& p);
MarkedContinuum polyline(std::vector<Point> pts, std::size_t mark_p, std::size_t mark_q);

double diameter(const MarkedContinuum& C);

// f^n(C); edges are subdivided until every image edge is shorter than step_bound
MarkedContinuum image(const SystemModel& sys, const MarkedContinuum& C, long n,
                      std::size_t vertex_budget = 1u << 16, double step_bound = 0.25);

std::vector<Point> intersect(const MarkedContinuum& A, const MarkedContinuum& B,
                             double tol = kDefaultTol);

MarkedContinuum subcontinuum(const MarkedContinuum& C, const Point& a, const Point& b,
                             double tol = kDefaultTol);

// position of the closest point of C to x: edge index and parameter in [0,1]
struct PolylinePos {
  std::size_t edge = 0;
  double t = 0.0;
  double dist = 0.0;
  Point point;
};
PolylinePos locate(const MarkedContinuum& C, const Point& x);

// symmetric vertex-to-polyline Hausdorff distance
double hausdorff(const MarkedContinuum& A, const MarkedContinuum& B);

}  // namespace cwdyn
