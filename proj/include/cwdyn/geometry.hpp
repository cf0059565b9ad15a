#pragma once
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cwdyn {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

// wrap each coordinate into [-0.5, 0.5]
inline Vec2 wrap_half(Vec2 v) { return {v.x - std::nearbyint(v.x), v.y - std::nearbyint(v.y)}; }

inline double mod1(double v) {
  double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}

enum class Chart { torus, sphere_quotient, sphere_geographic };

const char* chart_name(Chart c);

// Exact rational coordinates (nx/den, ny/den); den == 0 means absent.
struct Rational {
  std::int64_t den = 0;
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  bool valid() const { return den > 0; }
};

struct Point {
  Chart chart = Chart::torus;
  Vec2 c;
  Rational q;
};

struct MarkedContinuum {
  std::vector<Point> vertices;
  std::size_t mark_p = 0;
  std::size_t mark_q = 0;
  bool closed = false;
  // optional lifted coordinates (one per vertex); derived from vertices when empty
  std::vector<Vec2> lift;
  // optional exact vertex offsets from the first vertex, for arcs below chart resolution
  std::vector<Vec2> micro;

  bool singleton() const { return vertices.size() == 1; }
  std::size_t size() const { return vertices.size(); }
  Chart chart() const { return vertices.empty() ? Chart::torus : vertices.front().chart; }
  const Point& p() const { return vertices[mark_p]; }
  const Point& q() const { return vertices[mark_q]; }
};

enum class ErrorKind {
  horizon,
  calibration,
  chart_mismatch,
  budget,
  off_continuum,
  domain,
  model_fault,
  search_failure,
  config,
  indeterminate,
  unsupported
};

class CwError : public std::runtime_error {
 public:
  CwError(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cwdyn
