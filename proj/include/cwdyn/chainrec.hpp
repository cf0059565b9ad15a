#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cwdyn/continua.hpp"

namespace cwdyn {

// a map on the unit-square chart, discretized into res x res cells
struct GridSystem {
  std::string name;
  Chart chart = Chart::torus;
  std::function<Vec2(Vec2)> map;
  double diagonal_factor = 1.4142135623730951;  // cell diagonal = factor / res
};

GridSystem grid_system(const SystemModel& sys);
// x: attracting fixed points at 0.2 and 0.8, repelling at 0.5; y contracts to 0.5
GridSystem synthetic_system();
GridSystem identity_system();

enum class Role { attractor, repeller, neither };
const char* role_name(Role r);

enum class Verdict { transitive_candidate, not_transitive };
const char* verdict_name(Verdict v);

struct ChainClassGraph {
  std::string system;
  Chart chart = Chart::torus;
  int grid_resolution = 0;
  double eps = 0.0;
  double diagonal = 0.0;
  std::vector<std::uint32_t> cells;     // node -> cell id (j * res + i)
  std::vector<std::uint32_t> offsets;   // CSR
  std::vector<std::uint32_t> targets;
  std::vector<char> strict;             // per edge: d(f(center u), center v) <= eps
  std::vector<int> scc_labels;          // node -> class id, -1 if not chain recurrent
  std::vector<std::pair<int, int>> class_order;  // (i, j): C_i < C_j
  std::vector<Role> roles;

  std::size_t node_count() const { return cells.size(); }
  std::size_t edge_count() const { return targets.size(); }
  Vec2 center(std::size_t node) const;
};

ChainClassGraph build_graph(const GridSystem& gs, int grid_resolution, double eps);
ChainClassGraph build_graph(const SystemModel& sys, int grid_resolution, double eps);

struct Partition {
  std::vector<int> labels;                  // node -> class id or -1
  std::vector<std::vector<std::uint32_t>> classes;  // sorted nodes, ordered by first node
};

// strongly connected components holding a slack-free cycle (iterative Tarjan)
Partition chain_classes(const ChainClassGraph& g);

struct OrderResult {
  std::vector<std::pair<int, int>> order;
  std::vector<Role> roles;
};
OrderResult class_order(const ChainClassGraph& g, const Partition& part);

Verdict transitivity_verdict(const ChainClassGraph& g, const Partition& part);

// edges leaving a class straight into a different class
long invariance_violations(const ChainClassGraph& g, const Partition& part);

// classes, order and roles stored into g
Partition analyze(ChainClassGraph& g);

struct ChainTransport {
  std::vector<Point> chain;  // q_0 .. q_k along f^{2n}(C^u_eps(y))
  double max_gap = 0.0;
  int endpoint_class = -1;
};
// cat map only
ChainTransport chain_transport(const SystemModel& sys, const Point& y, double eps, int n,
                               const ChainClassGraph& g, const Partition& part);

}  // namespace cwdyn
