#include "cwdyn/chainrec.hpp"

#include <algorithm>
#include <cmath>

#include "cwdyn/kernels.hpp"

namespace cwdyn {

namespace {

constexpr double kPi = 3.14159265358979323846;

int wrap_index(long i, int res) { return int(((i % res) + res) % res); }

std::uint32_t mirror_cell(std::uint32_t cell, int res) {
  std::uint32_t i = cell % std::uint32_t(res), j = cell / std::uint32_t(res);
  return (std::uint32_t(res) - 1 - j) * std::uint32_t(res) + (std::uint32_t(res) - 1 - i);
}

double geo_angle(Vec2 a, Vec2 b) {
  Point pa{Chart::sphere_geographic, a, {}}, pb{Chart::sphere_geographic, b, {}};
  return chart_distance(pa, pb);
}

}  // namespace

const char* role_name(Role r) {
  switch (r) {
    case Role::attractor: return "attractor";
    case Role::repeller: return "repeller";
    case Role::neither: return "neither";
  }
  return "neither";
}

const char* verdict_name(Verdict v) {
  return v == Verdict::transitive_candidate ? "transitive-candidate" : "not-transitive";
}

GridSystem grid_system(const SystemModel& sys) {
  GridSystem gs;
  gs.name = model_name(sys.kind);
  gs.chart = sys.chart();
  if (sys.kind == ModelKind::north_south) gs.diagonal_factor = std::sqrt(5.0);
  gs.map = [sys](Vec2 c) { return iterate(sys, project(sys, c), 1).c; };
  return gs;
}

GridSystem synthetic_system() {
  GridSystem gs;
  gs.name = "synthetic";
  gs.map = [](Vec2 c) {
    double x = c.x - 2.0 * (c.x - 0.2) * (c.x - 0.5) * (c.x - 0.8);
    return Vec2{mod1(x), 0.5 + 0.5 * (c.y - 0.5)};
  };
  return gs;
}

GridSystem identity_system() {
  GridSystem gs;
  gs.name = "identity";
  gs.map = [](Vec2 c) { return c; };
  return gs;
}

Vec2 ChainClassGraph::center(std::size_t node) const {
  std::uint32_t cell = cells[node];
  return {(double(cell % std::uint32_t(grid_resolution)) + 0.5) / grid_resolution,
          (double(cell / std::uint32_t(grid_resolution)) + 0.5) / grid_resolution};
}

ChainClassGraph build_graph(const GridSystem& gs, int res, double eps) {
  if (res < 2 || res > 4096) throw CwError(ErrorKind::config, "build_graph: resolution out of range");
  ChainClassGraph g;
  g.system = gs.name;
  g.chart = gs.chart;
  g.grid_resolution = res;
  g.eps = eps;
  g.diagonal = gs.diagonal_factor / res;
  const double r = eps + g.diagonal;
  if (!(eps > 0.0) || r >= 0.25)
    throw CwError(ErrorKind::config, "build_graph: need eps > 0 and eps + cell diagonal < 0.25");
  const bool quotient = gs.chart == Chart::sphere_quotient;
  const std::uint32_t ncell = std::uint32_t(res) * std::uint32_t(res);
  std::vector<int> node_of(ncell, -1);
  for (std::uint32_t cell = 0; cell < ncell; ++cell) {
    if (quotient && mirror_cell(cell, res) < cell) continue;
    node_of[cell] = int(g.cells.size());
    g.cells.push_back(cell);
  }
  auto node_for = [&](std::uint32_t cell) {
    if (quotient) cell = std::min(cell, mirror_cell(cell, res));
    return std::uint32_t(node_of[cell]);
  };

  std::vector<double> xs, ys, ds;
  std::vector<std::uint32_t> cand, out;
  g.offsets.push_back(0);
  for (std::size_t u = 0; u < g.cells.size(); ++u) {
    const Vec2 f = gs.map(g.center(u));
    cand.clear();
    out.clear();
    const long j0 = long(std::floor((f.y - r) * res)), j1 = long(std::floor((f.y + r) * res));
    if (gs.chart == Chart::sphere_geographic) {
      const double lat_f = kPi * f.y - kPi / 2;
      const double h = std::pow(std::sin(kPi * r / 2), 2);
      for (long j = std::max(0L, j0); j <= std::min(long(res) - 1, j1); ++j) {
        const double cy = (j + 0.5) / res;
        const double cc = std::cos(lat_f) * std::cos(kPi * cy - kPi / 2);
        long i0 = 0, i1 = res - 1;
        if (cc > h) {
          double dx = std::asin(std::sqrt(h / cc)) / kPi + 1.0 / res;
          if (dx < 0.5) {
            i0 = long(std::floor((f.x - dx) * res));
            i1 = long(std::floor((f.x + dx) * res));
          }
        }
        for (long i = i0; i <= i1; ++i) {
          Vec2 c{(wrap_index(i, res) + 0.5) / res, cy};
          if (geo_angle(f, c) <= r) cand.push_back(std::uint32_t(j * res + wrap_index(i, res)));
        }
      }
    } else {
      const long i0 = long(std::floor((f.x - r) * res)), i1 = long(std::floor((f.x + r) * res));
      xs.clear();
      ys.clear();
      std::vector<std::uint32_t> ids;
      for (long j = j0; j <= j1; ++j)
        for (long i = i0; i <= i1; ++i) {
          int wi = wrap_index(i, res), wj = wrap_index(j, res);
          xs.push_back((wi + 0.5) / res);
          ys.push_back((wj + 0.5) / res);
          ids.push_back(std::uint32_t(wj * res + wi));
        }
      ds.resize(xs.size());
      kernels::torus_dist_to(xs.data(), ys.data(), xs.size(), f.x, f.y, ds.data());
      for (std::size_t k = 0; k < ids.size(); ++k)
        if (ds[k] <= r) cand.push_back(ids[k]);
    }
    for (std::uint32_t cell : cand) out.push_back(node_for(cell));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    g.targets.insert(g.targets.end(), out.begin(), out.end());
    for (std::uint32_t v : out) {
      Vec2 cv = g.center(v);
      double d = gs.chart == Chart::sphere_geographic ? geo_angle(f, cv)
                 : quotient ? std::min(norm(wrap_half(f - cv)), norm(wrap_half(f + cv)))
                            : norm(wrap_half(f - cv));
      g.strict.push_back(d <= eps ? 1 : 0);
    }
    g.offsets.push_back(std::uint32_t(g.targets.size()));
  }
  return g;
}

ChainClassGraph build_graph(const SystemModel& sys, int res, double eps) {
  return build_graph(grid_system(sys), res, eps);
}

namespace {

// Tarjan's algorithm without recursion; comp[v] numbered in completion order
std::vector<int> tarjan(const ChainClassGraph& g, bool strict_only, int& ncomp) {
  const std::size_t n = g.node_count();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<std::uint32_t> stack, edge_pos(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> call;
  int counter = 0;
  ncomp = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.push_back(root);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    edge_pos[root] = g.offsets[root];
    while (!call.empty()) {
      std::uint32_t v = call.back();
      if (edge_pos[v] < g.offsets[v + 1]) {
        const std::uint32_t e = edge_pos[v]++;
        if (strict_only && !g.strict[e]) continue;
        std::uint32_t w = g.targets[e];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          edge_pos[w] = g.offsets[w];
          call.push_back(w);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
      call.pop_back();
      if (!call.empty()) low[call.back()] = std::min(low[call.back()], low[v]);
    }
  }
  return comp;
}

}  // namespace

Partition chain_classes(const ChainClassGraph& g) {
  int ncomp = 0, nstrict = 0;
  std::vector<int> comp = tarjan(g, false, ncomp);
  std::vector<int> scomp = tarjan(g, true, nstrict);
  std::vector<int> ssize(static_cast<std::size_t>(nstrict), 0);
  for (int c : scomp) ++ssize[std::size_t(c)];
  // a component is a class when it holds a cycle of slack-free edges
  std::vector<char> certified(static_cast<std::size_t>(ncomp), 0);
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    bool cyc = ssize[std::size_t(scomp[v])] > 1;
    for (std::uint32_t e = g.offsets[v]; !cyc && e < g.offsets[v + 1]; ++e)
      cyc = g.strict[e] && g.targets[e] == v;
    if (cyc) certified[std::size_t(comp[v])] = 1;
  }
  std::vector<std::vector<std::uint32_t>> members(static_cast<std::size_t>(ncomp));
  for (std::uint32_t v = 0; v < g.node_count(); ++v) members[std::size_t(comp[v])].push_back(v);
  Partition p;
  p.labels.assign(g.node_count(), -1);
  for (int c = 0; c < ncomp; ++c)
    if (certified[std::size_t(c)]) p.classes.push_back(members[std::size_t(c)]);
  std::sort(p.classes.begin(), p.classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t c = 0; c < p.classes.size(); ++c)
    for (std::uint32_t v : p.classes[c]) p.labels[v] = int(c);
  return p;
}

OrderResult class_order(const ChainClassGraph& g, const Partition& part) {
  OrderResult r;
  const std::size_t nc = part.classes.size();
  std::vector<std::vector<char>> less(nc, std::vector<char>(nc, 0));
  std::vector<char> seen(g.node_count());
  std::vector<std::uint32_t> queue;
  for (std::size_t i = 0; i < nc; ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    queue.assign(part.classes[i].begin(), part.classes[i].end());
    for (std::uint32_t v : queue) seen[v] = 1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      std::uint32_t v = queue[h];
      for (std::uint32_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
        std::uint32_t w = g.targets[e];
        if (seen[w]) continue;
        seen[w] = 1;
        queue.push_back(w);
        int lw = part.labels[w];
        if (lw >= 0 && std::size_t(lw) != i) less[i][std::size_t(lw)] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < nc; ++i)
    for (std::size_t j = 0; j < nc; ++j) {
      if (!less[i][j]) continue;
      if (less[j][i])
        throw CwError(ErrorKind::indeterminate,
                      "class_order: cyclic order; discretization too coarse, refine the grid");
      r.order.emplace_back(int(i), int(j));
    }
  r.roles.assign(nc, Role::neither);
  if (nc >= 2) {
    for (std::size_t i = 0; i < nc; ++i) {
      bool above = false, below = false;
      for (std::size_t j = 0; j < nc; ++j) {
        above = above || less[i][j];
        below = below || less[j][i];
      }
      if (below && !above) r.roles[i] = Role::attractor;
      if (above && !below) r.roles[i] = Role::repeller;
    }
  }
  return r;
}

Verdict transitivity_verdict(const ChainClassGraph& g, const Partition& part) {
  if (part.classes.size() == 1 && part.classes[0].size() == g.node_count())
    return Verdict::transitive_candidate;
  return Verdict::not_transitive;
}

long invariance_violations(const ChainClassGraph& g, const Partition& part) {
  long bad = 0;
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    int lv = part.labels[v];
    if (lv < 0) continue;
    for (std::uint32_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
      int lw = part.labels[g.targets[e]];
      if (lw >= 0 && lw != lv) ++bad;
    }
  }
  return bad;
}

Partition analyze(ChainClassGraph& g) {
  Partition p = chain_classes(g);
  g.scc_labels = p.labels;
  OrderResult o = class_order(g, p);
  g.class_order = o.order;
  g.roles = o.roles;
  return p;
}

ChainTransport chain_transport(const SystemModel& sys, const Point& y, double eps, int n,
                               const ChainClassGraph& g, const Partition& part) {
  if (sys.kind != ModelKind::cat_map)
    throw CwError(ErrorKind::unsupported, "chain-transport: cat map only");
  ChainTransport t;
  MarkedContinuum arc = local_arc(sys, y, ArcKind::unstable, eps, 2);
  MarkedContinuum gamma = image(sys, arc, 2L * n, 1u << 20, eps);
  t.chain = gamma.vertices;
  for (std::size_t i = 1; i < t.chain.size(); ++i)
    t.max_gap = std::max(t.max_gap, chart_distance(t.chain[i - 1], t.chain[i]));
  const Vec2 e = t.chain.back().c;
  const int res = g.grid_resolution;
  std::uint32_t cell = std::uint32_t(std::min(res - 1, int(e.y * res)) * res +
                                     std::min(res - 1, int(e.x * res)));
  auto it = std::find(g.cells.begin(), g.cells.end(), cell);
  if (it != g.cells.end()) t.endpoint_class = part.labels[std::size_t(it - g.cells.begin())];
  return t;
}

}  // namespace cwdyn
