#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uabsim/rng.hpp"

namespace uabsim {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point& a, const Point& b) {
    return a.x == b.x && a.y == b.y;
  }
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Street topology as a set of node positions and directed polyline edges.
struct StreetGraph {
  std::vector<Point> nodes;
  std::vector<std::pair<int, int>> edges;

  bool empty() const { return edges.empty(); }
};

// Static description of one service area: bounds, streets, MBS site,
// ground-user population.
struct ServiceArea {
  int id = 0;
  double length = 1500.0;  // extent along x, meters
  double width = 700.0;    // extent along y, meters
  StreetGraph street_graph;
  Point mbs_position;
  int gue_count = 0;

  bool contains(const Point& p) const {
    return p.x >= 0.0 && p.x <= length && p.y >= 0.0 && p.y <= width;
  }

  void validate() const {
    for (const auto& n : street_graph.nodes) {
      if (!contains(n)) throw std::invalid_argument("street node out of area bounds");
    }
    for (const auto& [a, b] : street_graph.edges) {
      if (a < 0 || b < 0 || a >= static_cast<int>(street_graph.nodes.size()) ||
          b >= static_cast<int>(street_graph.nodes.size())) {
        throw std::invalid_argument("edge references missing node");
      }
    }
    if (!contains(mbs_position)) throw std::invalid_argument("MBS out of area bounds");
    if (!street_graph.empty() && !weakly_connected()) {
      throw std::invalid_argument("street graph is not weakly connected");
    }
  }

  bool weakly_connected() const {
    const int n = static_cast<int>(street_graph.nodes.size());
    if (n == 0) return true;
    std::vector<std::vector<int>> adj(n);
    for (const auto& [a, b] : street_graph.edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          q.push(w);
        }
      }
    }
    return reached == n;
  }
};

// A task is one (service area, fleet takeoff tuple) pair.
struct Task {
  int area_id = 0;
  std::vector<Point> takeoff;
};

// Per-timestep ground-user positions, laid out as [t * n_users + g].
struct MobilityTrace {
  int horizon = 0;
  int n_users = 0;
  std::vector<Point> positions;

  const Point& at(int t, int g) const { return positions[static_cast<size_t>(t) * n_users + g]; }
  Point& at(int t, int g) { return positions[static_cast<size_t>(t) * n_users + g]; }

  friend bool operator==(const MobilityTrace& a, const MobilityTrace& b) {
    return a.horizon == b.horizon && a.n_users == b.n_users && a.positions == b.positions;
  }
};

namespace detail {

inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  double s = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  s = std::clamp(s, 0.0, 1.0);
  return distance(p, {a.x + s * dx, a.y + s * dy});
}

inline std::vector<std::vector<std::pair<int, double>>> undirected_adjacency(
    const StreetGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(g.nodes.size());
  for (const auto& [a, b] : g.edges) {
    const double d = distance(g.nodes[a], g.nodes[b]);
    adj[a].emplace_back(b, d);
    adj[b].emplace_back(a, d);
  }
  return adj;
}

// Dijkstra path as a node sequence from `src` to `dst`.
inline std::vector<int> shortest_path(
    const std::vector<std::vector<std::pair<int, double>>>& adj, int src, int dst) {
  const int n = static_cast<int>(adj.size());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> prev(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == dst) break;
    for (auto [w, len] : adj[v]) {
      if (dist[v] + len < dist[w]) {
        dist[w] = dist[v] + len;
        prev[w] = v;
        pq.emplace(dist[w], w);
      }
    }
  }
  std::vector<int> path;
  for (int v = dst; v != -1; v = prev[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  if (path.empty() || path.front() != src) return {src};  // unreachable: stay put
  return path;
}

}  // namespace detail

// Street-constrained random-waypoint mobility: each user walks shortest
// paths between uniformly sampled graph nodes at a per-leg speed drawn in
// (0, v_gue_max].
inline MobilityTrace generate_trace(const ServiceArea& area, std::uint64_t seed,
                                    int horizon, double v_gue_max,
                                    double delta_t = 10.0) {
  if (area.street_graph.empty()) throw std::invalid_argument("degenerate scenario");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  area.validate();

  const auto adj = detail::undirected_adjacency(area.street_graph);
  const auto& nodes = area.street_graph.nodes;
  MobilityTrace trace;
  trace.horizon = horizon;
  trace.n_users = area.gue_count;
  trace.positions.resize(static_cast<size_t>(horizon) * area.gue_count);

  for (int g = 0; g < area.gue_count; ++g) {
    Rng rng(mix_seed(seed, 0x5ce0u + static_cast<std::uint64_t>(g)));
    // start on a random edge
    const auto& [ea, eb] =
        area.street_graph.edges[rng.uniform_int(area.street_graph.edges.size())];
    const double s0 = rng.uniform();
    Point pos{nodes[ea].x + s0 * (nodes[eb].x - nodes[ea].x),
              nodes[ea].y + s0 * (nodes[eb].y - nodes[ea].y)};
    int anchor = eb;  // next node on the current leg
    std::vector<int> plan{anchor};
    size_t plan_idx = 0;
    double speed = rng.uniform(0.3, 1.0) * v_gue_max;

    for (int t = 0; t < horizon; ++t) {
      trace.at(t, g) = pos;
      double budget = speed * delta_t;
      while (budget > 1e-9) {
        const Point target = nodes[plan[plan_idx]];
        const double d = distance(pos, target);
        if (d > budget) {
          pos.x += (target.x - pos.x) / d * budget;
          pos.y += (target.y - pos.y) / d * budget;
          budget = 0.0;
        } else {
          pos = target;
          budget -= d;
          if (plan_idx + 1 < plan.size()) {
            ++plan_idx;
          } else {
            // arrived: sample a new waypoint and re-plan
            const int here = plan[plan_idx];
            int waypoint = static_cast<int>(rng.uniform_int(nodes.size()));
            plan = detail::shortest_path(adj, here, waypoint);
            plan_idx = plan.size() > 1 ? 1 : 0;
            speed = rng.uniform(0.3, 1.0) * v_gue_max;
            if (plan.size() == 1) break;  // isolated or same node: hold position
          }
        }
      }
    }
  }
  return trace;
}

inline void validate_trace(const MobilityTrace& trace, const ServiceArea& area,
                           double v_gue_max, double delta_t = 10.0) {
  for (int t = 0; t < trace.horizon; ++t) {
    for (int g = 0; g < trace.n_users; ++g) {
      const Point& p = trace.at(t, g);
      if (!area.contains(p)) throw std::invalid_argument("trace position out of bounds");
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [a, b] : area.street_graph.edges) {
        best = std::min(best, detail::point_segment_distance(
                                  p, area.street_graph.nodes[a],
                                  area.street_graph.nodes[b]));
      }
      if (best > 1.0) throw std::invalid_argument("trace position off the street graph");
      if (t > 0 && distance(trace.at(t - 1, g), p) > v_gue_max * delta_t + 1e-6) {
        throw std::invalid_argument("trace violates the speed limit");
      }
    }
  }
}

// Trace file rows: `t,gue_id,x,y`.
inline void save_trace(const MobilityTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
  char buf[96];
  for (int t = 0; t < trace.horizon; ++t) {
    for (int g = 0; g < trace.n_users; ++g) {
      const Point& p = trace.at(t, g);
      std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f\n", t, g, p.x, p.y);
      out << buf;
    }
  }
}

inline MobilityTrace load_trace(const std::string& path, const ServiceArea& area) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  struct Row {
    int t, g;
    Point p;
  };
  std::vector<Row> rows;
  int max_t = -1, max_g = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    int t, g;
    double x, y;
    char extra;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf %c", &t, &g, &x, &y, &extra) != 4 ||
        t < 0 || g < 0) {
      throw std::runtime_error("trace parse error at row " + std::to_string(line_no));
    }
    if (!area.contains({x, y})) {
      throw std::runtime_error("trace coordinate out of bounds at row " +
                               std::to_string(line_no));
    }
    rows.push_back({t, g, {x, y}});
    max_t = std::max(max_t, t);
    max_g = std::max(max_g, g);
  }
  if (rows.empty()) throw std::runtime_error("empty trace file: " + path);
  MobilityTrace trace;
  trace.horizon = max_t + 1;
  trace.n_users = max_g + 1;
  trace.positions.assign(static_cast<size_t>(trace.horizon) * trace.n_users, Point{});
  std::vector<char> filled(trace.positions.size(), 0);
  for (const auto& r : rows) {
    const size_t idx = static_cast<size_t>(r.t) * trace.n_users + r.g;
    trace.positions[idx] = r.p;
    filled[idx] = 1;
  }
  for (size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i]) throw std::runtime_error("trace file has missing (t, gue) entries");
  }
  return trace;
}

// Cartesian product of areas and takeoff tuples.
inline std::vector<Task> enumerate_tasks(const std::vector<ServiceArea>& areas,
                                         const std::vector<std::vector<Point>>& takeoff_sets) {
  std::vector<Task> tasks;
  for (const auto& area : areas) {
    for (const auto& set : takeoff_sets) {
      for (const auto& p : set) {
        if (!area.contains(p)) {
          throw std::invalid_argument("takeoff outside bounds for area " +
                                      std::to_string(area.id));
        }
      }
      tasks.push_back({area.id, set});
    }
  }
  return tasks;
}

// Synthetic street templates. Grid: rows x cols Manhattan lattice with an
// interior margin. Ring: octagonal loop with spokes to a central crossing.
inline ServiceArea make_grid_area(int id, double length, double width, int gue_count,
                                  int rows = 4, int cols = 7, double margin = 50.0) {
  ServiceArea area;
  area.id = id;
  area.length = length;
  area.width = width;
  area.gue_count = gue_count;
  area.mbs_position = {length / 2.0, width / 2.0};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      area.street_graph.nodes.push_back(
          {margin + c * (length - 2 * margin) / (cols - 1),
           margin + r * (width - 2 * margin) / (rows - 1)});
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) area.street_graph.edges.emplace_back(v, v + 1);
      if (r + 1 < rows) area.street_graph.edges.emplace_back(v, v + cols);
    }
  }
  return area;
}

inline ServiceArea make_ring_area(int id, double length, double width, int gue_count,
                                  double margin = 80.0) {
  ServiceArea area;
  area.id = id;
  area.length = length;
  area.width = width;
  area.gue_count = gue_count;
  area.mbs_position = {length / 2.0, width / 2.0};
  const double cx = length / 2.0, cy = width / 2.0;
  const double rx = length / 2.0 - margin, ry = width / 2.0 - margin;
  constexpr int kRimNodes = 8;
  for (int i = 0; i < kRimNodes; ++i) {
    const double ang = 2.0 * std::numbers::pi * i / kRimNodes;
    area.street_graph.nodes.push_back({cx + rx * std::cos(ang), cy + ry * std::sin(ang)});
  }
  area.street_graph.nodes.push_back({cx, cy});  // central crossing
  for (int i = 0; i < kRimNodes; ++i) {
    area.street_graph.edges.emplace_back(i, (i + 1) % kRimNodes);
    if (i % 2 == 0) area.street_graph.edges.emplace_back(i, kRimNodes);
  }
  return area;
}

// Area factory keyed by template id: even ids grid, odd ids ring.
inline ServiceArea make_area(int id, double length, double width, int gue_count) {
  return id % 2 == 0 ? make_grid_area(id, length, width, gue_count)
                     : make_ring_area(id, length, width, gue_count);
}

}  // namespace uabsim
