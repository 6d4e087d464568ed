#include "avf/graph.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace avf {

std::string_view to_string(Geometry g) {
  switch (g) {
    case Geometry::open_rect: return "open-rect";
    case Geometry::cylinder: return "cylinder";
    case Geometry::folded_cylinder: return "folded-cylinder";
    case Geometry::custom: return "custom";
  }
  return "custom";
}

Geometry parse_geometry(std::string_view name) {
  if (name == "open-rect" || name == "rect") return Geometry::open_rect;
  if (name == "cylinder") return Geometry::cylinder;
  if (name == "folded-cylinder") return Geometry::folded_cylinder;
  if (name == "custom") return Geometry::custom;
  throw GeometryError("unknown geometry '" + std::string(name) + "'");
}

// Collects per-site slot lists before freezing them into the CSR layout.
class GraphBuilder {
 public:
  explicit GraphBuilder(int sites) : per_site_(static_cast<std::size_t>(sites)) {}

  int add_edge(int u, int v) {
    const int e = static_cast<int>(edges_.size());
    edges_.emplace_back(u, v);
    return e;
  }
  void push_internal(int v, int e) {
    const auto [a, b] = edges_[e];
    per_site_[v].push_back({SlotKind::internal, a == v ? b : a, e, -1});
  }
  void push_boundary(int v) { per_site_[v].push_back({SlotKind::boundary, -1, -1, -1}); }
  void push_self_loop(int v) { per_site_[v].push_back({SlotKind::self_loop, v, -1, -1}); }

  Graph build(Geometry geom, int lx, int ly) {
    Graph g;
    g.geometry_ = geom;
    g.lx_ = lx;
    g.ly_ = ly;
    g.edges_ = std::move(edges_);
    g.offsets_.assign(1, 0);
    for (auto& list : per_site_) {
      g.slots_.insert(g.slots_.end(), list.begin(), list.end());
      g.offsets_.push_back(static_cast<int>(g.slots_.size()));
    }
    g.finalize();
    return g;
  }

 private:
  std::vector<std::vector<Slot>> per_site_;
  std::vector<std::pair<int, int>> edges_;
};

// Assigns boundary indices (site order, then local order), mates and the
// per-site counters. Internal slots of parallel edges are matched by edge id.
void Graph::finalize() {
  const int n = num_sites();
  boundary_site_.clear();
  boundary_slot_.clear();
  boundary_count_.assign(n, 0);
  self_loops_.assign(n, 0);
  for (int v = 0; v < n; ++v) {
    for (int i = 0; i < degree(v); ++i) {
      Slot& s = slots_[offsets_[v] + i];
      if (s.kind == SlotKind::boundary) {
        s.target = s.edge = static_cast<int>(boundary_site_.size());
        boundary_site_.push_back(v);
        boundary_slot_.push_back(i);
        ++boundary_count_[v];
      } else if (s.kind == SlotKind::self_loop) {
        ++self_loops_[v];
      }
    }
  }
  // Mate lookup: each internal edge id appears once at each endpoint.
  std::vector<std::array<int, 2>> where(edges_.size(), {-1, -1});
  for (int v = 0; v < n; ++v) {
    for (int i = 0; i < degree(v); ++i) {
      const Slot& s = slots_[offsets_[v] + i];
      if (s.kind != SlotKind::internal) continue;
      auto& w = where[s.edge];
      (w[0] < 0 ? w[0] : w[1]) = offsets_[v] + i;
    }
  }
  for (const auto& w : where) {
    if (w[0] < 0 || w[1] < 0) throw GeometryError("internal edge with a missing endpoint slot");
    const auto local = [&](int global) {
      const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
      return global - *(it - 1);
    };
    slots_[w[0]].mate = local(w[1]);
    slots_[w[1]].mate = local(w[0]);
  }
}

FrameIdentity Graph::frame_identity() const {
  FrameIdentity id;
  id.grains.assign(boundary_count_.begin(), boundary_count_.end());
  id.total = num_boundary();
  return id;
}

Graph Graph::with_ordering(const std::vector<std::vector<int>>& order) const {
  if (static_cast<int>(order.size()) != num_sites()) {
    throw GeometryError("ordering must list every site");
  }
  Graph out = *this;
  for (int v = 0; v < num_sites(); ++v) {
    const auto& perm = order[v];
    if (static_cast<int>(perm.size()) != degree(v)) {
      throw GeometryError("ordering of site " + std::to_string(v) + " has wrong length");
    }
    std::vector<char> seen(perm.size(), 0);
    for (int i = 0; i < degree(v); ++i) {
      const int j = perm[i];
      if (j < 0 || j >= degree(v) || seen[j]) {
        throw GeometryError("ordering of site " + std::to_string(v) + " is not a permutation");
      }
      seen[j] = 1;
      out.slots_[offsets_[v] + i] = slots_[offsets_[v] + j];
    }
  }
  // Boundary indices follow the original half-edges, not the new order.
  for (int b = 0; b < num_boundary(); ++b) {
    const int v = boundary_site_[b];
    for (int i = 0; i < degree(v); ++i) {
      const Slot& s = out.slots_[offsets_[v] + i];
      if (s.kind == SlotKind::boundary && s.target == b) out.boundary_slot_[b] = i;
    }
  }
  for (int v = 0; v < num_sites(); ++v) {
    for (int i = 0; i < degree(v); ++i) {
      Slot& s = out.slots_[offsets_[v] + i];
      if (s.kind != SlotKind::internal) continue;
      const int u = s.target;
      for (int k = 0; k < degree(u); ++k) {
        const Slot& t = out.slots_[offsets_[u] + k];
        if (t.kind == SlotKind::internal && t.edge == s.edge && (u != v || k != i)) {
          s.mate = k;
          break;
        }
      }
    }
  }
  return out;
}

namespace {

void check_dims(int lx, int ly, int min_lx) {
  if (lx < min_lx || ly < 1) {
    throw GeometryError("invalid dimensions " + std::to_string(lx) + "x" + std::to_string(ly));
  }
}

// Square lattice in row-major order, y = 0 the bottom row. Slot order per
// site: boundary half-edges first (in compass order), then internal edges in
// compass order N, E, S, W, then the self-loop of a folded site.
Graph build_lattice(Geometry geom, int lx, int ly) {
  const bool periodic = geom != Geometry::open_rect;
  const bool folded = geom == Geometry::folded_cylinder;
  GraphBuilder builder(lx * ly);
  const auto idx = [lx](int x, int y) { return y * lx + x; };

  // Edge ids: east edges then north edges, each in site order.
  std::vector<int> east(static_cast<std::size_t>(lx * ly), -1);
  std::vector<int> north(static_cast<std::size_t>(lx * ly), -1);
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      if (x + 1 < lx) {
        east[idx(x, y)] = builder.add_edge(idx(x, y), idx(x + 1, y));
      } else if (periodic) {
        east[idx(x, y)] = builder.add_edge(idx(x, y), idx(0, y));
      }
    }
  }
  for (int y = 0; y + 1 < ly; ++y) {
    for (int x = 0; x < lx; ++x) north[idx(x, y)] = builder.add_edge(idx(x, y), idx(x, y + 1));
  }

  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      const int v = idx(x, y);
      const int west_x = x > 0 ? x - 1 : (periodic ? lx - 1 : -1);
      // N, E, S, W: edge id or -1 for a missing neighbour.
      const std::array<int, 4> dir = {
          y + 1 < ly ? north[v] : -1,
          east[v],
          y > 0 ? north[idx(x, y - 1)] : -1,
          west_x >= 0 ? east[idx(west_x, y)] : -1,
      };
      const bool top_folded = folded && y + 1 == ly;
      for (int k = 0; k < 4; ++k) {
        if (dir[k] < 0 && !(k == 0 && top_folded)) builder.push_boundary(v);
      }
      for (int k = 0; k < 4; ++k) {
        if (dir[k] >= 0) builder.push_internal(v, dir[k]);
      }
      if (top_folded) builder.push_self_loop(v);
    }
  }
  return builder.build(geom, lx, ly);
}

}  // namespace

Graph build_open_rect(int lx, int ly) {
  check_dims(lx, ly, 1);
  return build_lattice(Geometry::open_rect, lx, ly);
}

Graph build_cylinder(int lx, int ly) {
  check_dims(lx, ly, 2);
  return build_lattice(Geometry::cylinder, lx, ly);
}

Graph build_folded_cylinder(int lx, int ly) {
  check_dims(lx, ly, 2);
  return build_lattice(Geometry::folded_cylinder, lx, ly);
}

Graph build_geometry(Geometry g, int lx, int ly) {
  switch (g) {
    case Geometry::open_rect: return build_open_rect(lx, ly);
    case Geometry::cylinder: return build_cylinder(lx, ly);
    case Geometry::folded_cylinder: return build_folded_cylinder(lx, ly);
    case Geometry::custom: break;
  }
  throw GeometryError("custom geometry needs an explicit description");
}

Graph build_custom(const CustomGraphSpec& spec) {
  if (spec.sites < 1) throw GeometryError("custom graph needs at least one site");
  const auto check_site = [&](int v, const char* what) {
    if (v < 0 || v >= spec.sites) {
      throw GeometryError(std::string(what) + " refers to site " + std::to_string(v) +
                          " outside [0, " + std::to_string(spec.sites) + ")");
    }
  };
  GraphBuilder builder(spec.sites);
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(spec.sites));
  for (const auto& [u, v] : spec.edges) {
    check_site(u, "edge");
    check_site(v, "edge");
    if (u == v) throw GeometryError("edge endpoints must differ; use selfloops");
    const int e = builder.add_edge(u, v);
    incident[u].push_back(e);
    incident[v].push_back(e);
  }
  std::vector<int> nb(static_cast<std::size_t>(spec.sites), 0);
  std::vector<int> nl(static_cast<std::size_t>(spec.sites), 0);
  for (int v : spec.boundary) {
    check_site(v, "boundary");
    ++nb[v];
  }
  for (int v : spec.selfloops) {
    check_site(v, "selfloops");
    ++nl[v];
  }
  if (spec.boundary.empty()) throw GeometryError("custom graph needs at least one boundary half-edge");
  for (int v = 0; v < spec.sites; ++v) {
    for (int k = 0; k < nb[v]; ++k) builder.push_boundary(v);
    for (int e : incident[v]) builder.push_internal(v, e);
    for (int k = 0; k < nl[v]; ++k) builder.push_self_loop(v);
  }
  Graph g = builder.build(Geometry::custom, 0, 0);
  for (int v = 0; v < g.num_sites(); ++v) {
    if (g.degree(v) - g.self_loops(v) < 1) {
      throw GeometryError("site " + std::to_string(v) + " has no edges besides self-loops");
    }
  }
  if (!is_connected_to_boundary(g)) throw GeometryError("custom graph has sites cut off from the boundary");
  return g;
}

Graph figure1_graph() {
  return build_custom({.sites = 3, .edges = {{0, 1}, {0, 1}, {1, 2}}, .boundary = {0, 2}, .selfloops = {}});
}

bool is_connected_to_boundary(const Graph& g) {
  const int n = g.num_sites();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  for (int b = 0; b < g.num_boundary(); ++b) {
    const int v = g.boundary_site(b);
    if (!seen[v]) {
      seen[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const Slot& s : g.slots(v)) {
      if (s.kind == SlotKind::internal && !seen[s.target]) {
        seen[s.target] = 1;
        stack.push_back(s.target);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace avf
