#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "avf/graph.hpp"
#include "avf/sandpile.hpp"

using namespace avf;

namespace {

int total_grains(const Graph& g) {
  const FrameIdentity id = g.frame_identity();
  return std::accumulate(id.grains.begin(), id.grains.end(), 0);
}

// Multiset of internal edges after relabelling sites by `map`, plus boundary
// counts, compared with the original.
bool is_automorphism(const Graph& g, const std::vector<int>& map) {
  std::map<std::pair<int, int>, int> before, after;
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [a, b] = g.edge_ends(e);
    before[{std::min(a, b), std::max(a, b)}]++;
    const int ma = map[a], mb = map[b];
    after[{std::min(ma, mb), std::max(ma, mb)}]++;
  }
  if (before != after) return false;
  for (int v = 0; v < g.num_sites(); ++v) {
    if (g.boundary_count(v) != g.boundary_count(map[v])) return false;
    if (g.self_loops(v) != g.self_loops(map[v])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("open rectangle sizes and thresholds") {
  const Graph g = build_open_rect(3, 3);
  CHECK(g.num_sites() == 9);
  CHECK(g.num_boundary() == 12);
  for (int v = 0; v < 9; ++v) CHECK(g.degree(v) == 4);

  const Graph one = build_open_rect(1, 1);
  CHECK(one.num_sites() == 1);
  CHECK(one.num_boundary() == 4);
  CHECK(one.degree(0) == 4);

  const Graph two = build_open_rect(2, 2);
  const FrameIdentity id = two.frame_identity();
  CHECK(id.total == 8);
  for (int v = 0; v < 4; ++v) CHECK(id.grains[v] == 2);
}

TEST_CASE("invalid dimensions are rejected") {
  CHECK_THROWS_AS(build_open_rect(0, 3), GeometryError);
  CHECK_THROWS_AS(build_open_rect(3, -1), GeometryError);
  CHECK_THROWS_AS(build_cylinder(1, 4), GeometryError);
  CHECK_THROWS_AS(build_folded_cylinder(1, 4), GeometryError);
  CHECK_THROWS_AS(build_folded_cylinder(4, 0), GeometryError);
  CHECK_THROWS_AS(parse_geometry("torus"), GeometryError);
}

TEST_CASE("cylinder") {
  const Graph g = build_cylinder(4, 6);
  CHECK(g.num_sites() == 24);
  CHECK(g.num_boundary() == 8);
  CHECK(g.num_sites() * 2 == g.num_boundary() * 6);  // V/B = Ly/2

  const Graph thin = build_cylinder(2, 1);
  CHECK(thin.num_sites() == 2);
  CHECK(thin.num_boundary() == 4);
  for (int v = 0; v < 2; ++v) CHECK(thin.degree(v) == 4);
}

TEST_CASE("cylinder is boundary-edge transitive") {
  const int lx = 10, ly = 10;
  const Graph g = build_cylinder(lx, ly);
  const int b0 = 0;
  for (int b = 0; b < g.num_boundary(); ++b) {
    const int x0 = g.boundary_site(b0) % lx, y0 = g.boundary_site(b0) / lx;
    const int x = g.boundary_site(b) % lx, y = g.boundary_site(b) / lx;
    const bool flip = y != y0;
    std::vector<int> map(g.num_sites());
    for (int v = 0; v < g.num_sites(); ++v) {
      const int vx = v % lx, vy = v / lx;
      const int nx = ((vx - x0 + x) % lx + lx) % lx;
      const int ny = flip ? ly - 1 - vy : vy;
      map[v] = g.site_at(nx, ny);
    }
    CHECK(is_automorphism(g, map));
    CHECK(map[g.boundary_site(b0)] == g.boundary_site(b));
  }
}

TEST_CASE("folded cylinder") {
  const Graph big = build_folded_cylinder(101, 158);
  CHECK(big.num_sites() == 15958);
  CHECK(big.num_boundary() == 101);

  const Graph small = build_folded_cylinder(3, 2);
  CHECK(small.frame_identity().total == 3);
  CHECK(total_grains(small) == 3);

  const Graph row = build_folded_cylinder(4, 1);
  for (int v = 0; v < 4; ++v) {
    CHECK(row.degree(v) == 4);
    CHECK(row.self_loops(v) == 1);
    CHECK(row.boundary_count(v) == 1);
  }
  // Relaxation of a heavy configuration must terminate with a stable result.
  const auto [h, rec] = relax(row, HeightConfig{40, 7, 0, 23});
  CHECK(is_stable(row, h));
  CHECK(rec.grains_lost > 0);

  const Graph tall = build_folded_cylinder(5, 4);
  for (int x = 0; x < 5; ++x) {
    CHECK(tall.self_loops(tall.site_at(x, 3)) == 1);
    CHECK(tall.boundary_count(tall.site_at(x, 0)) == 1);
    CHECK(tall.degree(tall.site_at(x, 3)) == 4);
  }
}

TEST_CASE("frame identity sums to B on every geometry") {
  for (int lx = 2; lx <= 5; ++lx) {
    for (int ly = 1; ly <= 4; ++ly) {
      for (Geometry geo : {Geometry::open_rect, Geometry::cylinder, Geometry::folded_cylinder}) {
        const Graph g = build_geometry(geo, lx, ly);
        CHECK(total_grains(g) == g.num_boundary());
        CHECK(g.frame_identity().total == g.num_boundary());
      }
    }
  }
}

TEST_CASE("default ordering: boundary first, then N E S W, then self-loop") {
  const Graph g = build_open_rect(3, 3);
  const int corner = g.site_at(0, 0);
  auto s = g.slots(corner);
  REQUIRE(s.size() == 4);
  CHECK(s[0].kind == SlotKind::boundary);
  CHECK(s[1].kind == SlotKind::boundary);
  CHECK(s[2].kind == SlotKind::internal);
  CHECK(s[2].target == g.site_at(0, 1));  // north
  CHECK(s[3].target == g.site_at(1, 0));  // east

  const int centre = g.site_at(1, 1);
  auto c = g.slots(centre);
  CHECK(c[0].target == g.site_at(1, 2));
  CHECK(c[1].target == g.site_at(2, 1));
  CHECK(c[2].target == g.site_at(1, 0));
  CHECK(c[3].target == g.site_at(0, 1));

  const Graph f = build_folded_cylinder(4, 2);
  auto top = f.slots(f.site_at(1, 1));
  CHECK(top.back().kind == SlotKind::self_loop);
  CHECK(top[0].target == f.site_at(2, 1));  // east, no north neighbour
}

TEST_CASE("boundary half-edges indexed by site then local order") {
  const Graph g = build_open_rect(3, 2);
  int prev_site = -1;
  for (int b = 0; b < g.num_boundary(); ++b) {
    CHECK(g.boundary_site(b) >= prev_site);
    prev_site = g.boundary_site(b);
    const Slot& s = g.slot(g.boundary_site(b), g.boundary_slot(b));
    CHECK(s.kind == SlotKind::boundary);
    CHECK(s.target == b);
  }
}

TEST_CASE("slots cover every edge instance exactly once") {
  for (const Graph& g : {build_open_rect(4, 3), build_cylinder(2, 3), build_folded_cylinder(3, 3), figure1_graph()}) {
    std::vector<int> seen(g.num_edges(), 0);
    for (int v = 0; v < g.num_sites(); ++v) {
      int boundary = 0, loops = 0;
      for (int i = 0; i < g.degree(v); ++i) {
        const Slot& s = g.slot(v, i);
        if (s.kind == SlotKind::internal) {
          ++seen[s.edge];
          const Slot& m = g.slot(s.target, s.mate);
          CHECK(m.kind == SlotKind::internal);
          CHECK(m.edge == s.edge);
          CHECK(m.target == v);
          CHECK(m.mate == i);
        } else if (s.kind == SlotKind::boundary) {
          ++boundary;
        } else {
          ++loops;
        }
      }
      CHECK(boundary == g.boundary_count(v));
      CHECK(loops == g.self_loops(v));
    }
    for (int c : seen) CHECK(c == 2);
  }
}

TEST_CASE("figure-1 graph") {
  const Graph g = figure1_graph();
  CHECK(g.num_sites() == 3);
  CHECK(g.num_boundary() == 2);
  CHECK(g.degree(0) == 3);
  CHECK(g.degree(1) == 3);
  CHECK(g.degree(2) == 2);
  int m[3][3] = {};
  for (int v = 0; v < 3; ++v) {
    m[v][v] = g.degree(v) - g.self_loops(v);
    for (const Slot& s : g.slots(v)) {
      if (s.kind == SlotKind::internal) --m[v][s.target];
    }
  }
  CHECK(m[0][1] == -2);
  CHECK(m[1][2] == -1);
  const int det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                  m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  CHECK(det == 7);
}

TEST_CASE("custom graphs") {
  const Graph single = build_custom({1, {}, {0, 0, 0}, {}});
  CHECK(single.degree(0) == 3);
  CHECK(single.num_boundary() == 3);

  const Graph pair = build_custom({2, {{0, 1}}, {0, 1}, {}});
  CHECK(pair.degree(0) == 2);
  CHECK(pair.degree(1) == 2);

  const Graph looped = build_custom({1, {}, {0, 0}, {0}});
  CHECK(looped.degree(0) == 3);
  CHECK(looped.self_loops(0) == 1);

  CHECK_THROWS_AS(build_custom({2, {{0, 2}}, {0}, {}}), GeometryError);
  CHECK_THROWS_AS(build_custom({2, {{0, 0}}, {0}, {}}), GeometryError);
  // Two isolated sites, each with its own boundary half-edge: connected
  // through the boundary, hence valid.
  CHECK_NOTHROW(build_custom({2, {}, {0, 1}, {}}));
  CHECK_THROWS_AS(build_custom({3, {{0, 1}}, {0}, {2}}), GeometryError);
  CHECK_THROWS_AS(build_custom({2, {{0, 1}}, {}, {}}), GeometryError);
  CHECK_THROWS_AS(build_custom({0, {}, {}, {}}), GeometryError);
}

TEST_CASE("with_ordering permutes slots and keeps boundary identities") {
  const Graph g = figure1_graph();
  std::vector<std::vector<int>> order = {{2, 1, 0}, {0, 2, 1}, {1, 0}};
  const Graph h = g.with_ordering(order);
  for (int v = 0; v < 3; ++v) {
    for (int i = 0; i < g.degree(v); ++i) {
      CHECK(h.slot(v, i).kind == g.slot(v, order[v][i]).kind);
      if (h.slot(v, i).kind != SlotKind::boundary) CHECK(h.slot(v, i).target == g.slot(v, order[v][i]).target);
    }
  }
  for (int b = 0; b < 2; ++b) {
    CHECK(h.boundary_site(b) == g.boundary_site(b));
    CHECK(h.slot(h.boundary_site(b), h.boundary_slot(b)).target == b);
  }
  CHECK_THROWS_AS(g.with_ordering({{0, 1, 2}, {0, 1, 1}, {0, 1}}), GeometryError);
  CHECK_THROWS_AS(g.with_ordering({{0, 1, 2}}), GeometryError);
}
