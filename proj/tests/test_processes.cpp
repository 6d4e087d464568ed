#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "avf/exact.hpp"
#include "avf/graph.hpp"
#include "avf/processes.hpp"
#include "avf/random.hpp"
#include "avf/sandpile.hpp"
#include "avf/wilson.hpp"

using namespace avf;

namespace {

using Sizes = std::vector<std::int64_t>;

BoundaryPartition labelled(const Graph& g, std::vector<std::int32_t> labels) {
  BoundaryPartition p;
  p.sizes.assign(g.num_boundary(), 0);
  for (int l : labels) ++p.sizes[l];
  p.label = std::move(labels);
  return p;
}

// Labels listed top row first, as drawn.
std::vector<std::int32_t> from_rows(int lx, const std::vector<std::vector<std::int32_t>>& rows_top_down) {
  std::vector<std::int32_t> out;
  for (auto it = rows_top_down.rbegin(); it != rows_top_down.rend(); ++it) {
    REQUIRE(static_cast<int>(it->size()) == lx);
    out.insert(out.end(), it->begin(), it->end());
  }
  return out;
}

// Labels of the components of the forest, traced by following parents.
std::vector<std::int32_t> roots_by_walking(const Graph& g, const SpanningForest& f) {
  std::vector<std::int32_t> out(g.num_sites());
  for (int v = 0; v < g.num_sites(); ++v) {
    int u = v;
    for (;;) {
      const Slot& s = g.slot(u, f.parent_slot[u]);
      if (s.kind == SlotKind::boundary) {
        out[v] = s.target;
        break;
      }
      u = s.target;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("figure-1 table") {
  const Graph g = figure1_graph();
  const std::vector<HeightConfig> configs = {{2, 2, 1}, {2, 2, 0}, {2, 1, 1}, {2, 1, 0},
                                             {2, 0, 1}, {1, 2, 1}, {0, 2, 1}};
  const std::vector<Sizes> first_then_second = {{3, 0}, {2, 1}, {3, 0}, {2, 1}, {1, 2}, {0, 3}, {0, 3}};
  const std::vector<Sizes> second_then_first = {{0, 3}, {3, 0}, {2, 1}, {3, 0}, {2, 1}, {0, 3}, {1, 2}};
  for (std::size_t i = 0; i < configs.size(); ++i) {
    CAPTURE(i);
    const auto [p12, trace12] = permutation_process(g, configs[i], {0, 1});
    CHECK(p12.sizes == first_then_second[i]);
    CHECK(trace12.final_config == configs[i]);
    CHECK(trace12.avalanches.size() == 2);
    const auto [p21, trace21] = permutation_process(g, configs[i], {1, 0});
    CHECK(p21.sizes == second_then_first[i]);
  }
  std::multiset<Sizes> bt;
  for (const auto& z : configs) bt.insert(bt_process(g, z).first.sizes);
  CHECK(bt == std::multiset<Sizes>{{3, 0}, {3, 0}, {2, 1}, {2, 1}, {1, 2}, {0, 3}, {0, 3}});
}

TEST_CASE("BT partition equals the burning-test forest components") {
  const Graph g = build_open_rect(8, 8);
  RandomSource rng(77);
  for (int i = 0; i < 1000; ++i) {
    const HeightConfig z = sample_recurrent_config(g, rng);
    const auto [p, f] = bt_process(g, z);
    const auto forest = burning_test(g, z);
    REQUIRE(forest.has_value());
    CHECK(f == *forest);
    CHECK(p.label == roots_by_walking(g, f));
    CHECK(std::accumulate(p.sizes.begin(), p.sizes.end(), std::int64_t{0}) == g.num_sites());
  }
}

TEST_CASE("permutation process partitions every site exactly once") {
  const Graph g = build_folded_cylinder(10, 12);
  RandomSource rng(12);
  for (int i = 0; i < 50; ++i) {
    const HeightConfig z = sample_recurrent_config(g, rng);
    const auto sigma = random_permutation(g.num_boundary(), rng);
    const auto [p, trace] = permutation_process(g, z, sigma);
    CHECK(trace.final_config == z);
    std::vector<int> toppled(g.num_sites(), 0);
    for (std::size_t k = 0; k < trace.avalanches.size(); ++k) {
      const AvalancheRecord& a = trace.avalanches[k];
      CHECK(a.max_topplings() <= 1);
      CHECK(static_cast<std::int64_t>(a.size()) == p.sizes[sigma[k]]);
      for (int v : a.sites) {
        ++toppled[v];
        CHECK(p.label[v] == sigma[k]);
      }
      CHECK(is_simply_connected(g, a.sites) == true);
    }
    for (int c : toppled) CHECK(c == 1);
  }
}

TEST_CASE("non-recurrent input is reported") {
  const Graph g = figure1_graph();
  CHECK_THROWS_AS(permutation_process(g, {2, 0, 0}, {0, 1}), NotRecurrentError);
  CHECK_THROWS_AS(bt_process(g, {2, 0, 0}), NotRecurrentError);
  CHECK_THROWS_AS(bt_process(g, {3, 2, 1}), NotRecurrentError);
  CHECK_THROWS_AS(permutation_process(g, {2, 2, 1}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(permutation_process(g, {2, 2, 1}, {0}), std::invalid_argument);
}

TEST_CASE("single-site avalanches") {
  const Graph g = figure1_graph();
  // Site 2 at height 0 cannot topple from one grain.
  const AvalancheRecord empty = single_site_avalanche(g, {2, 2, 0}, 1);
  CHECK(empty.empty());
  CHECK(empty.size() == 0);
  const AvalancheRecord full = single_site_avalanche(g, {2, 2, 1}, 0);
  CHECK(full.size() == 3);
  CHECK_THROWS_AS(single_site_avalanche(g, {2, 2, 1}, 2), std::invalid_argument);
}

TEST_CASE("avalanche marginals do not depend on sigma") {
  // Exhaustive over the recurrent set: the k-th avalanche of sigma has the
  // law of a lone avalanche at sigma[k].
  for (const Graph& g : {figure1_graph(), build_open_rect(2, 2), build_folded_cylinder(3, 2)}) {
    const auto configs = enumerate_recurrent(g);
    std::vector<std::map<std::int64_t, int>> lone(g.num_boundary());
    for (const auto& z : configs) {
      for (int b = 0; b < g.num_boundary(); ++b) ++lone[b][single_site_avalanche(g, z, b).size()];
    }
    RandomSource rng(9);
    for (int trial = 0; trial < 12; ++trial) {
      const auto sigma = random_permutation(g.num_boundary(), rng);
      std::vector<std::map<std::int64_t, int>> staged(g.num_boundary());
      std::vector<std::map<std::int64_t, int>> part(g.num_boundary());
      for (const auto& z : configs) {
        const auto [p, trace] = permutation_process(g, z, sigma);
        for (std::size_t k = 0; k < sigma.size(); ++k) ++staged[sigma[k]][trace.avalanches[k].size()];
        for (int b = 0; b < g.num_boundary(); ++b) ++part[b][p.sizes[b]];
      }
      CHECK(staged == lone);
      CHECK(part == lone);
    }
  }
}

TEST_CASE("triple points of hand-built partitions") {
  const Graph g = build_open_rect(3, 3);
  const auto labels = from_rows(3, {{0, 0, 1}, {0, 0, 1}, {2, 2, 1}});
  const TriplePointReport r = extract_triple_points(g, labelled(g, labels));
  REQUIRE(r.triple.size() == 1);
  CHECK(r.triple[0].x == 2);
  CHECK(r.triple[0].y == 1);
  CHECK(r.triple[0].labels == std::vector<std::int32_t>{0, 1, 2});
  CHECK(r.quad.empty());

  CHECK(extract_triple_points(g, labelled(g, std::vector<std::int32_t>(9, 4))).triple.empty());

  const Graph sq = build_open_rect(2, 2);
  const TriplePointReport q = extract_triple_points(sq, labelled(sq, {0, 1, 2, 3}));
  CHECK(q.triple.empty());
  REQUIRE(q.quad.size() == 1);
  CHECK(q.quad[0].x == 1);
  CHECK(q.quad[0].y == 1);

  // On a cylinder the seam vertex x = 0 counts.
  const Graph cyl = build_folded_cylinder(4, 2);
  const auto wrap = from_rows(4, {{2, 1, 1, 3}, {0, 0, 0, 0}});
  const TriplePointReport w = extract_triple_points(cyl, labelled(cyl, wrap));
  std::vector<int> xs;
  for (const auto& t : w.triple) xs.push_back(t.x);
  std::sort(xs.begin(), xs.end());
  CHECK(xs == std::vector<int>{0, 1, 3});

  const Graph custom = build_custom({1, {}, {0}, {}});
  CHECK_THROWS_AS(extract_triple_points(custom, labelled(custom, {0})), std::invalid_argument);
  CHECK_THROWS_AS(extract_triple_points(g, labelled(g, {0, 0})), std::invalid_argument);
}

TEST_CASE("interfaces per row") {
  const Graph cyl = build_folded_cylinder(4, 3);
  const auto labels = from_rows(4, {{3, 3, 3, 3}, {0, 1, 1, 0}, {0, 0, 1, 2}});
  const BoundaryPartition p = labelled(cyl, labels);
  CHECK(interfaces_at_height(cyl, p, 1) == 3);  // {0,1} {1,2} {0,2} with the wrap
  CHECK(interfaces_at_height(cyl, p, 2) == 1);  // {0,1} twice, counted once
  CHECK_THROWS_AS(interfaces_at_height(cyl, p, 3), std::out_of_range);
  CHECK_THROWS_AS(interfaces_at_height(cyl, p, 0), std::out_of_range);

  const Graph rect = build_open_rect(4, 2);
  const BoundaryPartition q = labelled(rect, from_rows(4, {{0, 0, 0, 0}, {1, 0, 0, 1}}));
  CHECK(interfaces_at_height(rect, q, 1) == 1);
  CHECK(interfaces_at_height(rect, labelled(rect, std::vector<std::int32_t>(8, 2)), 1) == 0);

  const Graph wide = build_folded_cylinder(20, 10);
  RandomSource rng(2);
  for (int i = 0; i < 20; ++i) {
    const BoundaryPartition bt = bt_process(wide, sample_recurrent_config(wide, rng)).first;
    CHECK(interfaces_at_height(wide, bt, 1) <= wide.lx());
  }
}

TEST_CASE("Euler relation for triple and quadruple points on the folded cylinder") {
  // t + 2q = 2m - c - 2, with m the non-empty polyominoes and c the label
  // changes along the bottom row.
  const Graph g = build_folded_cylinder(16, 64);
  RandomSource rng(40);
  int checked = 0;
  for (int i = 0; i < 40; ++i) {
    const BoundaryPartition p = bt_process(g, sample_recurrent_config(g, rng)).first;
    const bool wraps = std::any_of(p.sizes.begin(), p.sizes.end(), [&](auto s) { return 2 * s > g.num_sites(); });
    if (!wraps) continue;
    const TriplePointReport r = extract_triple_points(g, p);
    int changes = 0;
    for (int x = 0; x < g.lx(); ++x) changes += p.label[x] != p.label[(x + 1) % g.lx()];
    const auto t = static_cast<int>(r.triple.size());
    const auto q = static_cast<int>(r.quad.size());
    CHECK(t + 2 * q == 2 * count_nonempty(p) - changes - 2);
    ++checked;
  }
  CHECK(checked > 30);
}

TEST_CASE("a long folded cylinder has exactly one giant") {
  const Graph g = build_folded_cylinder(16, 128);
  RandomSource rng(64);
  for (int i = 0; i < 30; ++i) {
    const BoundaryPartition p = bt_process(g, sample_recurrent_config(g, rng)).first;
    const auto giants = std::count_if(p.sizes.begin(), p.sizes.end(), [&](auto s) { return 2 * s > g.num_sites(); });
    CHECK(giants == 1);
  }
}

TEST_CASE("simple connectivity") {
  const Graph g = build_open_rect(5, 5);
  std::vector<std::int32_t> ring;
  for (int y = 1; y <= 3; ++y) {
    for (int x = 1; x <= 3; ++x) {
      if (x != 2 || y != 2) ring.push_back(g.site_at(x, y));
    }
  }
  CHECK_FALSE(is_simply_connected(g, ring));
  ring.push_back(g.site_at(2, 2));
  CHECK(is_simply_connected(g, ring));
  CHECK(is_simply_connected(g, {}));
}

TEST_CASE("random permutations") {
  RandomSource rng(3);
  for (int n : {1, 2, 7, 50}) {
    auto s = random_permutation(n, rng);
    std::sort(s.begin(), s.end());
    std::vector<std::int32_t> id(n);
    std::iota(id.begin(), id.end(), 0);
    CHECK(s == id);
  }
}
