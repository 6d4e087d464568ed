#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "avf/exact.hpp"
#include "avf/graph.hpp"
#include "avf/processes.hpp"
#include "avf/random.hpp"
#include "avf/sandpile.hpp"

using namespace avf;

namespace {

// Cofactor expansion, only for tiny matrices.
std::int64_t cofactor_det(const std::vector<std::vector<std::int64_t>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  std::int64_t det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<std::int64_t>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<std::int64_t> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(row);
    }
    det += (c % 2 ? -1 : 1) * m[0][c] * cofactor_det(minor);
  }
  return det;
}

}  // namespace

TEST_CASE("recurrent enumeration") {
  const Graph f1 = figure1_graph();
  const std::vector<HeightConfig> expected = {{0, 2, 1}, {1, 2, 1}, {2, 0, 1}, {2, 1, 0},
                                              {2, 1, 1}, {2, 2, 0}, {2, 2, 1}};
  CHECK(enumerate_recurrent(f1) == expected);

  const Graph one = build_open_rect(1, 1);
  CHECK(enumerate_recurrent(one) == std::vector<HeightConfig>{{0}, {1}, {2}, {3}});

  const Graph strip = build_open_rect(2, 1);
  CHECK(static_cast<std::int64_t>(enumerate_recurrent(strip).size()) ==
        cofactor_det(reduced_laplacian(strip)));
  CHECK(cofactor_det(reduced_laplacian(strip)) == 15);

  CHECK_THROWS_AS(enumerate_recurrent(build_open_rect(12, 12)), GuardExceeded);
}

TEST_CASE("forest enumeration") {
  const Graph f1 = figure1_graph();
  const ForestEnumeration e = enumerate_forests(f1);
  CHECK(e.forests.size() == 7);
  const SizeMultiset expected = {{{3, 0}, 2}, {{2, 1}, 2}, {{1, 2}, 1}, {{0, 3}, 2}};
  CHECK(e.size_multiset == expected);
  CHECK(format_multiset(e.size_multiset) == "{(3,0):2,(2,1):2,(1,2):1,(0,3):2}");

  const Graph triangle = build_custom({3, {{0, 1}, {1, 2}, {0, 2}}, {0, 1}, {}});
  CHECK(enumerate_forests(triangle).forests.size() == 8);
  const Graph edge = build_custom({2, {{0, 1}}, {0, 1}, {}});
  CHECK(enumerate_forests(edge).forests.size() == 3);

  CHECK_THROWS_AS(enumerate_forests(build_open_rect(8, 8)), GuardExceeded);
}

TEST_CASE("integer determinant") {
  CHECK(integer_determinant({{2, 0}, {0, 3}}) == 6);
  CHECK(integer_determinant({{0, 1}, {1, 0}}) == -1);
  CHECK(integer_determinant({{1, 2}, {2, 4}}) == 0);
  CHECK(integer_determinant({}) == 1);
  const std::vector<std::vector<std::int64_t>> m = {
      {4, -1, 0, -1}, {-1, 4, -1, 0}, {0, -1, 4, -1}, {-1, 0, -1, 4}};
  CHECK(integer_determinant(m) == cofactor_det(m));
  RandomSource rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(5));
    std::vector<std::vector<std::int64_t>> r(n, std::vector<std::int64_t>(n));
    for (auto& row : r) {
      for (auto& x : row) x = static_cast<std::int64_t>(rng.below(11)) - 5;
    }
    CHECK(integer_determinant(r) == cofactor_det(r));
  }
  CHECK(reduced_laplacian_determinant(figure1_graph()) == 7);
}

TEST_CASE("Laplacian determinant counts forests and recurrent configurations") {
  RandomSource rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const Graph g = random_oracle_graph(rng, 5);
    const std::int64_t det = cofactor_det(reduced_laplacian(g));
    const ForestEnumeration e = enumerate_forests(g);
    const auto rec = enumerate_recurrent(g);
    CHECK(static_cast<std::int64_t>(e.forests.size()) == det);
    CHECK(static_cast<std::int64_t>(rec.size()) == det);
    std::set<HeightConfig> images;
    for (const SpanningForest& f : e.forests) images.insert(forest_to_config(g, f));
    CHECK(images == std::set<HeightConfig>(rec.begin(), rec.end()));
  }
}

TEST_CASE("signed forest sums") {
  const Graph g = figure1_graph();
  CHECK(signed_forest_sum(g, std::vector<int>{root_vertex(g, 0), root_vertex(g, 1)}, {}, {}) == 7);

  // Forests in which site 2 hangs from boundary edge 0.
  const ForestEnumeration e = enumerate_forests(g);
  const auto filtered = std::count_if(e.forests.begin(), e.forests.end(), [](const auto& f) { return f.root[2] == 0; });
  const std::vector<int> roots = {root_vertex(g, 1)};
  const std::vector<int> us = {root_vertex(g, 0)};
  const std::vector<int> vs = {2};
  CHECK(signed_forest_sum(g, roots, us, vs) == filtered);
  CHECK(filtered == 2);

  // Swapping the targets flips the sign; only the uncrossed pairing is
  // realisable on a path.
  const Graph path = build_custom({4, {{0, 1}, {1, 2}, {2, 3}}, {0, 3}, {}});
  const std::vector<int> r = {root_vertex(path, 0)};
  const std::vector<int> u2 = {root_vertex(path, 1), 1};
  const std::vector<int> v12 = {2, 0};
  const std::vector<int> v21 = {0, 2};
  CHECK(signed_forest_sum(path, r, u2, v12) == -signed_forest_sum(path, r, u2, v21));
  CHECK(signed_forest_sum(path, r, u2, v21) == -1);
}

TEST_CASE("forest walker honours the guard") {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) edges.emplace_back(a, b);
  }
  const std::vector<int> root = {0};
  std::int64_t n = 0;
  for_each_rooted_forest(6, edges, root, [&](const std::vector<int>&) { ++n; });
  CHECK(n == 1296);  // 6^4 spanning trees of K6
  CHECK_THROWS_AS(for_each_rooted_forest(6, edges, root, [](const std::vector<int>&) {}, 100), GuardExceeded);
}

TEST_CASE("process equivalence") {
  const EquivalenceReport f1 = verify_process_equivalence(figure1_graph(), {{0, 1}, {1, 0}});
  CHECK(f1.pass);
  CHECK(f1.determinant == 7);
  CHECK(f1.recurrent_count == 7);
  CHECK(f1.forest_count == 7);
  CHECK(f1.bijection_ok);
  CHECK(format_multiset(f1.forest_multiset) == "{(3,0):2,(2,1):2,(1,2):1,(0,3):2}");
  REQUIRE(f1.sigma_multisets.size() == 2);
  for (const auto& m : f1.sigma_multisets) CHECK(m == f1.forest_multiset);

  RandomSource rng(70);
  const Graph sq = build_open_rect(2, 2);
  std::vector<std::vector<std::int32_t>> sigmas;
  for (int i = 0; i < 3; ++i) sigmas.push_back(random_permutation(sq.num_boundary(), rng));
  const EquivalenceReport r = verify_process_equivalence(sq, sigmas);
  CHECK(r.pass);
  CHECK(r.counterexample.empty());
  CHECK(r.forest_count == 192);

  const EquivalenceReport one = verify_process_equivalence(build_open_rect(1, 1), {{2, 0, 3, 1}});
  CHECK(one.pass);
  CHECK(one.forest_count == 4);

  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_oracle_graph(rng, 5);
    CHECK(verify_process_equivalence(g, {random_permutation(g.num_boundary(), rng)}).pass);
  }
}

TEST_CASE("random oracle instances are valid") {
  RandomSource rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_oracle_graph(rng, 8);
    CHECK(g.num_sites() >= 1);
    CHECK(g.num_sites() <= 8);
    CHECK(g.num_boundary() >= 1);
    CHECK(is_connected_to_boundary(g));
    for (int k = 0; 2 * k + 1 <= g.num_sites() + g.num_boundary() && k <= 2; ++k) {
      const RuvInstance inst = random_ruv_instance(g, rng, k);
      CHECK(!inst.roots.empty());
      CHECK(inst.us.size() == static_cast<std::size_t>(k));
      CHECK(inst.vs.size() == static_cast<std::size_t>(k));
      for (int u : inst.us) CHECK(std::find(inst.roots.begin(), inst.roots.end(), u) == inst.roots.end());
      for (int v : inst.vs) CHECK(std::find(inst.roots.begin(), inst.roots.end(), v) == inst.roots.end());
    }
  }
  CHECK_THROWS_AS(random_ruv_instance(build_open_rect(1, 1), rng, 3), std::invalid_argument);
}
