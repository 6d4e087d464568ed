#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "avf/graph.hpp"
#include "avf/random.hpp"
#include "avf/sandpile.hpp"

namespace avf {

/// Component-size list (|T_1|, ..., |T_B|) -> multiplicity.
using SizeMultiset = std::map<std::vector<std::int64_t>, std::int64_t>;

inline constexpr std::int64_t kEnumerationGuard = 10'000'000;

struct ForestEnumeration {
  std::vector<SpanningForest> forests;
  SizeMultiset size_multiset;
};

/// Toppling matrix restricted to sites: d(v) minus self-loops on the
/// diagonal, minus edge multiplicities off it.
std::vector<std::vector<std::int64_t>> reduced_laplacian(const Graph& g);

/// Exact determinant of an integer matrix by fraction-free elimination.
std::int64_t integer_determinant(std::vector<std::vector<std::int64_t>> m);

std::int64_t reduced_laplacian_determinant(const Graph& g);

/// All stable configurations passing the burning test, lexicographic with
/// site 0 most significant. Guard: product of thresholds <= 10^7.
std::vector<HeightConfig> enumerate_recurrent(const Graph& g);

/// Every boundary-rooted spanning forest, parallel edges distinguished.
ForestEnumeration enumerate_forests(const Graph& g);

/// Vertex numbering of the extended graph used by signed sums: sites keep
/// their index, the outer end of boundary half-edge b is vertex V + b.
inline int root_vertex(const Graph& g, int b) { return g.num_sites() + b; }

/// Calls `visit(edges)` for every spanning forest of an undirected
/// multigraph on `n` vertices in which each component holds exactly one of
/// the `roots`. Edge indices refer to `edges`. Throws GuardExceeded past
/// `guard` forests.
void for_each_rooted_forest(int n, const std::vector<std::pair<int, int>>& edges, std::span<const int> roots,
                            const std::function<void(const std::vector<int>&)>& visit,
                            std::int64_t guard = kEnumerationGuard);

/// Brute-force signed count over forests of the extended graph rooted at
/// R u U in which each v_j shares a tree with u_{sigma^{-1}(j)}, weighted by
/// the signature of the pairing.
std::int64_t signed_forest_sum(const Graph& g, std::span<const int> roots, std::span<const int> us,
                               std::span<const int> vs);

struct EquivalenceReport {
  std::int64_t determinant = 0;
  std::int64_t recurrent_count = 0;
  std::int64_t forest_count = 0;
  bool bijection_ok = false;
  SizeMultiset forest_multiset;
  std::vector<std::vector<std::int32_t>> sigmas;
  std::vector<SizeMultiset> sigma_multisets;
  bool pass = false;
  std::string counterexample;
};

/// Exhaustive check that the permutation process under each sigma and the
/// forest (BT) process produce the same multiset of size lists.
EquivalenceReport verify_process_equivalence(const Graph& g, const std::vector<std::vector<std::int32_t>>& sigmas);

std::string format_multiset(const SizeMultiset& m);

/// Random connected multigraph for oracle sweeps: 1..max_sites sites, a
/// random spanning tree plus extra edges (parallel edges allowed), 1..3
/// boundary half-edges and occasionally a self-loop.
Graph random_oracle_graph(RandomSource& rng, int max_sites);

/// Root set, U and V for Z_{R,U,V} on the extended graph of g: R non-empty,
/// |U| = |V| = k, U and V disjoint from R.
struct RuvInstance {
  std::vector<int> roots;
  std::vector<int> us;
  std::vector<int> vs;
};
RuvInstance random_ruv_instance(const Graph& g, RandomSource& rng, int k);

}  // namespace avf
