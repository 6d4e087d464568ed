#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "avf/graph.hpp"
#include "avf/random.hpp"
#include "avf/sandpile.hpp"

namespace avf {

/// Loop-erased path in time order. `exit_slots[i]` is the slot of
/// `sites[i]` taken to leave it; the last one leads into the absorbing set.
/// `end_site` is the absorbed site reached, or -1 with `end_boundary` set
/// when the walk left through a boundary half-edge.
struct LoopErasedPath {
  std::vector<std::int32_t> sites;
  std::vector<std::int32_t> exit_slots;
  std::int32_t end_site = -1;
  std::int32_t end_boundary = -1;
};

/// Walk step budget before a diagnostic error is raised.
inline constexpr std::uint64_t kWalkStepGuard = 10'000'000'000ULL;

/// Simple random walk over incident edge instances from `start`, stopped on
/// the first hit of a site with `absorbed[v] != 0` or of any boundary
/// half-edge, then loop-erased. Self-loop steps are skipped; they would be
/// erased immediately and do not change the law of the erased path.
LoopErasedPath loop_erased_walk(const Graph& g, int start, std::span<const std::uint8_t> absorbed,
                                RandomSource& rng);

/// Uniform boundary-rooted spanning forest by Wilson's algorithm, walks
/// started from sites in index order.
SpanningForest sample_forest(const Graph& g, RandomSource& rng);

/// Same, with an explicit site processing order (a permutation of sites).
SpanningForest sample_forest(const Graph& g, RandomSource& rng, std::span<const int> order);

/// Uniform recurrent configuration: forest_to_config(sample_forest(g, rng)).
HeightConfig sample_recurrent_config(const Graph& g, RandomSource& rng);

}  // namespace avf
