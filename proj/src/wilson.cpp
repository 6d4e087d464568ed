#include "avf/wilson.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace avf {

namespace {

// Uniform non-self-loop slot of v.
int random_step(const Graph& g, int v, RandomSource& rng) {
  const auto d = static_cast<std::uint32_t>(g.degree(v));
  for (;;) {
    const int i = static_cast<int>(rng.below(d));
    if (g.slot(v, i).kind != SlotKind::self_loop) return i;
  }
}

// Runs the walk from `start`, overwriting next[v] on every visit so that
// following `next` from `start` afterwards traces the loop erasure.
void walk_recording_last_exit(const Graph& g, int start, std::span<const std::uint8_t> absorbed,
                              std::vector<std::int32_t>& next, RandomSource& rng) {
  std::uint64_t steps = 0;
  int v = start;
  while (!absorbed[v]) {
    const int i = random_step(g, v, rng);
    next[v] = i;
    const Slot& s = g.slot(v, i);
    if (s.kind == SlotKind::boundary) return;
    v = s.target;
    if (++steps > kWalkStepGuard) {
      throw std::runtime_error("random walk from site " + std::to_string(start) +
                               " exceeded the step guard without absorption");
    }
  }
}

}  // namespace

LoopErasedPath loop_erased_walk(const Graph& g, int start, std::span<const std::uint8_t> absorbed,
                                RandomSource& rng) {
  if (static_cast<int>(absorbed.size()) != g.num_sites()) {
    throw std::invalid_argument("absorbing mask has wrong length");
  }
  LoopErasedPath path;
  if (absorbed[start]) {
    path.end_site = start;
    return path;
  }
  std::vector<std::int32_t> next(static_cast<std::size_t>(g.num_sites()), -1);
  walk_recording_last_exit(g, start, absorbed, next, rng);
  int v = start;
  for (;;) {
    path.sites.push_back(v);
    path.exit_slots.push_back(next[v]);
    const Slot& s = g.slot(v, next[v]);
    if (s.kind == SlotKind::boundary) {
      path.end_boundary = s.target;
      return path;
    }
    v = s.target;
    if (absorbed[v]) {
      path.end_site = v;
      return path;
    }
  }
}

SpanningForest sample_forest(const Graph& g, RandomSource& rng, std::span<const int> order) {
  const int n = g.num_sites();
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("site order has wrong length");
  std::vector<std::uint8_t> in_tree(static_cast<std::size_t>(n), 0);
  std::vector<std::int32_t> next(static_cast<std::size_t>(n), -1);
  for (int start : order) {
    if (in_tree[start]) continue;
    walk_recording_last_exit(g, start, in_tree, next, rng);
    for (int v = start; !in_tree[v];) {
      in_tree[v] = 1;
      const Slot& s = g.slot(v, next[v]);
      if (s.kind == SlotKind::boundary) break;
      v = s.target;
    }
  }
  return complete_forest(g, std::move(next));
}

SpanningForest sample_forest(const Graph& g, RandomSource& rng) {
  std::vector<int> order(static_cast<std::size_t>(g.num_sites()));
  std::iota(order.begin(), order.end(), 0);
  return sample_forest(g, rng, order);
}

HeightConfig sample_recurrent_config(const Graph& g, RandomSource& rng) {
  return forest_to_config(g, sample_forest(g, rng));
}

}  // namespace avf
