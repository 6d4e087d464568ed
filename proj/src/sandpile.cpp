#include "avf/sandpile.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace avf {

std::int64_t AvalancheRecord::topplings_at(int v) const {
  const auto it = std::lower_bound(sites.begin(), sites.end(), v);
  if (it == sites.end() || *it != v) return 0;
  return counts[static_cast<std::size_t>(it - sites.begin())];
}

std::int64_t AvalancheRecord::max_topplings() const {
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

bool is_stable(const Graph& g, const HeightConfig& h) {
  if (static_cast<int>(h.size()) != g.num_sites()) return false;
  for (int v = 0; v < g.num_sites(); ++v) {
    if (h[v] < 0 || h[v] >= g.degree(v)) return false;
  }
  return true;
}

Relaxer::Relaxer(const Graph& g, HeightConfig h)
    : graph_(&g),
      heights_(std::move(h)),
      topplings_(static_cast<std::size_t>(g.num_sites()), 0),
      queued_(static_cast<std::size_t>(g.num_sites()), 0) {
  if (static_cast<int>(heights_.size()) != g.num_sites()) {
    throw std::invalid_argument("height configuration has wrong length");
  }
  for (int v = 0; v < g.num_sites(); ++v) {
    if (heights_[v] < 0) throw std::invalid_argument("negative height at site " + std::to_string(v));
    if (heights_[v] >= g.degree(v)) {
      queued_[v] = 1;
      queue_.push_back(v);
    }
  }
}

void Relaxer::add(int site, std::int32_t grains) {
  heights_[site] += grains;
  if (!queued_[site] && heights_[site] >= graph_->degree(site)) {
    queued_[site] = 1;
    queue_.push_back(site);
  }
}

AvalancheRecord Relaxer::relax() {
  const Graph& g = *graph_;
  AvalancheRecord rec;
  // LIFO processing; by abelianity the final state does not depend on it.
  while (!queue_.empty()) {
    const int v = queue_.back();
    queue_.pop_back();
    queued_[v] = 0;
    const int d = g.degree(v);
    if (heights_[v] < d) continue;
    // Topple as many times as needed at once.
    const std::int32_t k = heights_[v] / d;
    heights_[v] -= k * d;
    if (topplings_[v] == 0) touched_.push_back(v);
    topplings_[v] += k;
    for (const Slot& s : g.slots(v)) {
      switch (s.kind) {
        case SlotKind::boundary: rec.grains_lost += k; break;
        case SlotKind::self_loop: heights_[v] += k; break;
        case SlotKind::internal: add(s.target, k); break;
      }
    }
    if (!queued_[v] && heights_[v] >= d) {
      queued_[v] = 1;
      queue_.push_back(v);
    }
  }
  std::sort(touched_.begin(), touched_.end());
  rec.sites.reserve(touched_.size());
  rec.counts.reserve(touched_.size());
  for (int v : touched_) {
    rec.sites.push_back(v);
    rec.counts.push_back(topplings_[v]);
    topplings_[v] = 0;
  }
  touched_.clear();
  return rec;
}

std::pair<HeightConfig, AvalancheRecord> relax(const Graph& g, HeightConfig h) {
  Relaxer r(g, std::move(h));
  AvalancheRecord rec = r.relax();
  return {r.release(), std::move(rec)};
}

std::pair<HeightConfig, AvalancheRecord> add_frame_identity_and_relax(const Graph& g, HeightConfig z) {
  if (static_cast<int>(z.size()) != g.num_sites()) {
    throw std::invalid_argument("height configuration has wrong length");
  }
  for (int v = 0; v < g.num_sites(); ++v) z[v] += g.boundary_count(v);
  return relax(g, std::move(z));
}

namespace {

constexpr std::int32_t kUnburnt = std::numeric_limits<std::int32_t>::max();

// Burn time of the far side of a slot: 0 for boundary half-edges, never for
// self-loops.
std::int32_t far_time(const Slot& s, const std::vector<std::int32_t>& t) {
  switch (s.kind) {
    case SlotKind::boundary: return 0;
    case SlotKind::self_loop: return kUnburnt;
    case SlotKind::internal: return t[s.target];
  }
  return kUnburnt;
}

}  // namespace

std::optional<SpanningForest> burning_test(const Graph& g, const HeightConfig& h) {
  if (!is_stable(g, h)) return std::nullopt;
  const int n = g.num_sites();
  SpanningForest f;
  f.parent_slot.assign(n, -1);
  f.root.assign(n, -1);
  f.burn_time.assign(n, kUnburnt);

  // burnt[v] = number of incident edges whose far side has burnt so far.
  std::vector<std::int32_t> burnt(static_cast<std::size_t>(n));
  std::vector<std::int32_t> candidates(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) burnt[v] = g.boundary_count(v);
  std::iota(candidates.begin(), candidates.end(), 0);

  std::vector<char> is_candidate(static_cast<std::size_t>(n), 0);
  std::vector<std::int32_t> burning;
  int total = 0;
  for (std::int32_t t = 1; !candidates.empty(); ++t) {
    burning.clear();
    for (int v : candidates) {
      is_candidate[v] = 0;
      if (f.burn_time[v] == kUnburnt && h[v] >= g.degree(v) - burnt[v]) burning.push_back(v);
    }
    candidates.clear();
    for (int v : burning) f.burn_time[v] = t;
    for (int v : burning) {
      // Parent: the r-th edge (in O(v)) among those newly burnt at t - 1.
      const int r = h[v] - (g.degree(v) - burnt[v]) + 1;
      int seen = 0;
      const auto slots = g.slots(v);
      for (int i = 0; i < static_cast<int>(slots.size()); ++i) {
        if (far_time(slots[i], f.burn_time) == t - 1 && ++seen == r) {
          f.parent_slot[v] = i;
          break;
        }
      }
      for (const Slot& s : slots) {
        if (s.kind != SlotKind::internal || f.burn_time[s.target] != kUnburnt) continue;
        ++burnt[s.target];
        if (!is_candidate[s.target]) {
          is_candidate[s.target] = 1;
          candidates.push_back(s.target);
        }
      }
    }
    total += static_cast<int>(burning.size());
  }
  if (total != n) return std::nullopt;
  // Roots follow parents downward in burn time.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return f.burn_time[a] < f.burn_time[b]; });
  for (int v : order) {
    const Slot& s = g.slot(v, f.parent_slot[v]);
    f.root[v] = s.kind == SlotKind::boundary ? s.target : f.root[s.target];
  }
  return f;
}

bool is_recurrent(const Graph& g, const HeightConfig& h) { return burning_test(g, h).has_value(); }

SpanningForest complete_forest(const Graph& g, std::vector<std::int32_t> parent_slot) {
  const int n = g.num_sites();
  if (static_cast<int>(parent_slot.size()) != n) throw ForestError("parent list has wrong length");
  for (int v = 0; v < n; ++v) {
    const int p = parent_slot[v];
    if (p < 0 || p >= g.degree(v)) throw ForestError("site " + std::to_string(v) + " has no valid parent edge");
    if (g.slot(v, p).kind == SlotKind::self_loop) {
      throw ForestError("site " + std::to_string(v) + " uses a self-loop as parent");
    }
  }
  SpanningForest f;
  f.parent_slot = std::move(parent_slot);
  f.root.assign(n, -1);
  f.burn_time.assign(n, -1);
  // 0 = unvisited, 1 = on current path, 2 = done.
  std::vector<char> state(static_cast<std::size_t>(n), 0);
  std::vector<int> path;
  for (int start = 0; start < n; ++start) {
    if (state[start] == 2) continue;
    path.clear();
    int v = start;
    std::int32_t base_time = 0;
    std::int32_t base_root = -1;
    for (;;) {
      if (state[v] == 1) throw ForestError("parent edges form a cycle through site " + std::to_string(v));
      if (state[v] == 2) {
        base_time = f.burn_time[v];
        base_root = f.root[v];
        break;
      }
      state[v] = 1;
      path.push_back(v);
      const Slot& s = g.slot(v, f.parent_slot[v]);
      if (s.kind == SlotKind::boundary) {
        base_root = s.target;
        base_time = 0;
        break;
      }
      v = s.target;
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      f.burn_time[*it] = ++base_time;
      f.root[*it] = base_root;
      state[*it] = 2;
    }
  }
  return f;
}

HeightConfig forest_to_config(const Graph& g, const SpanningForest& forest) {
  const SpanningForest f = complete_forest(g, forest.parent_slot);
  const int n = g.num_sites();
  HeightConfig h(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const std::int32_t t = f.burn_time[v];
    int burnt = 0;
    int rank = 0;
    const auto slots = g.slots(v);
    for (int i = 0; i < static_cast<int>(slots.size()); ++i) {
      const std::int32_t ft = slots[i].kind == SlotKind::internal ? f.burn_time[slots[i].target]
                              : slots[i].kind == SlotKind::boundary ? 0
                                                                    : kUnburnt;
      if (ft <= t - 1) ++burnt;
      if (ft == t - 1 && i <= f.parent_slot[v]) ++rank;
    }
    h[v] = g.degree(v) - burnt + rank - 1;
  }
  return h;
}

int parent_site(const Graph& g, const SpanningForest& f, int v) {
  const Slot& s = g.slot(v, f.parent_slot[v]);
  return s.kind == SlotKind::internal ? s.target : -1;
}

std::vector<std::int64_t> component_sizes(const Graph& g, const SpanningForest& f) {
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(g.num_boundary()), 0);
  for (int r : f.root) ++sizes[r];
  return sizes;
}

}  // namespace avf
