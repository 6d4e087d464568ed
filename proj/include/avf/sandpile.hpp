#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "avf/graph.hpp"

namespace avf {

/// Sand heights per site, row-major for lattice geometries.
using HeightConfig = std::vector<std::int32_t>;

/// Sites that toppled during one relaxation, with their toppling counts.
/// `sites` is sorted ascending; `counts[i]` belongs to `sites[i]`.
struct AvalancheRecord {
  std::vector<std::int32_t> sites;
  std::vector<std::int64_t> counts;
  std::int64_t grains_lost = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(sites.size()); }
  bool empty() const { return sites.empty(); }
  std::int64_t topplings_at(int v) const;
  std::int64_t max_topplings() const;
};

/// Boundary-rooted spanning forest stored as parent edge instances.
///
/// `parent_slot[v]` indexes into O(v); `root[v]` is the boundary half-edge
/// its tree hangs from; `burn_time[v]` is 1 + burn time of the parent
/// endpoint, boundary half-edges at time 0.
struct SpanningForest {
  std::vector<std::int32_t> parent_slot;
  std::vector<std::int32_t> root;
  std::vector<std::int32_t> burn_time;

  bool operator==(const SpanningForest&) const = default;
};

bool is_stable(const Graph& g, const HeightConfig& h);

/// Queue-driven stabilization engine holding one configuration.
///
/// Grains leaving through boundary half-edges are discarded; grains sent
/// along a self-loop return to the toppling site.
class Relaxer {
 public:
  Relaxer(const Graph& g, HeightConfig h);

  void add(int site, std::int32_t grains = 1);
  void add_boundary_grain(int b) { add(graph_->boundary_site(b)); }
  /// Stabilizes and returns the record of everything toppled since the last
  /// call.
  AvalancheRecord relax();

  const HeightConfig& heights() const { return heights_; }
  HeightConfig release() { return std::move(heights_); }

 private:
  const Graph* graph_;
  HeightConfig heights_;
  std::vector<std::int64_t> topplings_;
  std::vector<std::int32_t> touched_;
  std::vector<std::int32_t> queue_;
  std::vector<char> queued_;
};

std::pair<HeightConfig, AvalancheRecord> relax(const Graph& g, HeightConfig h);

/// Adds Id_f and relaxes. On a recurrent z this returns z with one toppling
/// per site.
std::pair<HeightConfig, AvalancheRecord> add_frame_identity_and_relax(const Graph& g, HeightConfig z);

/// Synchronous burning test. Returns the forest of the bijection, or nullopt
/// when burning stalls. Self-loops never burn.
std::optional<SpanningForest> burning_test(const Graph& g, const HeightConfig& h);

bool is_recurrent(const Graph& g, const HeightConfig& h);

/// Inverse of the burning bijection. Throws ForestError on a malformed forest.
HeightConfig forest_to_config(const Graph& g, const SpanningForest& f);

/// Recomputes `root` and `burn_time` from `parent_slot`; throws ForestError
/// on cycles, self-loop parents, or out-of-range slots.
SpanningForest complete_forest(const Graph& g, std::vector<std::int32_t> parent_slot);

/// Far site of the parent edge of v, or -1 when v hangs from a boundary edge.
int parent_site(const Graph& g, const SpanningForest& f, int v);

/// |T_b| for every boundary half-edge b (zero for empty trees).
std::vector<std::int64_t> component_sizes(const Graph& g, const SpanningForest& f);

}  // namespace avf
