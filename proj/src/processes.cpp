#include "avf/processes.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <string>

namespace avf {

std::pair<BoundaryPartition, ProcessTrace> permutation_process(const Graph& g, const HeightConfig& z,
                                                               const std::vector<std::int32_t>& sigma) {
  const int n = g.num_sites();
  const int nb = g.num_boundary();
  if (static_cast<int>(sigma.size()) != nb) throw std::invalid_argument("sigma must list every boundary edge");
  std::vector<char> seen(static_cast<std::size_t>(nb), 0);
  for (int b : sigma) {
    if (b < 0 || b >= nb || seen[b]) throw std::invalid_argument("sigma is not a permutation");
    seen[b] = 1;
  }
  if (!is_stable(g, z)) throw NotRecurrentError("permutation process needs a stable configuration");

  BoundaryPartition part;
  part.label.assign(n, -1);
  part.sizes.assign(nb, 0);
  ProcessTrace trace;
  trace.sigma = sigma;
  trace.avalanches.reserve(sigma.size());

  Relaxer relaxer(g, z);
  for (int b : sigma) {
    relaxer.add_boundary_grain(b);
    AvalancheRecord rec = relaxer.relax();
    for (std::size_t i = 0; i < rec.sites.size(); ++i) {
      const int v = rec.sites[i];
      if (rec.counts[i] != 1 || part.label[v] != -1) {
        throw NotRecurrentError("site " + std::to_string(v) + " toppled more than once");
      }
      part.label[v] = b;
    }
    part.sizes[b] = rec.size();
    trace.avalanches.push_back(std::move(rec));
  }
  trace.final_config = relaxer.release();
  if (trace.final_config != z || std::count(part.label.begin(), part.label.end(), -1) != 0) {
    throw NotRecurrentError("frame identity did not return the configuration");
  }
  return {std::move(part), std::move(trace)};
}

std::pair<BoundaryPartition, SpanningForest> bt_process(const Graph& g, const HeightConfig& z) {
  const int n = g.num_sites();
  if (!is_stable(g, z)) throw NotRecurrentError("BT process needs a stable configuration");
  std::vector<int> offset(static_cast<std::size_t>(n) + 1, 0);
  for (int v = 0; v < n; ++v) offset[v + 1] = offset[v] + g.degree(v);

  // Arrival step of the grain delivered through each slot, -1 if none yet.
  std::vector<std::int32_t> arrival(static_cast<std::size_t>(offset[n]), -1);
  std::vector<std::int32_t> received(static_cast<std::size_t>(n), 0);
  std::vector<std::int32_t> colour(static_cast<std::size_t>(n), -1);
  std::vector<std::int32_t> parent(static_cast<std::size_t>(n), -1);
  std::vector<std::int32_t> toppled_at(static_cast<std::size_t>(n), -1);
  HeightConfig h = z;

  std::vector<std::int32_t> touched;
  for (int b = 0; b < g.num_boundary(); ++b) {
    const int v = g.boundary_site(b);
    arrival[offset[v] + g.boundary_slot(b)] = 0;
    ++received[v];
    ++h[v];
    touched.push_back(v);
  }

  std::vector<std::int32_t> unstable;
  for (std::int32_t t = 1; !touched.empty(); ++t) {
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    unstable.clear();
    for (int v : touched) {
      if (h[v] < g.degree(v)) continue;
      if (toppled_at[v] >= 0) throw NotRecurrentError("site " + std::to_string(v) + " became unstable twice");
      unstable.push_back(v);
    }
    touched.clear();
    for (int v : unstable) {
      const int r = z[v] - (g.degree(v) - received[v]) + 1;
      int seen = 0;
      for (int i = 0; i < g.degree(v); ++i) {
        if (arrival[offset[v] + i] == t - 1 && ++seen == r) {
          parent[v] = i;
          const Slot& s = g.slot(v, i);
          colour[v] = s.kind == SlotKind::boundary ? s.target : colour[s.target];
          break;
        }
      }
      if (parent[v] < 0) throw NotRecurrentError("no inheriting grain at site " + std::to_string(v));
    }
    // Parallel toppling: every grain sent now arrives at step t.
    for (int v : unstable) {
      toppled_at[v] = t;
      h[v] -= g.degree(v);
      for (const Slot& s : g.slots(v)) {
        if (s.kind == SlotKind::self_loop) {
          ++h[v];
        } else if (s.kind == SlotKind::internal) {
          arrival[offset[s.target] + s.mate] = t;
          ++received[s.target];
          ++h[s.target];
          touched.push_back(s.target);
        }
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (toppled_at[v] < 0) throw NotRecurrentError("site " + std::to_string(v) + " never toppled");
  }
  if (h != z) throw NotRecurrentError("frame identity did not return the configuration");

  SpanningForest forest = complete_forest(g, std::move(parent));
  BoundaryPartition part = partition_from_forest(g, forest);
  if (part.label != colour) throw std::logic_error("colour inheritance disagrees with forest roots");
  return {std::move(part), std::move(forest)};
}

AvalancheRecord single_site_avalanche(const Graph& g, const HeightConfig& z, int b) {
  if (b < 0 || b >= g.num_boundary()) throw std::invalid_argument("boundary index out of range");
  Relaxer relaxer(g, z);
  relaxer.add_boundary_grain(b);
  return relaxer.relax();
}

BoundaryPartition partition_from_forest(const Graph& g, const SpanningForest& f) {
  BoundaryPartition p;
  p.label.assign(f.root.begin(), f.root.end());
  p.sizes = component_sizes(g, f);
  return p;
}

std::vector<std::int32_t> random_permutation(int n, RandomSource& rng) {
  std::vector<std::int32_t> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint32_t>(i + 1)));
    std::swap(sigma[i], sigma[j]);
  }
  return sigma;
}

namespace {

void require_lattice(const Graph& g) {
  if (g.geometry() == Geometry::custom) {
    throw std::invalid_argument("lattice observables need a square-lattice geometry");
  }
}

void require_partition(const Graph& g, const BoundaryPartition& p) {
  if (static_cast<int>(p.label.size()) != g.num_sites()) {
    throw std::invalid_argument("partition has wrong number of labels");
  }
}

}  // namespace

TriplePointReport extract_triple_points(const Graph& g, const BoundaryPartition& p) {
  require_lattice(g);
  require_partition(g, p);
  const int lx = g.lx();
  const int ly = g.ly();
  const bool periodic = g.geometry() != Geometry::open_rect;
  TriplePointReport report;
  for (int y = 1; y < ly; ++y) {
    for (int x = periodic ? 0 : 1; x < lx; ++x) {
      const int xl = x > 0 ? x - 1 : lx - 1;
      std::array<std::int32_t, 4> cells = {
          p.label[g.site_at(xl, y - 1)], p.label[g.site_at(x, y - 1)],
          p.label[g.site_at(xl, y)], p.label[g.site_at(x, y)]};
      std::sort(cells.begin(), cells.end());
      const auto end = std::unique(cells.begin(), cells.end());
      const auto distinct = end - cells.begin();
      if (distinct < 3) continue;
      TriplePoint tp{x, y, std::vector<std::int32_t>(cells.begin(), end)};
      (distinct == 3 ? report.triple : report.quad).push_back(std::move(tp));
    }
  }
  return report;
}

int interfaces_at_height(const Graph& g, const BoundaryPartition& p, int y) {
  require_lattice(g);
  require_partition(g, p);
  if (y < 1 || y >= g.ly()) {
    throw std::out_of_range("height " + std::to_string(y) + " outside [1, " + std::to_string(g.ly()) + ")");
  }
  const int row = y - 1;
  const int lx = g.lx();
  const bool periodic = g.geometry() != Geometry::open_rect;
  std::set<std::pair<std::int32_t, std::int32_t>> pairs;
  for (int x = 0; x < lx; ++x) {
    if (x + 1 == lx && !periodic) break;
    const auto a = p.label[g.site_at(x, row)];
    const auto b = p.label[g.site_at((x + 1) % lx, row)];
    if (a != b) pairs.emplace(std::min(a, b), std::max(a, b));
  }
  return static_cast<int>(pairs.size());
}

int count_nonempty(const BoundaryPartition& p) {
  return static_cast<int>(std::count_if(p.sizes.begin(), p.sizes.end(), [](std::int64_t s) { return s > 0; }));
}

bool is_simply_connected(const Graph& g, const std::vector<std::int32_t>& sites) {
  const int n = g.num_sites();
  std::vector<char> inside(static_cast<std::size_t>(n), 0);
  for (int v : sites) inside[v] = 1;
  // Flood the complement from every complement site touching the boundary.
  std::vector<char> reached(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (!inside[v] && g.boundary_count(v) > 0) {
      reached[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const Slot& s : g.slots(v)) {
      if (s.kind == SlotKind::internal && !inside[s.target] && !reached[s.target]) {
        reached[s.target] = 1;
        stack.push_back(s.target);
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!inside[v] && !reached[v]) return false;
  }
  return true;
}

}  // namespace avf
