#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "avf/graph.hpp"
#include "avf/random.hpp"
#include "avf/sandpile.hpp"

namespace avf {

/// Partition of the sites into polyominoes labelled by boundary half-edge.
struct BoundaryPartition {
  std::vector<std::int32_t> label;  // site -> boundary index
  std::vector<std::int64_t> sizes;  // boundary index -> |P_b|, possibly 0

  bool operator==(const BoundaryPartition&) const = default;
};

/// Lattice vertex (x, y) where cells [x-1,x]x[y-1,y] ... [x,x+1]x[y,y+1] meet.
struct TriplePoint {
  int x = 0;
  int y = 0;
  std::vector<std::int32_t> labels;  // distinct labels, ascending
};

struct TriplePointReport {
  std::vector<TriplePoint> triple;  // exactly three distinct labels
  std::vector<TriplePoint> quad;    // four distinct labels, reported apart
};

struct ProcessTrace {
  std::vector<std::int32_t> sigma;
  std::vector<AvalancheRecord> avalanches;  // avalanches[k] caused by sigma[k]
  HeightConfig final_config;
};

/// Adds the grains of Id_f one boundary half-edge at a time in sigma order,
/// relaxing after each. Throws NotRecurrentError when a site topples more
/// than once overall or the final configuration differs from z.
std::pair<BoundaryPartition, ProcessTrace> permutation_process(const Graph& g, const HeightConfig& z,
                                                               const std::vector<std::int32_t>& sigma);

/// Adds the whole Id_f, relaxes in parallel steps and propagates boundary
/// colours: a site that becomes unstable after the grains arriving at step
/// t-1 inherits the colour of the r-th of those grains (in O(v)), with
/// r = z(v) - (d(v) - grains received) + 1. The inheritance edges form the
/// burning-test forest of z.
std::pair<BoundaryPartition, SpanningForest> bt_process(const Graph& g, const HeightConfig& z);

/// One grain at the site of boundary half-edge b, then relaxation.
AvalancheRecord single_site_avalanche(const Graph& g, const HeightConfig& z, int b);

BoundaryPartition partition_from_forest(const Graph& g, const SpanningForest& f);

/// Uniformly random permutation of 0..B-1.
std::vector<std::int32_t> random_permutation(int n, RandomSource& rng);

/// Vertices with three (and four) distinct incident labels. Lattice
/// geometries only; vertices on an open or folded edge have fewer than four
/// incident cells and are skipped.
TriplePointReport extract_triple_points(const Graph& g, const BoundaryPartition& p);

/// Number of distinct unordered label pairs {i, j} on horizontally adjacent
/// cells of face row y, counted 1-based from the open bottom edge
/// (1 <= y < Ly). These are the interfaces crossing the mid-line of row y.
int interfaces_at_height(const Graph& g, const BoundaryPartition& p, int y);

/// Number of non-empty polyominoes.
int count_nonempty(const BoundaryPartition& p);

/// True when the sites outside `sites` contain no component that is cut off
/// from both the boundary and the open outside by `sites`.
bool is_simply_connected(const Graph& g, const std::vector<std::int32_t>& sites);

}  // namespace avf
