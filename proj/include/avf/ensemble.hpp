#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avf/graph.hpp"
#include "avf/io.hpp"
#include "avf/stats.hpp"

namespace avf {

enum class ProcessKind { permutation, bt, single_site };
std::string_view to_string(ProcessKind p);
ProcessKind parse_process(std::string_view name);

struct EnsembleConfig {
  Geometry geometry = Geometry::folded_cylinder;
  int lx = 16;
  int ly = 16;
  ProcessKind process = ProcessKind::bt;
  std::int64_t samples = 1;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Accumulate triple points and interface counts per height (lattice
  /// geometries, full-partition processes only).
  bool geometry_analysis = false;
  /// Keep the partitions of the first `snapshots` realizations.
  int snapshots = 0;
};

/// Per-realization topological counts of a full partition. On the
/// cylinders, triple + 2 quad = 2 nonempty - changes - 2 whenever the
/// polyominoes are simply connected and one of them wraps around.
struct RealizationGeometry {
  std::int64_t triple = 0;
  std::int64_t quad = 0;
  std::int64_t nonempty = 0;
  std::int64_t changes = 0;  // label changes along the open bottom row, cyclic
};

struct EnsembleResult {
  SizeSample sample;
  /// Sums over realizations, indexed by vertex height (triple points) or by
  /// 1-based face row (interfaces).
  std::vector<std::int64_t> triple_by_height;
  std::vector<std::int64_t> quad_by_height;
  std::vector<std::int64_t> interfaces_by_height;
  std::vector<RealizationGeometry> per_realization;
  std::vector<io::PartitionSnapshot> snapshots;
};

/// Runs `samples` independent realizations. Realization i draws everything
/// from RandomSource::stream(seed, i) and results are merged in index
/// order, so the output does not depend on `workers`.
///
/// permutation: uniform recurrent z, uniform sigma, B sizes.
/// bt: uniform recurrent z, BT process, B sizes.
/// single-site: uniform recurrent z, uniform boundary half-edge b, 1 size.
EnsembleResult run_ensemble(const EnsembleConfig& config, const Graph& g);
EnsembleResult run_ensemble(const EnsembleConfig& config);

/// Label changes between cyclically adjacent cells of the bottom row.
std::int64_t bottom_label_changes(const Graph& g, const BoundaryPartition& p);

}  // namespace avf
