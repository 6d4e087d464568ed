#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "avf/error.hpp"

namespace avf {

enum class Geometry { open_rect, cylinder, folded_cylinder, custom };

std::string_view to_string(Geometry g);
Geometry parse_geometry(std::string_view name);

enum class SlotKind : std::uint8_t { boundary, internal, self_loop };

/// One incident edge instance of a site, as seen from that site.
///
/// For `internal` slots `target` is the far site and `mate` the index of the
/// same edge instance in the far site's slot list. For `boundary` slots
/// `target` is the boundary half-edge index. Self-loops carry `target` equal
/// to the owning site.
struct Slot {
  SlotKind kind;
  std::int32_t target;
  std::int32_t edge;  // internal edge id, boundary index, or -1
  std::int32_t mate;  // internal only, otherwise -1
};

/// Grains per site of the frame identity: one per boundary half-edge.
struct FrameIdentity {
  std::vector<std::int32_t> grains;
  std::int64_t total = 0;
};

/// Finite multigraph with boundary half-edges and per-site edge orderings.
///
/// The slot list of each site is its total order O(v) on incident edge
/// instances; the threshold d(v) is the length of that list. Immutable after
/// construction.
class Graph {
 public:
  Graph() = default;

  int num_sites() const { return static_cast<int>(offsets_.size()) - 1; }
  int num_boundary() const { return static_cast<int>(boundary_site_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const Slot> slots(int v) const {
    return {slots_.data() + offsets_[v], static_cast<std::size_t>(degree(v))};
  }
  const Slot& slot(int v, int i) const { return slots_[offsets_[v] + i]; }

  int boundary_site(int b) const { return boundary_site_[b]; }
  /// Position of boundary half-edge b inside O(boundary_site(b)).
  int boundary_slot(int b) const { return boundary_slot_[b]; }
  std::pair<int, int> edge_ends(int e) const { return edges_[e]; }

  int boundary_count(int v) const { return boundary_count_[v]; }
  int self_loops(int v) const { return self_loops_[v]; }

  Geometry geometry() const { return geometry_; }
  int lx() const { return lx_; }
  int ly() const { return ly_; }
  /// Row-major site index for the lattice geometries.
  int site_at(int x, int y) const { return y * lx_ + x; }

  FrameIdentity frame_identity() const;

  /// Copy of the graph with O(v) permuted: new slot i of v is old slot
  /// order[v][i]. Used to test independence from the edge ordering.
  Graph with_ordering(const std::vector<std::vector<int>>& order) const;

  friend class GraphBuilder;

 private:
  void finalize();

  std::vector<int> offsets_{0};
  std::vector<Slot> slots_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> boundary_site_;
  std::vector<int> boundary_slot_;
  std::vector<int> boundary_count_;
  std::vector<int> self_loops_;
  Geometry geometry_ = Geometry::custom;
  int lx_ = 0;
  int ly_ = 0;
};

/// Explicit site/edge/boundary description, indices 0-based.
struct CustomGraphSpec {
  int sites = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> boundary;
  std::vector<int> selfloops;
};

Graph build_open_rect(int lx, int ly);
Graph build_cylinder(int lx, int ly);
Graph build_folded_cylinder(int lx, int ly);
Graph build_custom(const CustomGraphSpec& spec);
Graph build_geometry(Geometry g, int lx, int ly);

/// Three sites, a double edge 0-1, an edge 1-2, one boundary half-edge at
/// sites 0 and 2. Thresholds (3,3,2); seven recurrent configurations.
Graph figure1_graph();

/// True iff every site can reach a boundary half-edge along internal edges.
bool is_connected_to_boundary(const Graph& g);

}  // namespace avf
