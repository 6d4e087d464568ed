#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "avf/exact.hpp"
#include "avf/graph.hpp"
#include "avf/greens.hpp"
#include "avf/processes.hpp"
#include "avf/sandpile.hpp"
#include "avf/stats.hpp"

namespace avf::io {

using nlohmann::json;

/// I/O failure or malformed input file.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// {"sites": N, "edges": [[u,v],...], "boundary": [site,...],
///  "selfloops": [site,...]}, 0-based. Errors name the offending field.
CustomGraphSpec custom_graph_from_json(const json& j);
Graph load_custom_graph(const std::filesystem::path& path);

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Flat row-major int32 arrays, as JSON or as little-endian binary.
json int_array_json(const std::vector<std::int32_t>& values);
void write_int32_binary(const std::filesystem::path& path, const std::vector<std::int32_t>& values);
std::vector<std::int32_t> read_int32_binary(const std::filesystem::path& path);

json config_to_json(const Graph& g, const HeightConfig& h);
HeightConfig config_from_json(const json& j);

/// Partition snapshot: labels plus the sigma order used for colouring.
struct PartitionSnapshot {
  Geometry geometry = Geometry::custom;
  int lx = 0;
  int ly = 0;
  std::int64_t realization = 0;
  std::vector<std::int32_t> labels;
  std::vector<std::int32_t> sigma;  // empty: boundary index order
};
json snapshot_to_json(const PartitionSnapshot& s);
PartitionSnapshot snapshot_from_json(const json& j);

/// realization,boundaryEdge,size sorted by (realization, boundaryEdge).
std::string sizes_csv(const SizeSample& s);
std::vector<SizeRecord> parse_sizes_csv(const std::string& text);

json sample_metadata_json(const SizeSample& s);
/// Fills the metadata fields of `s` (records untouched).
void apply_sample_metadata(const json& j, SizeSample& s);

json fit_json(const TailFit& f);
std::string profile_csv(const RankProfile& p);
/// site,boundaryEdge,value for every site and boundary half-edge.
std::string green_csv(const GreenTable& t);
json equivalence_json(const EquivalenceReport& r);

}  // namespace avf::io
