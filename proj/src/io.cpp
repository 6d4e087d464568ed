#include "avf/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>

namespace avf::io {

namespace {

int require_int(const json& j, const char* field) {
  if (!j.contains(field)) throw GeometryError(std::string("custom graph: missing field '") + field + "'");
  if (!j[field].is_number_integer()) throw GeometryError(std::string("custom graph: '") + field + "' must be an integer");
  return j[field].get<int>();
}

std::vector<int> int_list(const json& j, const char* field) {
  if (!j.contains(field)) return {};
  if (!j[field].is_array()) throw GeometryError(std::string("custom graph: '") + field + "' must be an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < j[field].size(); ++i) {
    const json& e = j[field][i];
    if (!e.is_number_integer()) {
      throw GeometryError(std::string("custom graph: ") + field + "[" + std::to_string(i) + "] must be an integer");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace

CustomGraphSpec custom_graph_from_json(const json& j) {
  if (!j.is_object()) throw GeometryError("custom graph: top level must be an object");
  CustomGraphSpec spec;
  spec.sites = require_int(j, "sites");
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw GeometryError("custom graph: 'edges' must be an array");
    for (std::size_t i = 0; i < j["edges"].size(); ++i) {
      const json& e = j["edges"][i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        throw GeometryError("custom graph: edges[" + std::to_string(i) + "] must be a pair of integers");
      }
      spec.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  spec.boundary = int_list(j, "boundary");
  spec.selfloops = int_list(j, "selfloops");
  return spec;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Graph load_custom_graph(const std::filesystem::path& path) { return build_custom(custom_graph_from_json(read_json(path))); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json int_array_json(const std::vector<std::int32_t>& values) { return json(values); }

void write_int32_binary(const std::filesystem::path& path, const std::vector<std::int32_t>& values) {
  std::string bytes;
  bytes.reserve(values.size() * 4);
  for (std::int32_t v : values) {
    const auto u = static_cast<std::uint32_t>(v);
    for (int k = 0; k < 4; ++k) bytes.push_back(static_cast<char>((u >> (8 * k)) & 0xff));
  }
  write_text(path, bytes);
}

std::vector<std::int32_t> read_int32_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 4 != 0) throw IoError(path.string() + ": length is not a multiple of 4 bytes");
  std::vector<std::int32_t> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t u = 0;
    for (int k = 0; k < 4; ++k) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + k])) << (8 * k);
    out[i] = static_cast<std::int32_t>(u);
  }
  return out;
}

json config_to_json(const Graph& g, const HeightConfig& h) {
  return {{"geometry", std::string(to_string(g.geometry()))}, {"lx", g.lx()}, {"ly", g.ly()}, {"heights", h}};
}

HeightConfig config_from_json(const json& j) {
  if (!j.contains("heights") || !j["heights"].is_array()) throw IoError("configuration: missing 'heights' array");
  return j["heights"].get<HeightConfig>();
}

json snapshot_to_json(const PartitionSnapshot& s) {
  return {{"geometry", std::string(to_string(s.geometry))},
          {"lx", s.lx},
          {"ly", s.ly},
          {"realization", s.realization},
          {"labels", s.labels},
          {"sigma", s.sigma}};
}

PartitionSnapshot snapshot_from_json(const json& j) {
  PartitionSnapshot s;
  try {
    s.geometry = parse_geometry(j.at("geometry").get<std::string>());
    s.lx = j.at("lx").get<int>();
    s.ly = j.at("ly").get<int>();
    s.realization = j.value("realization", std::int64_t{0});
    s.labels = j.at("labels").get<std::vector<std::int32_t>>();
    s.sigma = j.value("sigma", std::vector<std::int32_t>{});
  } catch (const json::exception& e) {
    throw IoError(std::string("partition snapshot: ") + e.what());
  }
  if (s.lx <= 0 || s.ly <= 0 || static_cast<std::int64_t>(s.labels.size()) != static_cast<std::int64_t>(s.lx) * s.ly) {
    throw IoError("partition snapshot: labels do not fill an lx by ly grid");
  }
  return s;
}

std::string sizes_csv(const SizeSample& s) {
  std::vector<SizeRecord> rows = s.records;
  std::sort(rows.begin(), rows.end(), [](const SizeRecord& a, const SizeRecord& b) {
    return std::tie(a.realization, a.boundary_edge, a.size) < std::tie(b.realization, b.boundary_edge, b.size);
  });
  std::string out = "realization,boundaryEdge,size\n";
  out.reserve(rows.size() * 16);
  for (const SizeRecord& r : rows) {
    out += std::to_string(r.realization);
    out += ',';
    out += std::to_string(r.boundary_edge);
    out += ',';
    out += std::to_string(r.size);
    out += '\n';
  }
  return out;
}

std::vector<SizeRecord> parse_sizes_csv(const std::string& text) {
  std::vector<SizeRecord> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("realization")) continue;
    std::int64_t fields[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 3; ++k) {
      const auto [next, ec] = std::from_chars(p, end, fields[k]);
      if (ec != std::errc{} || (k < 2 && (next == end || *next != ',')) || (k == 2 && next != end)) {
        throw IoError("sizes.csv line " + std::to_string(line_no) + ": expected realization,boundaryEdge,size");
      }
      p = next + 1;
    }
    if (fields[1] < 0 || fields[2] < 0) throw IoError("sizes.csv line " + std::to_string(line_no) + ": negative value");
    out.push_back({fields[0], static_cast<std::int32_t>(fields[1]), fields[2]});
  }
  return out;
}

json sample_metadata_json(const SizeSample& s) {
  return {{"geometry", std::string(to_string(s.geometry))},
          {"lx", s.lx},
          {"ly", s.ly},
          {"sites", s.sites},
          {"boundary_edges", s.boundary},
          {"realizations", s.realizations},
          {"seed", s.seed},
          {"process", s.process}};
}

void apply_sample_metadata(const json& j, SizeSample& s) {
  try {
    s.geometry = parse_geometry(j.at("geometry").get<std::string>());
    s.lx = j.at("lx").get<int>();
    s.ly = j.at("ly").get<int>();
    s.sites = j.at("sites").get<std::int64_t>();
    s.boundary = j.at("boundary_edges").get<std::int64_t>();
    s.realizations = j.at("realizations").get<std::int64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.process = j.at("process").get<std::string>();
  } catch (const json::exception& e) {
    throw IoError(std::string("run metadata: ") + e.what());
  }
}

json fit_json(const TailFit& f) {
  return {{"gammaHat", f.gamma_hat},
          {"window", {f.window.n_min, f.window.n_max}},
          {"stderr", f.std_error},
          {"method", f.method},
          {"used", f.used},
          {"rankSlope", f.rank_slope},
          {"rankGamma", f.rank_gamma}};
}

std::string profile_csv(const RankProfile& p) {
  std::ostringstream out;
  out.precision(10);
  out << "k,mean,rescaled\n";
  for (std::size_t k = 0; k < p.mean.size(); ++k) out << k + 1 << ',' << p.mean[k] << ',' << p.rescaled[k] << '\n';
  return out.str();
}

std::string green_csv(const GreenTable& t) {
  const Graph& g = t.graph();
  std::ostringstream out;
  out.precision(17);
  out << "site,boundaryEdge,value\n";
  for (int u = 0; u < g.num_sites(); ++u) {
    for (int b = 0; b < g.num_boundary(); ++b) out << u << ',' << b << ',' << t.boundary(u, b) << '\n';
  }
  return out.str();
}

json equivalence_json(const EquivalenceReport& r) {
  const auto multiset = [](const SizeMultiset& m) {
    json arr = json::array();
    for (auto it = m.rbegin(); it != m.rend(); ++it) arr.push_back({{"sizes", it->first}, {"count", it->second}});
    return arr;
  };
  json j = {{"pass", r.pass},
            {"determinant", r.determinant},
            {"recurrentCount", r.recurrent_count},
            {"forestCount", r.forest_count},
            {"bijection", r.bijection_ok},
            {"forestMultiset", multiset(r.forest_multiset)},
            {"multiset", format_multiset(r.forest_multiset)}};
  json per_sigma = json::array();
  for (std::size_t i = 0; i < r.sigmas.size(); ++i) {
    per_sigma.push_back({{"sigma", r.sigmas[i]},
                         {"multiset", multiset(r.sigma_multisets[i])},
                         {"equal", r.sigma_multisets[i] == r.forest_multiset}});
  }
  j["sigmas"] = per_sigma;
  if (!r.counterexample.empty()) j["counterexample"] = r.counterexample;
  return j;
}

}  // namespace avf::io
