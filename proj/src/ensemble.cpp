#include "avf/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "avf/processes.hpp"
#include "avf/wilson.hpp"

namespace avf {

std::string_view to_string(ProcessKind p) {
  switch (p) {
    case ProcessKind::permutation: return "permutation";
    case ProcessKind::bt: return "bt";
    case ProcessKind::single_site: return "single-site";
  }
  return "?";
}

ProcessKind parse_process(std::string_view name) {
  if (name == "permutation") return ProcessKind::permutation;
  if (name == "bt") return ProcessKind::bt;
  if (name == "single-site") return ProcessKind::single_site;
  throw std::invalid_argument("unknown process '" + std::string(name) + "'");
}

std::int64_t bottom_label_changes(const Graph& g, const BoundaryPartition& p) {
  const int lx = g.lx();
  const bool periodic = g.geometry() == Geometry::cylinder || g.geometry() == Geometry::folded_cylinder;
  std::int64_t c = 0;
  for (int x = 0; x + 1 < lx; ++x) c += p.label[x] != p.label[x + 1];
  if (periodic && lx > 1) c += p.label[lx - 1] != p.label[0];
  return c;
}

namespace {

struct Partial {
  std::vector<std::int64_t> triple, quad, interfaces;
};

struct RealizationSlot {
  std::vector<SizeRecord> records;
  RealizationGeometry geometry;
  std::optional<io::PartitionSnapshot> snapshot;
};

}  // namespace

EnsembleResult run_ensemble(const EnsembleConfig& config, const Graph& g) {
  if (config.samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (config.workers < 1) throw std::invalid_argument("workers must be >= 1");
  const bool full = config.process != ProcessKind::single_site;
  const bool lattice = g.geometry() != Geometry::custom;
  const bool analyse = config.geometry_analysis && full && lattice;
  const int heights = lattice ? g.ly() + 1 : 0;

  std::vector<RealizationSlot> slots(static_cast<std::size_t>(config.samples));
  std::vector<Partial> partials(static_cast<std::size_t>(config.workers));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto work = [&](int worker) {
    Partial& acc = partials[worker];
    if (analyse) {
      acc.triple.assign(heights, 0);
      acc.quad.assign(heights, 0);
      acc.interfaces.assign(heights, 0);
    }
    try {
      for (std::int64_t i = next++; i < config.samples; i = next++) {
        RandomSource rng = RandomSource::stream(config.seed, static_cast<std::uint64_t>(i));
        RealizationSlot& slot = slots[i];
        const HeightConfig z = sample_recurrent_config(g, rng);
        if (!full) {
          const int b = static_cast<int>(rng.below(static_cast<std::uint32_t>(g.num_boundary())));
          slot.records.push_back({i, b, single_site_avalanche(g, z, b).size()});
          continue;
        }
        BoundaryPartition p;
        std::vector<std::int32_t> sigma;
        if (config.process == ProcessKind::bt) {
          p = bt_process(g, z).first;
        } else {
          sigma = random_permutation(g.num_boundary(), rng);
          p = permutation_process(g, z, sigma).first;
        }
        for (int b = 0; b < g.num_boundary(); ++b) slot.records.push_back({i, b, p.sizes[b]});
        if (analyse) {
          const TriplePointReport tp = extract_triple_points(g, p);
          for (const TriplePoint& t : tp.triple) ++acc.triple[t.y];
          for (const TriplePoint& t : tp.quad) ++acc.quad[t.y];
          for (int y = 1; y < g.ly(); ++y) acc.interfaces[y] += interfaces_at_height(g, p, y);
          slot.geometry = {static_cast<std::int64_t>(tp.triple.size()), static_cast<std::int64_t>(tp.quad.size()),
                           count_nonempty(p), bottom_label_changes(g, p)};
        }
        if (lattice && i < config.snapshots) {
          slot.snapshot = io::PartitionSnapshot{g.geometry(), g.lx(), g.ly(), i, p.label, sigma};
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = config.samples;
    }
  };

  if (config.workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < config.workers; ++w) pool.emplace_back(work, w);
  }
  if (failure) std::rethrow_exception(failure);

  EnsembleResult result;
  SizeSample& s = result.sample;
  s.geometry = g.geometry();
  s.lx = g.lx();
  s.ly = g.ly();
  s.sites = g.num_sites();
  s.boundary = g.num_boundary();
  s.realizations = config.samples;
  s.seed = config.seed;
  s.process = std::string(to_string(config.process));
  for (RealizationSlot& slot : slots) {
    s.records.insert(s.records.end(), slot.records.begin(), slot.records.end());
    if (analyse) result.per_realization.push_back(slot.geometry);
    if (slot.snapshot) result.snapshots.push_back(std::move(*slot.snapshot));
  }
  if (analyse) {
    result.triple_by_height.assign(heights, 0);
    result.quad_by_height.assign(heights, 0);
    result.interfaces_by_height.assign(heights, 0);
    for (const Partial& p : partials) {
      if (p.triple.empty()) continue;
      for (int y = 0; y < heights; ++y) {
        result.triple_by_height[y] += p.triple[y];
        result.quad_by_height[y] += p.quad[y];
        result.interfaces_by_height[y] += p.interfaces[y];
      }
    }
  }
  return result;
}

EnsembleResult run_ensemble(const EnsembleConfig& config) {
  return run_ensemble(config, build_geometry(config.geometry, config.lx, config.ly));
}

}  // namespace avf
