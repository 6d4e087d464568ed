#include "avf/exact.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "avf/processes.hpp"

namespace avf {

std::vector<std::vector<std::int64_t>> reduced_laplacian(const Graph& g) {
  const int n = g.num_sites();
  std::vector<std::vector<std::int64_t>> m(static_cast<std::size_t>(n), std::vector<std::int64_t>(n, 0));
  for (int v = 0; v < n; ++v) {
    m[v][v] = g.degree(v) - g.self_loops(v);
    for (const Slot& s : g.slots(v)) {
      if (s.kind == SlotKind::internal) --m[v][s.target];
    }
  }
  return m;
}

std::int64_t integer_determinant(std::vector<std::vector<std::int64_t>> m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1;
  constexpr __int128 limit = static_cast<__int128>(1) << 62;
  std::int64_t sign = 1;
  __int128 prev = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      int p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        const __int128 num = static_cast<__int128>(m[i][j]) * m[k][k] - static_cast<__int128>(m[i][k]) * m[k][j];
        const __int128 val = num / prev;
        if (val > limit || val < -limit) throw NumericalError("determinant overflows 64-bit range");
        m[i][j] = static_cast<std::int64_t>(val);
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

std::int64_t reduced_laplacian_determinant(const Graph& g) { return integer_determinant(reduced_laplacian(g)); }

std::vector<HeightConfig> enumerate_recurrent(const Graph& g) {
  const int n = g.num_sites();
  double space = 1.0;
  for (int v = 0; v < n; ++v) space *= g.degree(v);
  if (space > static_cast<double>(kEnumerationGuard)) {
    throw GuardExceeded("stable-configuration space of " + std::to_string(space) + " exceeds the guard");
  }
  std::vector<HeightConfig> out;
  HeightConfig h(static_cast<std::size_t>(n), 0);
  for (;;) {
    if (is_recurrent(g, h)) out.push_back(h);
    int v = n - 1;
    while (v >= 0 && ++h[v] == g.degree(v)) h[v--] = 0;
    if (v < 0) break;
  }
  return out;
}

namespace {

// Union-find without path compression so unions can be undone.
class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(int n) : parent_(n), size_(n, 1), rooted_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int v) const {
    while (parent_[v] != v) v = parent_[v];
    return v;
  }
  bool rooted(int rep) const { return rooted_[rep] != 0; }
  void mark_root(int v) { rooted_[v] = 1; }
  void unite(int a, int b) {
    if (size_[a] < size_[b]) std::swap(a, b);
    history_.push_back({b, rooted_[a]});
    parent_[b] = a;
    size_[a] += size_[b];
    rooted_[a] = rooted_[a] | rooted_[b];
  }
  void undo() {
    const auto [b, was_rooted] = history_.back();
    history_.pop_back();
    const int a = parent_[b];
    parent_[b] = b;
    size_[a] -= size_[b];
    rooted_[a] = was_rooted;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<char> rooted_;
  std::vector<std::pair<int, char>> history_;
};

}  // namespace

void for_each_rooted_forest(int n, const std::vector<std::pair<int, int>>& edges, std::span<const int> roots,
                            const std::function<void(const std::vector<int>&)>& visit, std::int64_t guard) {
  RollbackUnionFind uf(n);
  for (int r : roots) {
    if (uf.rooted(r)) throw std::invalid_argument("duplicate root vertex");
    uf.mark_root(r);
  }
  const int need_total = n - static_cast<int>(roots.size());
  const int m = static_cast<int>(edges.size());
  std::vector<int> chosen;
  std::int64_t found = 0;

  const std::function<void(int, int)> rec = [&](int e, int need) {
    if (need == 0) {
      if (++found > guard) throw GuardExceeded("forest enumeration exceeds the guard");
      visit(chosen);
      return;
    }
    if (m - e < need) return;
    const int ra = uf.find(edges[e].first);
    const int rb = uf.find(edges[e].second);
    if (ra != rb && !(uf.rooted(ra) && uf.rooted(rb))) {
      uf.unite(ra, rb);
      chosen.push_back(e);
      rec(e + 1, need - 1);
      chosen.pop_back();
      uf.undo();
    }
    rec(e + 1, need);
  };
  if (need_total < 0) return;
  rec(0, need_total);
}

namespace {

// Internal edges keep their ids; boundary half-edge b becomes edge E + b
// joining its site to vertex V + b.
std::vector<std::pair<int, int>> extended_edges(const Graph& g) {
  std::vector<std::pair<int, int>> edges;
  for (int e = 0; e < g.num_edges(); ++e) edges.push_back(g.edge_ends(e));
  for (int b = 0; b < g.num_boundary(); ++b) edges.emplace_back(g.boundary_site(b), root_vertex(g, b));
  return edges;
}

SpanningForest orient_forest(const Graph& g, const std::vector<int>& chosen) {
  const int n = g.num_sites();
  const int ne = g.num_edges();
  const int total = n + g.num_boundary();
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(total));  // (vertex, edge)
  for (int e : chosen) {
    int a, b;
    if (e < ne) {
      std::tie(a, b) = g.edge_ends(e);
    } else {
      a = g.boundary_site(e - ne);
      b = root_vertex(g, e - ne);
    }
    adj[a].emplace_back(b, e);
    adj[b].emplace_back(a, e);
  }
  std::vector<std::int32_t> parent(static_cast<std::size_t>(n), -1);
  std::vector<int> stack;
  std::vector<char> seen(static_cast<std::size_t>(total), 0);
  for (int b = 0; b < g.num_boundary(); ++b) {
    seen[root_vertex(g, b)] = 1;
    stack.push_back(root_vertex(g, b));
  }
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& [v, e] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      stack.push_back(v);
      // v is a site whose parent edge is e.
      if (e >= ne) {
        parent[v] = g.boundary_slot(e - ne);
      } else {
        const auto slots = g.slots(v);
        for (int i = 0; i < static_cast<int>(slots.size()); ++i) {
          if (slots[i].kind == SlotKind::internal && slots[i].edge == e) parent[v] = i;
        }
      }
    }
  }
  return complete_forest(g, std::move(parent));
}

}  // namespace

ForestEnumeration enumerate_forests(const Graph& g) {
  std::int64_t det = 0;
  try {
    det = reduced_laplacian_determinant(g);
  } catch (const NumericalError&) {
    throw GuardExceeded("forest count overflows 64 bits, above the enumeration guard");
  }
  if (det > kEnumerationGuard) {
    throw GuardExceeded("graph has " + std::to_string(det) + " forests, above the enumeration guard");
  }
  ForestEnumeration out;
  out.forests.reserve(static_cast<std::size_t>(det));
  std::vector<int> roots;
  for (int b = 0; b < g.num_boundary(); ++b) roots.push_back(root_vertex(g, b));
  for_each_rooted_forest(g.num_sites() + g.num_boundary(), extended_edges(g), roots,
                         [&](const std::vector<int>& chosen) {
                           SpanningForest f = orient_forest(g, chosen);
                           ++out.size_multiset[component_sizes(g, f)];
                           out.forests.push_back(std::move(f));
                         });
  return out;
}

namespace {

int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    while (p[i] != i) {
      std::swap(p[i], p[p[i]]);
      sign = -sign;
    }
  }
  return sign;
}

}  // namespace

std::int64_t signed_forest_sum(const Graph& g, std::span<const int> roots, std::span<const int> us,
                               std::span<const int> vs) {
  const int total = g.num_sites() + g.num_boundary();
  if (us.size() != vs.size()) throw std::invalid_argument("U and V must have equal length");
  const auto check = [&](std::span<const int> list, const char* name) {
    std::set<int> seen;
    for (int v : list) {
      if (v < 0 || v >= total) throw std::invalid_argument(std::string(name) + " vertex out of range");
      if (!seen.insert(v).second) throw std::invalid_argument(std::string(name) + " has repeated vertices");
    }
  };
  check(roots, "R");
  check(us, "U");
  check(vs, "V");
  for (int r : roots) {
    if (std::find(us.begin(), us.end(), r) != us.end()) throw std::invalid_argument("R and U overlap");
    if (std::find(vs.begin(), vs.end(), r) != vs.end()) throw std::invalid_argument("R and V overlap");
  }
  std::vector<int> all_roots(roots.begin(), roots.end());
  all_roots.insert(all_roots.end(), us.begin(), us.end());
  const auto edges = extended_edges(g);

  std::int64_t sum = 0;
  for_each_rooted_forest(total, edges, all_roots, [&](const std::vector<int>& chosen) {
    // Component label of every vertex under this forest.
    std::vector<int> comp(static_cast<std::size_t>(total));
    std::iota(comp.begin(), comp.end(), 0);
    const std::function<int(int)> find = [&](int v) { return comp[v] == v ? v : comp[v] = find(comp[v]); };
    for (int e : chosen) comp[find(edges[e].first)] = find(edges[e].second);
    std::vector<int> owner(us.size(), -1);  // owner[j] = i with v_j ~ u_i
    std::vector<char> used(us.size(), 0);
    for (std::size_t j = 0; j < vs.size(); ++j) {
      for (std::size_t i = 0; i < us.size(); ++i) {
        if (find(vs[j]) == find(us[i])) owner[j] = static_cast<int>(i);
      }
      if (owner[j] < 0 || used[owner[j]]) return;
      used[owner[j]] = 1;
    }
    sum += permutation_sign(owner);
  });
  return sum;
}

EquivalenceReport verify_process_equivalence(const Graph& g, const std::vector<std::vector<std::int32_t>>& sigmas) {
  EquivalenceReport rep;
  // Enumerations first so oversized graphs hit the guard, not an overflow.
  const auto recurrent = enumerate_recurrent(g);
  const auto forests = enumerate_forests(g);
  rep.determinant = reduced_laplacian_determinant(g);
  rep.recurrent_count = static_cast<std::int64_t>(recurrent.size());
  rep.forest_count = static_cast<std::int64_t>(forests.forests.size());
  rep.forest_multiset = forests.size_multiset;
  rep.sigmas = sigmas;

  std::ostringstream why;
  // Bijection: forest_to_config hits every recurrent config once and the
  // burning test inverts it.
  std::set<HeightConfig> images;
  bool bijection = true;
  for (const auto& f : forests.forests) {
    HeightConfig h = forest_to_config(g, f);
    const auto back = burning_test(g, h);
    if (!back || back->parent_slot != f.parent_slot) {
      bijection = false;
      if (why.str().empty()) why << "burning test does not invert forest_to_config";
    }
    images.insert(std::move(h));
  }
  if (images != std::set<HeightConfig>(recurrent.begin(), recurrent.end())) {
    bijection = false;
    if (why.str().empty()) why << "forest images differ from the recurrent set";
  }
  rep.bijection_ok = bijection;

  bool pass = bijection && rep.recurrent_count == rep.determinant && rep.forest_count == rep.determinant;
  if (why.str().empty() && !pass) {
    why << "counts disagree: det=" << rep.determinant << " recurrent=" << rep.recurrent_count
        << " forests=" << rep.forest_count;
  }
  for (const auto& sigma : sigmas) {
    SizeMultiset m;
    for (const auto& z : recurrent) ++m[permutation_process(g, z, sigma).first.sizes];
    if (m != rep.forest_multiset) {
      pass = false;
      if (why.str().empty()) {
        why << "sigma [";
        for (std::size_t i = 0; i < sigma.size(); ++i) why << (i ? "," : "") << sigma[i];
        why << "] gives " << format_multiset(m) << " but forests give " << format_multiset(rep.forest_multiset);
      }
    }
    rep.sigma_multisets.push_back(std::move(m));
  }
  rep.pass = pass;
  rep.counterexample = why.str();
  return rep;
}

std::string format_multiset(const SizeMultiset& m) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  // Descending lexicographic order reads like (3,0), (2,1), ...
  for (auto it = m.rbegin(); it != m.rend(); ++it) {
    if (!first) os << ',';
    first = false;
    os << '(';
    for (std::size_t i = 0; i < it->first.size(); ++i) os << (i ? "," : "") << it->first[i];
    os << "):" << it->second;
  }
  os << '}';
  return os.str();
}

Graph random_oracle_graph(RandomSource& rng, int max_sites) {
  CustomGraphSpec spec;
  spec.sites = 1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(max_sites)));
  for (int v = 1; v < spec.sites; ++v) spec.edges.emplace_back(static_cast<int>(rng.below(v)), v);
  const int extra = static_cast<int>(rng.below(static_cast<std::uint32_t>(spec.sites) + 1));
  for (int k = 0; k < extra && spec.sites > 1; ++k) {
    const int a = static_cast<int>(rng.below(spec.sites));
    int b = static_cast<int>(rng.below(spec.sites - 1));
    if (b >= a) ++b;
    spec.edges.emplace_back(a, b);
  }
  const int boundary = 1 + static_cast<int>(rng.below(3));
  for (int k = 0; k < boundary; ++k) spec.boundary.push_back(static_cast<int>(rng.below(spec.sites)));
  if (rng.below(4) == 0) spec.selfloops.push_back(static_cast<int>(rng.below(spec.sites)));
  return build_custom(spec);
}

RuvInstance random_ruv_instance(const Graph& g, RandomSource& rng, int k) {
  const int total = g.num_sites() + g.num_boundary();
  if (k < 0 || 2 * k + 1 > total) throw std::invalid_argument("extended graph too small for the requested |U|");
  std::vector<int> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  RuvInstance inst;
  const int free_after_u = total - k;
  const int r = 1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(std::min(2, free_after_u - k))));
  inst.roots.assign(order.begin(), order.begin() + r);
  inst.us.assign(order.begin() + r, order.begin() + r + k);
  // V is drawn from all non-root vertices and may overlap U.
  std::vector<int> rest(order.begin() + r, order.end());
  std::shuffle(rest.begin(), rest.end(), rng);
  inst.vs.assign(rest.begin(), rest.begin() + k);
  return inst;
}

}  // namespace avf
