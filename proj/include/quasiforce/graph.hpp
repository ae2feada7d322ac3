#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "quasiforce/error.hpp"

namespace qforce {

using Edge = std::pair<int, int>;

/// Finite simple graph: no loops, no parallel edges, vertices 0..n-1.
/// Edges are kept sorted with u < v, set semantics.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n, std::vector<Edge> edges = {}) : n_(n) {
    if (n < 0) fail(ErrorKind::UsageError, "negative vertex count");
    edges_.reserve(edges.size());
    for (auto [u, v] : edges) add_edge(u, v);
  }

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  void add_edge(int u, int v) {
    if (u == v) fail(ErrorKind::UsageError, "loop edge");
    if (u > v) std::swap(u, v);
    if (u < 0 || v >= n_) fail(ErrorKind::UsageError, "edge endpoint out of range");
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{u, v});
    if (it != edges_.end() && *it == Edge{u, v}) return;  // set semantics
    edges_.insert(it, {u, v});
  }

  bool has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
  }

  std::vector<std::vector<int>> adjacency_lists() const {
    std::vector<std::vector<int>> adj(n_);
    for (auto [u, v] : edges_) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    return adj;
  }

  std::vector<int> degrees() const {
    std::vector<int> d(n_, 0);
    for (auto [u, v] : edges_) {
      d[u]++;
      d[v]++;
    }
    return d;
  }

  /// Subgraph induced on `keep` (order preserved, vertices relabeled 0..k-1).
  Graph induced(const std::vector<int>& keep) const {
    std::vector<int> pos(n_, -1);
    for (std::size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = static_cast<int>(i);
    Graph g(static_cast<int>(keep.size()));
    for (auto [u, v] : edges_)
      if (pos[u] >= 0 && pos[v] >= 0) g.add_edge(pos[u], pos[v]);
    return g;
  }

  Graph without_edge(int u, int v) const {
    Graph g(n_);
    for (auto [a, b] : edges_)
      if (!((a == u && b == v) || (a == v && b == u))) g.add_edge(a, b);
    return g;
  }

  Graph relabeled(const std::vector<int>& perm) const {
    Graph g(n_);
    for (auto [u, v] : edges_) g.add_edge(perm[u], perm[v]);
    return g;
  }

  /// Connected components as vertex lists (isolated vertices are singletons).
  std::vector<std::vector<int>> components() const {
    std::vector<std::vector<int>> out;
    std::vector<int> comp(n_, -1);
    auto adj = adjacency_lists();
    for (int s = 0; s < n_; ++s) {
      if (comp[s] >= 0) continue;
      std::vector<int> stack{s}, verts;
      comp[s] = static_cast<int>(out.size());
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        verts.push_back(v);
        for (int w : adj[v])
          if (comp[w] < 0) {
            comp[w] = comp[s];
            stack.push_back(w);
          }
      }
      std::sort(verts.begin(), verts.end());
      out.push_back(std::move(verts));
    }
    return out;
  }

  bool operator==(const Graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

// -- named small graphs -------------------------------------------------------

inline Graph complete_graph(int k) {
  Graph g(k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) g.add_edge(i, j);
  return g;
}

inline Graph cycle_graph(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

inline Graph path_graph(int n) {
  Graph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

inline Graph empty_graph(int n) { return Graph(n); }

// -- rooted graphs ------------------------------------------------------------

/// Graph with grouped roots: the roots are the first s_1 + ... + s_q vertices,
/// group i occupying a consecutive block of size s_i.
struct RootedGraph {
  Graph graph;
  std::vector<int> group_sizes;

  RootedGraph() = default;
  RootedGraph(Graph g, std::vector<int> groups) : graph(std::move(g)), group_sizes(std::move(groups)) {
    if (root_count() > graph.vertex_count())
      fail(ErrorKind::UsageError, "more roots than vertices");
    for (int s : group_sizes)
      if (s < 0) fail(ErrorKind::UsageError, "negative group size");
  }

  int root_count() const {
    return std::accumulate(group_sizes.begin(), group_sizes.end(), 0);
  }
  int nonroot_count() const { return graph.vertex_count() - root_count(); }

  /// First vertex id of group g.
  int group_offset(int g) const {
    return std::accumulate(group_sizes.begin(), group_sizes.begin() + g, 0);
  }

  Graph root_induced_subgraph() const {
    std::vector<int> roots(root_count());
    std::iota(roots.begin(), roots.end(), 0);
    return graph.induced(roots);
  }
};

/// 1-rooted K2 (root plus a pendant vertex); the degree gadget.
inline RootedGraph k2_rooted() { return RootedGraph(path_graph(2), {1}); }
/// 1-rooted single vertex.
inline RootedGraph k1_rooted() { return RootedGraph(Graph(1), {1}); }

// -- product and unlabeling ---------------------------------------------------

/// Glue h2 onto h along the shared roots; vertex count |V(h)|+|V(h2)|-k.
/// A root pair may carry an edge in at most one factor.
inline RootedGraph product(const RootedGraph& h, const RootedGraph& h2) {
  if (h.group_sizes != h2.group_sizes)
    fail(ErrorKind::RootMismatch, "product of rooted graphs with different group sizes");
  int k = h.root_count();
  for (auto [u, v] : h.graph.edges())
    if (u < k && v < k && h2.graph.has_edge(u, v))
      fail(ErrorKind::ParallelRootEdge, "root pair is an edge in both factors");
  int n1 = h.graph.vertex_count();
  int n2 = h2.graph.vertex_count();
  Graph g(n1 + n2 - k);
  for (auto [u, v] : h.graph.edges()) g.add_edge(u, v);
  auto shift = [&](int v) { return v < k ? v : v + n1 - k; };
  for (auto [u, v] : h2.graph.edges()) g.add_edge(shift(u), shift(v));
  return RootedGraph(std::move(g), h.group_sizes);
}

inline Graph unlabel(const RootedGraph& h) { return h.graph; }

// -- canonical form -----------------------------------------------------------

namespace detail {

// Branch-and-bound search for the lexicographically largest adjacency code.
// Position t reveals the adjacencies of the chosen vertex to the prefix, packed
// MSB-first so integer order on a position agrees with string order. A branch is
// pruned only while its prefix is tight with the incumbent and its bits fall below;
// leaves confirm with a full comparison. Twin candidates (identical rows off
// {u,v}) are explored once.
struct CanonSearch {
  int n;
  std::vector<std::uint32_t> adj;   // bitmask rows
  std::vector<std::uint32_t> best;  // best[t] = revealed bits at position t
  bool have_best = false;
  std::vector<int> best_perm;

  std::vector<std::uint32_t> cur;
  std::vector<int> cur_verts;
  std::uint32_t used = 0;

  void run() {
    cur.assign(n, 0);
    best.assign(n, 0);
    cur_verts.assign(n, -1);
    best_perm.assign(n, -1);
    dfs(0, true);
  }

  void dfs(int t, bool tight) {
    if (t == n) {
      if (!have_best || cur > best) {
        best = cur;
        best_perm = cur_verts;
        have_best = true;
      }
      return;
    }
    std::uint32_t prefix_mask = used;
    std::vector<std::pair<std::uint32_t, int>> cands;
    cands.reserve(n - t);
    for (int v = 0; v < n; ++v) {
      if (used & (1u << v)) continue;
      std::uint32_t bits = 0;
      std::uint32_t rel = adj[v] & prefix_mask;
      for (int i = 0; i < t; ++i)
        if (rel & (1u << cur_verts[i])) bits |= (1u << (t - 1 - i));
      cands.push_back({bits, v});
    }
    std::sort(cands.begin(), cands.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::uint32_t top = cands.front().first;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      auto [bits, v] = cands[ci];
      if (bits != top) break;  // lex-smaller from this node on
      bool twin = false;
      for (std::size_t cj = 0; cj < ci; ++cj) {
        int w = cands[cj].second;
        std::uint32_t mask = ~((1u << v) | (1u << w));
        if ((adj[v] & mask) == (adj[w] & mask)) {
          twin = true;
          break;
        }
      }
      if (twin) continue;
      bool child_tight = tight;
      if (have_best && tight) {
        if (bits < best[t]) continue;
        if (bits > best[t]) child_tight = false;
      }
      cur[t] = bits;
      cur_verts[t] = v;
      used |= (1u << v);
      dfs(t + 1, child_tight);
      used &= ~(1u << v);
    }
  }
};

}  // namespace detail

/// Canonical labeling key: equal keys iff isomorphic. Deterministic.
/// Budgeted to small graphs (backtracking canonicalization).
inline std::string canonical_form(const Graph& g, int iso_limit = 16) {
  int n = g.vertex_count();
  if (n > iso_limit || n > 31)
    fail(ErrorKind::TooLarge, "canonical_form limited to " + std::to_string(iso_limit) + " vertices");
  detail::CanonSearch s;
  s.n = n;
  s.adj.assign(n, 0);
  for (auto [u, v] : g.edges()) {
    s.adj[u] |= (1u << v);
    s.adj[v] |= (1u << u);
  }
  std::string key;
  key.push_back(static_cast<char>(n));
  if (n == 0) return key;
  s.run();
  // pack revealed bits position by position, MSB-first within a position
  std::uint8_t acc = 0;
  int nb = 0;
  for (int t = 0; t < n; ++t)
    for (int i = t - 1; i >= 0; --i) {
      acc = static_cast<std::uint8_t>((acc << 1) | ((s.best[t] >> i) & 1u));
      if (++nb == 8) {
        key.push_back(static_cast<char>(acc));
        acc = 0;
        nb = 0;
      }
    }
  if (nb > 0) key.push_back(static_cast<char>(acc << (8 - nb)));
  return key;
}

/// The permutation realizing the canonical labeling (old -> new position).
inline std::vector<int> canonical_permutation(const Graph& g, int iso_limit = 16) {
  int n = g.vertex_count();
  if (n > iso_limit || n > 31) fail(ErrorKind::TooLarge, "canonical_permutation limit");
  if (n == 0) return {};
  detail::CanonSearch s;
  s.n = n;
  s.adj.assign(n, 0);
  for (auto [u, v] : g.edges()) {
    s.adj[u] |= (1u << v);
    s.adj[v] |= (1u << u);
  }
  s.run();
  std::vector<int> perm(n);
  for (int t = 0; t < n; ++t) perm[s.best_perm[t]] = t;
  return perm;
}

// -- serialization ------------------------------------------------------------

/// Edge-list text: "n m" header then one "u v" line per edge, 0-based.
inline std::string to_edge_list(const Graph& g) {
  std::ostringstream os;
  os << g.vertex_count() << " " << g.edge_count() << "\n";
  for (auto [u, v] : g.edges()) os << u << " " << v << "\n";
  return os.str();
}

inline Graph from_edge_list(const std::string& text) {
  std::istringstream is(text);
  int n = -1;
  long m = -1;
  if (!(is >> n >> m)) fail(ErrorKind::UsageError, "bad edge-list header");
  Graph g(n);
  for (long i = 0; i < m; ++i) {
    int u, v;
    if (!(is >> u >> v)) fail(ErrorKind::UsageError, "truncated edge list");
    g.add_edge(u, v);
  }
  return g;
}

/// graph6 encoding for n <= 62.
inline std::string to_graph6(const Graph& g) {
  int n = g.vertex_count();
  if (n > 62) fail(ErrorKind::TooLarge, "graph6 writer supports n <= 62");
  std::string out;
  out.push_back(static_cast<char>(n + 63));
  int acc = 0, nb = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      acc = (acc << 1) | (g.has_edge(i, j) ? 1 : 0);
      if (++nb == 6) {
        out.push_back(static_cast<char>(acc + 63));
        acc = 0;
        nb = 0;
      }
    }
  if (nb > 0) out.push_back(static_cast<char>((acc << (6 - nb)) + 63));
  return out;
}

inline Graph from_graph6(const std::string& s) {
  if (s.empty()) fail(ErrorKind::UsageError, "empty graph6 string");
  int n = static_cast<unsigned char>(s[0]) - 63;
  if (n < 0 || n > 62) fail(ErrorKind::UsageError, "graph6 reader supports n <= 62");
  Graph g(n);
  std::size_t pos = 1;
  int acc = 0, nb = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      if (nb == 0) {
        if (pos >= s.size()) fail(ErrorKind::UsageError, "truncated graph6 string");
        acc = static_cast<unsigned char>(s[pos++]) - 63;
        nb = 6;
      }
      if (acc & (1 << (nb - 1))) g.add_edge(i, j);
      --nb;
    }
  return g;
}

}  // namespace qforce
