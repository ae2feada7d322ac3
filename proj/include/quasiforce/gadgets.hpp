#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "quasiforce/kernel.hpp"
#include "quasiforce/quantum.hpp"

namespace qforce {

// -- color gadget ---------------------------------------------------------------
//
// A graph on q groups V_1..V_q (|V_i| = s_i, s_i in [q+2, 2q+2]) whose edges split
// into four matchings per group pair and whose proper q-colorings are exactly the
// group partition. The even and odd constructions differ; q = 2 uses the even one.

struct ColorGadget {
  int q = 0;
  std::vector<int> s;
  std::vector<int> offsets;  // group g occupies [offsets[g], offsets[g] + s[g])
  Graph graph;
  // matchings[pair][m]: edges as (vertex in group i, vertex in group j), i < j
  std::vector<std::array<std::vector<Edge>, 4>> matchings;

  int pair_index(int i, int j) const {  // i < j
    return i * q - i * (i + 1) / 2 + (j - i - 1);
  }
  int group_of(int v) const {
    for (int g = q - 1; g >= 0; --g)
      if (v >= offsets[g]) return g;
    return -1;
  }
  int vertex_id(int group, int pos1) const { return offsets[group] + pos1 - 1; }  // 1-based pos
  int root_count() const { return offsets[q - 1] + s[q - 1]; }
};

inline ColorGadget build_color_gadget(int q, const std::vector<int>& s) {
  if (q < 2) fail(ErrorKind::OutOfRange, "color gadget needs q >= 2");
  if (static_cast<int>(s.size()) != q) fail(ErrorKind::OutOfRange, "need one size per group");
  for (int si : s)
    if (si < q + 2 || si > 2 * q + 2)
      fail(ErrorKind::OutOfRange, "group sizes must lie in [q+2, 2q+2]");
  ColorGadget g;
  g.q = q;
  g.s = s;
  g.offsets.resize(q);
  int off = 0;
  for (int i = 0; i < q; ++i) {
    g.offsets[i] = off;
    off += s[i];
  }
  g.matchings.resize(q * (q - 1) / 2);
  bool even = (q % 2 == 0);
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      auto& m = g.matchings[g.pair_index(i, j)];
      int si = s[i], sj = s[j];
      auto ed = [&](int ki, int kj) { return Edge{g.vertex_id(i, ki), g.vertex_id(j, kj)}; };
      if (even) {
        m[0].push_back(ed(1, 1));
        m[0].push_back(ed(q + 2, q + 2));
        for (int k = 2; k <= q; k += 2) {
          m[0].push_back(ed(k, k + 1));
          m[0].push_back(ed(k + 1, k));
        }
        for (int k = 1; k <= q + 1; k += 2) {
          m[1].push_back(ed(k, k + 1));
          m[1].push_back(ed(k + 1, k));
        }
        for (int k = 1; k <= q; ++k) m[2].push_back(ed(k, sj - q + k));
        for (int k = 1; k <= q; ++k) m[3].push_back(ed(si - q + k, k));
      } else {
        m[0].push_back(ed(1, 1));
        m[0].push_back(ed(q + 1, q + 1));
        for (int k = 2; k <= q - 1; k += 2) {
          m[0].push_back(ed(k, k + 1));
          m[0].push_back(ed(k + 1, k));
        }
        for (int k = 1; k <= q; k += 2) {
          m[1].push_back(ed(k, k + 1));
          m[1].push_back(ed(k + 1, k));
        }
        if (sj != q + 2) {
          for (int k = 1; k <= q + 1; ++k) m[2].push_back(ed(k, sj - q - 1 + k));
        } else {
          m[2].push_back(ed(q + 1, q + 2));
          m[2].push_back(ed(q + 2, 2));
          for (int k = 1; k <= q - 1; ++k) m[2].push_back(ed(k, k + 2));
        }
        if (si != q + 2) {
          for (int k = 1; k <= q + 1; ++k) m[3].push_back(ed(si - q - 1 + k, k));
        } else {
          m[3].push_back(ed(q + 2, q + 1));
          m[3].push_back(ed(2, q + 2));
          for (int k = 1; k <= q - 1; ++k) m[3].push_back(ed(k + 2, k));
        }
      }
    }
  }
  g.graph = Graph(off);
  for (const auto& pm : g.matchings)
    for (const auto& match : pm)
      for (auto [u, v] : match) g.graph.add_edge(u, v);
  return g;
}

struct ColorGadgetReport {
  bool sizes_ok = false;
  bool disjoint = false;
  bool independent = false;
  int chromatic_number = -1;
  bool classes_forced = false;
  long long colorings_with_clique_pinned = -1;
  std::vector<std::string> findings;
  bool ok() const {
    return sizes_ok && disjoint && independent && classes_forced && findings.empty();
  }
};

namespace detail {

/// Counts proper q-colorings extending the pinned assignment; also records
/// whether every completion colors each vertex by its own group.
struct ColoringCounter {
  const Graph* g;
  int q;
  std::vector<std::vector<int>> adj;
  std::vector<int> order;  // uncolored vertices, in the search order
  std::vector<int> color;
  const std::vector<int>* group;
  long long count = 0;
  bool off_class = false;

  void dfs(std::size_t idx) {
    if (idx == order.size()) {
      ++count;
      for (std::size_t i = 0; i < order.size(); ++i)
        if (color[order[i]] != (*group)[order[i]]) off_class = true;
      return;
    }
    int v = order[idx];
    unsigned banned = 0;
    for (int w : adj[v])
      if (color[w] >= 0) banned |= (1u << color[w]);
    for (int c = 0; c < q; ++c) {
      if (banned & (1u << c)) continue;
      color[v] = c;
      dfs(idx + 1);
      color[v] = -1;
    }
  }
};

}  // namespace detail

/// Exhaustive verification: matching sizes, disjointness, group independence,
/// chromatic number q with the groups as the only color classes.
inline ColorGadgetReport verify_color_gadget(const ColorGadget& g, int coloring_budget_q = 4) {
  ColorGadgetReport rep;
  bool even = (g.q % 2 == 0);
  rep.sizes_ok = true;
  for (int i = 0; i < g.q; ++i)
    for (int j = i + 1; j < g.q; ++j) {
      const auto& m = g.matchings[g.pair_index(i, j)];
      std::array<std::size_t, 4> want = even
          ? std::array<std::size_t, 4>{static_cast<std::size_t>(g.q + 2),
                                       static_cast<std::size_t>(g.q + 2),
                                       static_cast<std::size_t>(g.q), static_cast<std::size_t>(g.q)}
          : std::array<std::size_t, 4>{static_cast<std::size_t>(g.q + 1),
                                       static_cast<std::size_t>(g.q + 1),
                                       static_cast<std::size_t>(g.q + 1),
                                       static_cast<std::size_t>(g.q + 1)};
      for (int k = 0; k < 4; ++k) {
        if (m[k].size() != want[k]) {
          rep.sizes_ok = false;
          rep.findings.push_back("matching size off at pair (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") M" + std::to_string(k + 1));
        }
        // each M restricted to the pair must be a matching: endpoints distinct
        std::vector<int> ends;
        for (auto [u, v] : m[k]) {
          ends.push_back(u);
          ends.push_back(v);
        }
        std::sort(ends.begin(), ends.end());
        if (std::adjacent_find(ends.begin(), ends.end()) != ends.end()) {
          rep.sizes_ok = false;
          rep.findings.push_back("repeated endpoint in matching at pair (" + std::to_string(i) +
                                 "," + std::to_string(j) + ") M" + std::to_string(k + 1));
        }
      }
    }

  long long total_edges = 0;
  for (const auto& pm : g.matchings)
    for (const auto& match : pm) total_edges += static_cast<long long>(match.size());
  rep.disjoint = (total_edges == g.graph.edge_count());
  if (!rep.disjoint)
    rep.findings.push_back("matchings are not pairwise disjoint: " + std::to_string(total_edges) +
                           " listed vs " + std::to_string(g.graph.edge_count()) + " distinct");

  rep.independent = true;
  for (auto [u, v] : g.graph.edges())
    if (g.group_of(u) == g.group_of(v)) {
      rep.independent = false;
      rep.findings.push_back("edge inside a group");
      break;
    }

  if (g.q > coloring_budget_q)
    fail(ErrorKind::BudgetExceeded, "exhaustive coloring check limited to q <= " +
                                        std::to_string(coloring_budget_q));

  // base clique (i,1), i in [q]: pinned to kill the color permutations
  for (int i = 0; i < g.q; ++i)
    for (int j = i + 1; j < g.q; ++j)
      if (!g.graph.has_edge(g.vertex_id(i, 1), g.vertex_id(j, 1)))
        rep.findings.push_back("base clique edge missing");

  std::vector<int> group(g.graph.vertex_count());
  for (int v = 0; v < g.graph.vertex_count(); ++v) group[v] = g.group_of(v);

  detail::ColoringCounter cc;
  cc.g = &g.graph;
  cc.q = g.q;
  cc.adj = g.graph.adjacency_lists();
  cc.color.assign(g.graph.vertex_count(), -1);
  cc.group = &group;
  for (int i = 0; i < g.q; ++i) cc.color[g.vertex_id(i, 1)] = i;
  // color low positions first; they force the rest
  std::vector<std::pair<int, int>> rest;  // (position, vertex)
  for (int i = 0; i < g.q; ++i)
    for (int k = 2; k <= g.s[i]; ++k) rest.push_back({k, g.vertex_id(i, k)});
  std::sort(rest.begin(), rest.end());
  for (auto& [k, v] : rest) cc.order.push_back(v);
  cc.dfs(0);

  rep.colorings_with_clique_pinned = cc.count;
  rep.classes_forced = (cc.count >= 1 && !cc.off_class);
  rep.chromatic_number = (cc.count >= 1 && rep.independent) ? g.q : -1;
  if (cc.count != 1)
    rep.findings.push_back("expected exactly one pinned coloring, found " +
                           std::to_string(cc.count));
  return rep;
}

// -- selector gadget P ------------------------------------------------------------
//
// Rooted quantum graph with one non-root vertex per (group pair, matching): the
// factor over a matching M is the product over its edges of the difference of the
// two endpoint rows. Its rooted density on a q-step kernel is 0 except when every
// group sits inside one part and distinct groups sit in distinct parts, where it
// takes a single positive value independent of the group sizes.

struct SelectorGadget {
  ColorGadget gadget;
  std::vector<Edge> decorations;  // extra root-root edges

  int q() const { return gadget.q; }
  const std::vector<int>& sizes() const { return gadget.s; }
  int root_count() const { return gadget.root_count(); }
  int nonroot_count() const { return 2 * gadget.q * (gadget.q - 1); }
  int constituent_vertices() const { return root_count() + nonroot_count(); }
};

inline SelectorGadget make_selector(int q, const std::vector<int>& s) {
  SelectorGadget sel;
  sel.gadget = build_color_gadget(q, s);
  return sel;
}

/// Add `count` decoration edges between groups gi and gj (inside one group when
/// gi == gj), choosing the lexicographically smallest pairs not already present.
inline void add_decorations(SelectorGadget& sel, int gi, int gj, int count) {
  const auto& g = sel.gadget;
  if (gi > gj) std::swap(gi, gj);
  auto taken = [&](int u, int v) {
    if (u > v) std::swap(u, v);
    for (auto [a, b] : sel.decorations)
      if (a == u && b == v) return true;
    return false;
  };
  int added = 0;
  if (gi == gj) {
    for (int u = g.offsets[gi]; u < g.offsets[gi] + g.s[gi] && added < count; ++u)
      for (int v = u + 1; v < g.offsets[gi] + g.s[gi] && added < count; ++v)
        if (!taken(u, v)) {
          sel.decorations.push_back({u, v});
          ++added;
        }
  } else {
    for (int u = g.offsets[gi]; u < g.offsets[gi] + g.s[gi] && added < count; ++u)
      for (int v = g.offsets[gj]; v < g.offsets[gj] + g.s[gj] && added < count; ++v)
        if (!taken(u, v)) {
          sel.decorations.push_back({u, v});
          ++added;
        }
  }
  if (added < count) fail(ErrorKind::OutOfRange, "not enough room for decoration edges");
}

/// Rooted density of the (possibly decorated) selector at a full root assignment,
/// via the factorized form: product over (pair, matching) of
///   sum_y a_y prod_{edges (v_i, v_j)} (D[part(v_j)][y] - D[part(v_i)][y]).
template <class S>
S selector_rooted_density(const SelectorGadget& sel, const StepKernelT<S>& u,
                          const std::vector<int>& root_parts) {
  const auto& g = sel.gadget;
  if (static_cast<int>(root_parts.size()) != g.root_count())
    fail(ErrorKind::UsageError, "root assignment size mismatch");
  S total(1);
  for (const auto& pm : g.matchings) {
    for (const auto& match : pm) {
      S factor{};
      for (int y = 0; y < u.q; ++y) {
        S term = u.measures[y];
        for (auto [vi, vj] : match) {
          term *= (u.density[root_parts[vj]][y] - u.density[root_parts[vi]][y]);
          if (term == S(0)) break;
        }
        factor += term;
      }
      total *= factor;
      if (total == S(0)) return total;
    }
  }
  for (auto [a, b] : sel.decorations) total *= u.density[root_parts[a]][root_parts[b]];
  return total;
}

/// The single nonzero rooted value d0 of the undecorated selector on a minimal
/// q-step kernel. Odd q: prod_{i<j} (sum_y a_y delta^{q+1})^4; even q:
/// prod_{i<j} (sum_y a_y delta^{q+2})^2 (sum_y a_y delta^q)^2. Positive, and
/// independent of the group sizes.
inline Rat selector_value(const StepKernel& u) {
  if (auto bad = check_minimality(u))
    fail(ErrorKind::NotMinimal, "selector value vanishes on non-minimal kernels");
  int q = u.q;
  bool even = (q % 2 == 0);
  auto moment = [&](int i, int j, int power) {
    Rat s(0);
    for (int y = 0; y < q; ++y)
      s += u.measures[y] * pow_rat(u.density[i][y] - u.density[j][y], power);
    return s;
  };
  Rat d0(1);
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) {
      if (even) {
        Rat hi = moment(i, j, q + 2), lo = moment(i, j, q);
        d0 *= hi * hi * lo * lo;
      } else {
        Rat m = moment(i, j, q + 1);
        d0 *= m * m * m * m;
      }
    }
  return d0;
}

/// Unrooted density of a decorated selector on a q-step kernel, summing only the
/// surviving group-constant injective patterns (q! of them).
inline Rat selector_density(const SelectorGadget& sel, const StepKernel& u) {
  if (sel.q() != u.q) fail(ErrorKind::UsageError, "selector group count must match kernel parts");
  int q = u.q;
  Rat d0 = selector_value(u);
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  const auto& g = sel.gadget;
  Rat total(0);
  do {
    Rat w(1);
    for (int i = 0; i < q; ++i) w *= pow_rat(u.measures[perm[i]], g.s[i]);
    for (auto [a, b] : sel.decorations)
      w *= u.density[perm[g.group_of(a)]][perm[g.group_of(b)]];
    total += w;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total * d0;
}

/// Oracle: the same density by enumerating every root part assignment.
inline Rat selector_density_by_enumeration(const SelectorGadget& sel, const StepKernel& u,
                                           double budget = 2e7) {
  int roots = sel.root_count();
  if (std::pow(static_cast<double>(u.q), roots) > budget)
    fail(ErrorKind::BudgetExceeded, "full root enumeration too large");
  std::vector<int> parts(roots, 0);
  Rat total(0);
  while (true) {
    Rat w(1);
    for (int r = 0; r < roots; ++r) w *= u.measures[parts[r]];
    total += w * selector_rooted_density(sel, u, parts);
    int d = 0;
    while (d < roots && ++parts[d] == u.q) parts[d++] = 0;
    if (d == roots) break;
  }
  return total;
}

// -- matrix probe value c0 -------------------------------------------------------

/// Distinct diagonal values of a symmetric matrix.
inline std::vector<Rat> diagonal_value_set(const std::vector<std::vector<Rat>>& m) {
  std::set<Rat> s;
  for (std::size_t i = 0; i < m.size(); ++i) s.insert(m[i][i]);
  return {s.begin(), s.end()};
}

inline std::vector<Rat> offdiagonal_value_set(const std::vector<std::vector<Rat>>& m) {
  std::set<Rat> s;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) s.insert(m[i][j]);
  return {s.begin(), s.end()};
}

/// The nonzero rooted value c0 of the matrix-matching probe built from D_target:
/// d0 times the products of (D_ii - z) over the other diagonal values and
/// (D_ij - z) over the other off-diagonal values. Requires the kernel's part and
/// pair densities to lie inside the respective value sets.
inline Rat matrix_probe_value(const StepKernel& u, const std::vector<std::vector<Rat>>& d_target) {
  int q = u.q;
  if (static_cast<int>(d_target.size()) != q)
    fail(ErrorKind::UsageError, "target matrix size must match kernel parts");
  auto z1 = diagonal_value_set(d_target);
  auto z2 = offdiagonal_value_set(d_target);
  auto contains = [](const std::vector<Rat>& xs, const Rat& v) {
    return std::find(xs.begin(), xs.end(), v) != xs.end();
  };
  for (int i = 0; i < q; ++i)
    if (!contains(z1, u.density[i][i]))
      fail(ErrorKind::PreconditionViolated, "part density outside the diagonal value set");
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      if (!contains(z2, u.density[i][j]))
        fail(ErrorKind::PreconditionViolated, "pair density outside the off-diagonal value set");
  Rat c0 = selector_value(u);
  for (int i = 0; i < q; ++i)
    for (const Rat& z : z1)
      if (z != d_target[i][i]) c0 *= (d_target[i][i] - z);
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      for (const Rat& z : z2)
        if (z != d_target[i][j]) c0 *= (d_target[i][j] - z);
  return c0;
}

// -- step probes Q_k ---------------------------------------------------------------

/// Exact value of the k-th step probe: zero iff the kernel is weakly isomorphic to
/// a step kernel with fewer than k parts. Evaluated through the factored integral
///   sum over x, x' of prod_{i<j} (sum_y a_y (row x_i - row x_j)(row x'_i - row x'_j))^2,
/// never expanding constituents.
template <class S>
S step_probe_density(const StepKernelT<S>& u, int k) {
  if (k < 1) fail(ErrorKind::OutOfRange, "step probe needs k >= 1");
  int q = u.q;
  if (k == 1) return S(1);  // empty pair product
  // B[b][c][b'][c'] = sum_y a_y (D_b,y - D_c,y)(D_b',y - D_c',y), then squared
  std::vector<S> b2(q * q * q * q);
  for (int b = 0; b < q; ++b)
    for (int c = 0; c < q; ++c)
      for (int b1 = 0; b1 < q; ++b1)
        for (int c1 = 0; c1 < q; ++c1) {
          S v{};
          for (int y = 0; y < q; ++y)
            v += u.measures[y] * (u.density[b][y] - u.density[c][y]) *
                 (u.density[b1][y] - u.density[c1][y]);
          b2[((b * q + c) * q + b1) * q + c1] = v * v;
        }
  // DFS over t = 0..k-1 assigning (x_t, x'_t), sharing prefix products
  std::vector<int> x(k), x2(k);
  S total{};
  std::vector<S> prefix(k + 1);
  prefix[0] = S(1);
  int t = 0;
  std::vector<int> choice(k, -1);
  while (t >= 0) {
    int c = ++choice[t];
    if (c >= q * q) {
      choice[t] = -1;
      --t;
      continue;
    }
    x[t] = c / q;
    x2[t] = c % q;
    S val = prefix[t] * u.measures[x[t]] * u.measures[x2[t]];
    for (int i = 0; i < t && !(val == S(0)); ++i)
      val *= b2[((x[i] * q + x[t]) * q + x2[i]) * q + x2[t]];
    if (val == S(0)) continue;
    if (t == k - 1) {
      total += val;
    } else {
      prefix[t + 1] = val;
      ++t;
    }
  }
  return total;
}

// -- factored rooted quantum graphs ------------------------------------------------
//
// Product over factors of signed sums of one-nonroot attachments, plus fixed
// root-root edges. Holds the step probes and selectors in unexpanded form; supports
// lazy constituent enumeration and a definitional term-sum evaluation used for
// cross-checks.

struct FactorTerm {
  int sign = 1;
  std::vector<int> attach;  // roots adjacent to this factor's non-root vertex
};

struct FactoredRootedQuantum {
  std::vector<int> group_sizes;
  std::vector<Edge> root_edges;
  std::vector<std::vector<FactorTerm>> factors;

  int root_count() const {
    return std::accumulate(group_sizes.begin(), group_sizes.end(), 0);
  }
  int constituent_vertices() const { return root_count() + static_cast<int>(factors.size()); }
  double constituent_count() const {
    double c = 1;
    for (const auto& f : factors) c *= static_cast<double>(f.size());
    return c;
  }

  /// Constituent for one choice of term per factor.
  RootedGraph constituent(const std::vector<int>& choice, int& sign_out) const {
    int r = root_count();
    Graph g(r + static_cast<int>(factors.size()));
    for (auto [u, v] : root_edges) g.add_edge(u, v);
    sign_out = 1;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const FactorTerm& t = factors[f][choice[f]];
      sign_out *= t.sign;
      int nr = r + static_cast<int>(f);
      for (int w : t.attach) g.add_edge(w, nr);
    }
    return RootedGraph(std::move(g), group_sizes);
  }

  QuantumRootedGraph expand(std::uint64_t expansion_limit = 1000000) const {
    if (constituent_count() > static_cast<double>(expansion_limit))
      fail(ErrorKind::ExpansionTooLarge, "factored expansion too large");
    std::vector<std::pair<Rat, RootedGraph>> terms;
    std::vector<int> choice(factors.size(), 0);
    while (true) {
      int sign;
      RootedGraph h = constituent(choice, sign);
      terms.emplace_back(Rat(sign), std::move(h));
      std::size_t d = 0;
      while (d < factors.size() && ++choice[d] == static_cast<int>(factors[d].size()))
        choice[d++] = 0;
      if (d == factors.size()) break;
    }
    return QuantumRootedGraph(std::move(terms));
  }

  /// Definitional rooted value: product over factors of the signed term sums,
  /// each term integrating its own non-root vertex.
  template <class S>
  S rooted_value(const StepKernelT<S>& u, const std::vector<int>& root_parts) const {
    S total(1);
    for (const auto& f : factors) {
      S fac{};
      for (const FactorTerm& t : f) {
        S integ{};
        for (int y = 0; y < u.q; ++y) {
          S prod = u.measures[y];
          for (int w : t.attach) prod *= u.density[root_parts[w]][y];
          integ += prod;
        }
        if (t.sign < 0)
          fac -= integ;
        else
          fac += integ;
      }
      total *= fac;
      if (total == S(0)) return total;
    }
    for (auto [a, b] : root_edges) total *= u.density[root_parts[a]][root_parts[b]];
    return total;
  }

  /// Unrooted density by full enumeration of root assignments (cross-check path).
  template <class S>
  S density_by_enumeration(const StepKernelT<S>& u, double budget = 2e7) const {
    int r = root_count();
    if (std::pow(static_cast<double>(u.q), r) > budget)
      fail(ErrorKind::BudgetExceeded, "root enumeration too large");
    std::vector<int> parts(r, 0);
    S total{};
    while (true) {
      S w(1);
      for (int i = 0; i < r; ++i) w *= u.measures[parts[i]];
      total += w * rooted_value(u, parts);
      int d = 0;
      while (d < r && ++parts[d] == u.q) parts[d++] = 0;
      if (d == r) break;
    }
    return total;
  }
};

/// Q_k as a factored rooted quantum graph: roots x_1..x_k, x'_1..x'_k; two copies
/// per pair i<j of the four-term difference gadget.
inline FactoredRootedQuantum step_probe_factored(int k) {
  if (k < 2) fail(ErrorKind::OutOfRange, "factored step probe needs k >= 2");
  FactoredRootedQuantum f;
  f.group_sizes = {2 * k};
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      for (int copy = 0; copy < 2; ++copy) {
        std::vector<FactorTerm> terms;
        terms.push_back({+1, {i, k + i}});
        terms.push_back({+1, {j, k + j}});
        terms.push_back({-1, {i, k + j}});
        terms.push_back({-1, {j, k + i}});
        f.factors.push_back(std::move(terms));
      }
  return f;
}

/// Expanded Q_k: every constituent has k(k+1) vertices.
inline QuantumGraph step_probe_expanded(int k, std::uint64_t expansion_limit = 1000000) {
  return unlabel(step_probe_factored(k).expand(expansion_limit));
}

/// Selector as a factored rooted quantum graph: one factor per (pair, matching),
/// terms pick one endpoint per matching edge, signed by the number of i-side picks.
inline FactoredRootedQuantum selector_factored(const SelectorGadget& sel) {
  const auto& g = sel.gadget;
  FactoredRootedQuantum f;
  f.group_sizes = g.s;
  f.root_edges = sel.decorations;
  for (const auto& pm : g.matchings)
    for (const auto& match : pm) {
      int sz = static_cast<int>(match.size());
      if (sz > 20) fail(ErrorKind::ExpansionTooLarge, "matching too large to materialize terms");
      std::vector<FactorTerm> terms;
      for (int mask = 0; mask < (1 << sz); ++mask) {
        FactorTerm t;
        int iside = 0;
        for (int e = 0; e < sz; ++e) {
          if (mask & (1 << e)) {
            t.attach.push_back(match[e].first);  // i-side endpoint
            ++iside;
          } else {
            t.attach.push_back(match[e].second);
          }
        }
        t.sign = (iside % 2 == 0) ? 1 : -1;
        std::sort(t.attach.begin(), t.attach.end());
        terms.push_back(std::move(t));
      }
      f.factors.push_back(std::move(terms));
    }
  return f;
}

}  // namespace qforce
