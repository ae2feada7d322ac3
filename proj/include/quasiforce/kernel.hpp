#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "quasiforce/graph.hpp"
#include "quasiforce/quantum.hpp"
#include "quasiforce/rational.hpp"

namespace qforce {

/// q-step kernel: part measures a_1..a_q (positive, summing to one) and a
/// symmetric q x q block-value matrix. graphon restricts values to [0,1].
/// Minimal means no two rows coincide, i.e. the representation is genuinely q-step.
template <class S>
struct StepKernelT {
  int q = 0;
  std::vector<S> measures;
  std::vector<std::vector<S>> density;
  bool graphon = false;
};

using StepKernel = StepKernelT<Rat>;
using NumericKernel = StepKernelT<double>;

template <class S>
bool scalar_eq(const S& a, const S& b) {
  return a == b;
}
inline bool scalar_eq(double a, double b) { return std::abs(a - b) <= 1e-9; }

/// Offending row pair if the kernel is representable with fewer parts.
template <class S>
std::optional<std::pair<int, int>> check_minimality(const StepKernelT<S>& u) {
  for (int i = 0; i < u.q; ++i)
    for (int j = i + 1; j < u.q; ++j)
      if (u.density[i] == u.density[j]) return std::make_pair(i, j);
  return std::nullopt;
}

template <class S>
void validate_kernel(const StepKernelT<S>& u, bool require_minimal = true) {
  if (u.q < 1) fail(ErrorKind::UsageError, "kernel needs at least one part");
  if (static_cast<int>(u.measures.size()) != u.q ||
      static_cast<int>(u.density.size()) != u.q)
    fail(ErrorKind::UsageError, "kernel dimension mismatch");
  S total{};
  for (const S& a : u.measures) {
    if (!(a > S(0))) fail(ErrorKind::UsageError, "part measures must be positive");
    total += a;
  }
  if (!scalar_eq(total, S(1))) fail(ErrorKind::UsageError, "part measures must sum to one");
  for (int i = 0; i < u.q; ++i) {
    if (static_cast<int>(u.density[i].size()) != u.q)
      fail(ErrorKind::UsageError, "density matrix not square");
    for (int j = 0; j < u.q; ++j) {
      if (!scalar_eq(u.density[i][j], u.density[j][i]))
        fail(ErrorKind::UsageError, "density matrix not symmetric");
      if (u.graphon && (u.density[i][j] < S(0) || u.density[i][j] > S(1)))
        fail(ErrorKind::NotAGraphon, "graphon values must lie in [0,1]");
    }
  }
  if (require_minimal) {
    if (auto bad = check_minimality(u))
      fail(ErrorKind::NotMinimal, "rows " + std::to_string(bad->first) + " and " +
                                      std::to_string(bad->second) + " coincide");
  }
}

/// Degree of part i: sum_j a_j D_ij.
template <class S>
S degree_of_part(const StepKernelT<S>& u, int i) {
  if (i < 0 || i >= u.q) fail(ErrorKind::OutOfRange, "part index");
  S d{};
  for (int j = 0; j < u.q; ++j) d += u.measures[j] * u.density[i][j];
  return d;
}

template <class S>
std::vector<S> degree_vector(const StepKernelT<S>& u) {
  std::vector<S> d(u.q);
  for (int i = 0; i < u.q; ++i) d[i] = degree_of_part(u, i);
  return d;
}

inline std::set<Rat> part_density_values(const StepKernel& u) {
  std::set<Rat> s;
  for (int i = 0; i < u.q; ++i) s.insert(u.density[i][i]);
  return s;
}

inline std::set<Rat> pair_density_values(const StepKernel& u) {
  std::set<Rat> s;
  for (int i = 0; i < u.q; ++i)
    for (int j = i + 1; j < u.q; ++j) s.insert(u.density[i][j]);
  return s;
}

// -- density evaluation -------------------------------------------------------

struct EvalLimits {
  double brute_force_budget = 1e4;        // enumerate when q^{#free} <= budget
  std::uint64_t dp_table_limit = 1u << 22;  // max entries of an elimination table
};

namespace detail {

/// Exhaustive sum over part assignments of the free vertices (those at index
/// >= |root_parts|), with measure weights on free vertices only. Partial
/// products are maintained incrementally and zero branches are skipped.
template <class S>
S density_brute(const Graph& h, const StepKernelT<S>& k, const std::vector<int>& root_parts) {
  int n = h.vertex_count();
  int r = static_cast<int>(root_parts.size());
  int q = k.q;
  // back-edges: for vertex v, edges to smaller-indexed vertices
  std::vector<std::vector<int>> back(n);
  for (auto [u, v] : h.edges()) back[v].push_back(u);

  std::vector<int> assign(n, -1);
  for (int i = 0; i < r; ++i) assign[i] = root_parts[i];

  // prefix value for the roots
  S root_value(1);
  for (int v = 0; v < r; ++v)
    for (int u : back[v]) root_value *= k.density[assign[u]][assign[v]];

  S total{};
  std::vector<S> prefix(n + 1);
  prefix[r] = root_value;
  int v = r;
  if (v == n) return root_value;
  std::vector<int> choice(n, -1);
  while (v >= r) {
    int c = ++choice[v];
    if (c >= q) {
      choice[v] = -1;
      --v;
      continue;
    }
    S val = prefix[v] * k.measures[c];
    assign[v] = c;
    bool zero = false;
    for (int u : back[v]) {
      val *= k.density[assign[u]][c];
      if (val == S(0)) {
        zero = true;
        break;
      }
    }
    if (zero) continue;
    if (v == n - 1) {
      total += val;
    } else {
      prefix[v + 1] = val;
      ++v;
    }
  }
  return total;
}

template <class S>
struct Factor {
  std::vector<int> scope;  // free-vertex ids, ascending
  std::vector<S> table;    // mixed radix, scope[0] least significant
};

/// Variable elimination with a greedy minimum-degree order. Exact for any
/// scalar; order independence holds because the scalar ring is commutative.
template <class S>
S density_eliminate(const Graph& h, const StepKernelT<S>& k, const std::vector<int>& root_parts,
                    const EvalLimits& lim) {
  int n = h.vertex_count();
  int r = static_cast<int>(root_parts.size());
  int q = k.q;
  S scalar(1);
  std::vector<Factor<S>> factors;
  for (auto [u, v] : h.edges()) {
    bool ur = u < r, vr = v < r;
    if (ur && vr) {
      scalar *= k.density[root_parts[u]][root_parts[v]];
    } else if (ur || vr) {
      int root = ur ? u : v, free_v = ur ? v : u;
      Factor<S> f;
      f.scope = {free_v};
      f.table.resize(q);
      for (int c = 0; c < q; ++c) f.table[c] = k.density[root_parts[root]][c];
      factors.push_back(std::move(f));
    } else {
      Factor<S> f;
      f.scope = {std::min(u, v), std::max(u, v)};
      f.table.resize(q * q);
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) f.table[a + q * b] = k.density[a][b];
      factors.push_back(std::move(f));
    }
  }
  if (scalar == S(0)) return scalar;

  std::vector<bool> alive(n, false);
  for (int v = r; v < n; ++v) alive[v] = true;

  auto neighbor_count = [&](int v) {
    std::set<int> nb;
    for (const auto& f : factors)
      if (std::find(f.scope.begin(), f.scope.end(), v) != f.scope.end())
        for (int w : f.scope)
          if (w != v) nb.insert(w);
    return nb.size();
  };

  for (int step = r; step < n; ++step) {
    // pick the alive vertex with fewest distinct neighbors; ties by index
    int pick = -1;
    std::size_t best_deg = SIZE_MAX;
    for (int v = r; v < n; ++v)
      if (alive[v]) {
        std::size_t d = neighbor_count(v);
        if (d < best_deg) {
          best_deg = d;
          pick = v;
        }
      }
    // gather factors touching pick
    std::vector<Factor<S>> touching;
    std::erase_if(factors, [&](Factor<S>& f) {
      if (std::find(f.scope.begin(), f.scope.end(), pick) != f.scope.end()) {
        touching.push_back(std::move(f));
        return true;
      }
      return false;
    });
    std::set<int> scope_set;
    for (const auto& f : touching)
      for (int w : f.scope) scope_set.insert(w);
    scope_set.erase(pick);
    std::vector<int> out_scope(scope_set.begin(), scope_set.end());

    std::uint64_t out_size = 1;
    for (std::size_t i = 0; i < out_scope.size(); ++i) {
      out_size *= static_cast<std::uint64_t>(q);
      if (out_size > lim.dp_table_limit)
        fail(ErrorKind::BudgetExceeded, "elimination table too large");
    }

    // strides of each touching factor w.r.t. (out_scope..., pick)
    int m = static_cast<int>(out_scope.size());
    std::vector<std::vector<std::int64_t>> stride(touching.size());
    std::vector<std::int64_t> pick_stride(touching.size(), 0);
    for (std::size_t fi = 0; fi < touching.size(); ++fi) {
      stride[fi].assign(m, 0);
      std::int64_t s = 1;
      for (int w : touching[fi].scope) {
        if (w == pick) {
          pick_stride[fi] = s;
        } else {
          auto it = std::lower_bound(out_scope.begin(), out_scope.end(), w);
          stride[fi][it - out_scope.begin()] = s;
        }
        s *= q;
      }
    }

    Factor<S> result;
    result.scope = out_scope;
    result.table.assign(out_size, S{});
    std::vector<int> assign(m, 0);
    std::vector<std::int64_t> base(touching.size(), 0);
    for (std::uint64_t idx = 0;; ++idx) {
      S cell{};
      for (int c = 0; c < q; ++c) {
        S prod = k.measures[c];
        for (std::size_t fi = 0; fi < touching.size(); ++fi) {
          prod *= touching[fi].table[base[fi] + pick_stride[fi] * c];
          if (prod == S(0)) break;
        }
        cell += prod;
      }
      result.table[idx] = std::move(cell);
      // odometer
      int d = 0;
      while (d < m) {
        ++assign[d];
        for (std::size_t fi = 0; fi < touching.size(); ++fi) base[fi] += stride[fi][d];
        if (assign[d] < q) break;
        for (std::size_t fi = 0; fi < touching.size(); ++fi)
          base[fi] -= stride[fi][d] * q;
        assign[d] = 0;
        ++d;
      }
      if (d == m) break;
    }
    alive[pick] = false;
    if (result.scope.empty())
      scalar *= result.table[0];
    else
      factors.push_back(std::move(result));
  }
  return scalar;
}

}  // namespace detail

/// Density with the first |root_parts| vertices pinned to the given parts and the
/// remaining vertices integrated with measure weights. Empty root list gives the
/// plain homomorphism density. Brute force below the budget, variable elimination above.
template <class S>
S rooted_density(const Graph& h, const StepKernelT<S>& k, const std::vector<int>& root_parts,
                 const EvalLimits& lim = {}) {
  for (int p : root_parts)
    if (p < 0 || p >= k.q) fail(ErrorKind::OutOfRange, "root part out of range");
  int free_count = h.vertex_count() - static_cast<int>(root_parts.size());
  if (free_count < 0) fail(ErrorKind::UsageError, "more root parts than vertices");
  double cost = std::pow(static_cast<double>(k.q), free_count);
  if (cost <= lim.brute_force_budget) return detail::density_brute(h, k, root_parts);
  return detail::density_eliminate(h, k, root_parts, lim);
}

template <class S>
S rooted_density(const RootedGraph& h, const StepKernelT<S>& k, const std::vector<int>& root_parts,
                 const EvalLimits& lim = {}) {
  if (static_cast<int>(root_parts.size()) != h.root_count())
    fail(ErrorKind::UsageError, "root assignment size mismatch");
  return rooted_density(h.graph, k, root_parts, lim);
}

template <class S>
S hom_density(const Graph& h, const StepKernelT<S>& k, const EvalLimits& lim = {}) {
  return rooted_density(h, k, std::vector<int>{}, lim);
}

/// Forced evaluation paths, used to cross-check one against the other.
template <class S>
S hom_density_brute(const Graph& h, const StepKernelT<S>& k) {
  return detail::density_brute(h, k, {});
}
template <class S>
S hom_density_eliminate(const Graph& h, const StepKernelT<S>& k, const EvalLimits& lim = {}) {
  return detail::density_eliminate(h, k, {}, lim);
}

template <class S>
S quantum_density(const QuantumGraph& qg, const StepKernelT<S>& k, const EvalLimits& lim = {}) {
  S total{};
  for (const auto& [c, g] : qg.terms) {
    if constexpr (std::is_same_v<S, Rat>)
      total += c * hom_density(g, k, lim);
    else
      total += to_double(c) * hom_density(g, k, lim);
  }
  return total;
}

template <class S>
S quantum_rooted_density(const QuantumRootedGraph& qg, const StepKernelT<S>& k,
                         const std::vector<int>& root_parts, const EvalLimits& lim = {}) {
  S total{};
  for (const auto& [c, g] : qg.terms) {
    if constexpr (std::is_same_v<S, Rat>)
      total += c * rooted_density(g, k, root_parts, lim);
    else
      total += to_double(c) * rooted_density(g, k, root_parts, lim);
  }
  return total;
}

// -- weak isomorphism of step kernels ----------------------------------------

namespace detail {

template <class S, class Eq>
bool extend_matching(const StepKernelT<S>& u, const StepKernelT<S>& u2, std::vector<int>& pi,
                     std::vector<bool>& used, int i, const Eq& eq) {
  if (i == u.q) return true;
  for (int j = 0; j < u.q; ++j) {
    if (used[j] || !eq(u2.measures[j], u.measures[i])) continue;
    bool ok = eq(u2.density[j][j], u.density[i][i]);
    for (int i2 = 0; ok && i2 < i; ++i2)
      ok = eq(u2.density[j][pi[i2]], u.density[i][i2]);
    if (!ok) continue;
    pi[i] = j;
    used[j] = true;
    if (extend_matching(u, u2, pi, used, i + 1, eq)) return true;
    used[j] = false;
  }
  return false;
}

}  // namespace detail

/// Part permutation pi with u2.measures[pi[i]] = u.measures[i] and
/// u2.density[pi[i]][pi[j]] = u.density[i][j], or nothing. Both inputs minimal.
inline std::optional<std::vector<int>> weak_iso(const StepKernel& u, const StepKernel& u2) {
  if (check_minimality(u) || check_minimality(u2))
    fail(ErrorKind::NotMinimal, "weak_iso requires minimal step kernels");
  if (u.q != u2.q) return std::nullopt;
  std::vector<int> pi(u.q, -1);
  std::vector<bool> used(u.q, false);
  auto eq = [](const Rat& a, const Rat& b) { return a == b; };
  if (detail::extend_matching(u, u2, pi, used, 0, eq)) return pi;
  return std::nullopt;
}

/// Tolerance-based part matching for numeric kernels.
inline std::optional<std::vector<int>> weak_iso_numeric(const NumericKernel& u,
                                                        const NumericKernel& u2, double tol) {
  if (u.q != u2.q) return std::nullopt;
  std::vector<int> pi(u.q, -1);
  std::vector<bool> used(u.q, false);
  auto eq = [tol](double a, double b) { return std::abs(a - b) <= tol; };
  if (detail::extend_matching(u, u2, pi, used, 0, eq)) return pi;
  return std::nullopt;
}

// -- refinement and canonicalization ------------------------------------------

/// Split part `part` into the given positive fractions (summing to its measure).
/// Every graph density is unchanged; the result is intentionally non-minimal.
inline StepKernel refine_part(const StepKernel& u, int part, const std::vector<Rat>& fractions) {
  if (part < 0 || part >= u.q) fail(ErrorKind::BadSplit, "part index out of range");
  if (fractions.size() < 2) fail(ErrorKind::BadSplit, "need at least two fractions");
  Rat total(0);
  for (const Rat& f : fractions) {
    if (!(f > 0)) fail(ErrorKind::BadSplit, "fractions must be positive");
    total += f;
  }
  if (total != u.measures[part]) fail(ErrorKind::BadSplit, "fractions must sum to the part measure");
  int extra = static_cast<int>(fractions.size()) - 1;
  StepKernel out;
  out.q = u.q + extra;
  out.graphon = u.graphon;
  std::vector<int> src;  // original part of each new part
  for (int i = 0; i < u.q; ++i) {
    if (i == part) {
      for (const Rat& f : fractions) {
        out.measures.push_back(f);
        src.push_back(i);
      }
    } else {
      out.measures.push_back(u.measures[i]);
      src.push_back(i);
    }
  }
  out.density.assign(out.q, std::vector<Rat>(out.q));
  for (int i = 0; i < out.q; ++i)
    for (int j = 0; j < out.q; ++j) out.density[i][j] = u.density[src[i]][src[j]];
  return out;
}

/// Merge identical rows, summing measures: the minimal representation of a
/// possibly refined step kernel.
inline StepKernel merge_identical_rows(const StepKernel& u) {
  std::vector<int> repr;  // indices of distinct rows, in first-appearance order
  std::vector<int> cls(u.q, -1);
  for (int i = 0; i < u.q; ++i) {
    for (std::size_t r = 0; r < repr.size(); ++r)
      if (u.density[i] == u.density[repr[r]]) {
        cls[i] = static_cast<int>(r);
        break;
      }
    if (cls[i] < 0) {
      cls[i] = static_cast<int>(repr.size());
      repr.push_back(i);
    }
  }
  StepKernel out;
  out.q = static_cast<int>(repr.size());
  out.graphon = u.graphon;
  out.measures.assign(out.q, Rat(0));
  for (int i = 0; i < u.q; ++i) out.measures[cls[i]] += u.measures[i];
  out.density.assign(out.q, std::vector<Rat>(out.q));
  for (int a = 0; a < out.q; ++a)
    for (int b = 0; b < out.q; ++b) out.density[a][b] = u.density[repr[a]][repr[b]];
  return out;
}

/// Constant graphon as a 1-step kernel.
inline StepKernel constant_kernel(const Rat& p, bool graphon = true) {
  StepKernel u;
  u.q = 1;
  u.measures = {Rat(1)};
  u.density = {{p}};
  u.graphon = graphon;
  return u;
}

}  // namespace qforce
