#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "quasiforce/graph.hpp"
#include "quasiforce/kernel.hpp"

namespace qforce {

// Diagonal-block graphons: value one inside each of the first q parts (measures
// a_1..a_q), zero elsewhere, with a remainder part of measure 1 - sum a_i. Two of
// these agree on every graph with at most q vertices whenever their clique
// densities t(K_2..K_q) coincide, which a small perturbation can arrange.

struct DiagonalBlockGraphon {
  std::vector<Rat> a;

  explicit DiagonalBlockGraphon(std::vector<Rat> a_in) : a(std::move(a_in)) {
    Rat sum(0);
    for (const Rat& x : a) {
      if (!(x > 0)) fail(ErrorKind::UsageError, "block measures must be positive");
      sum += x;
    }
    if (!(sum < 1)) fail(ErrorKind::UsageError, "block measures must sum to less than one");
  }

  int q() const { return static_cast<int>(a.size()); }

  /// The induced (q+1)-part step graphon.
  StepKernel kernel() const {
    int n = q() + 1;
    StepKernel u;
    u.q = n;
    u.graphon = true;
    u.measures = a;
    Rat rest(1);
    for (const Rat& x : a) rest -= x;
    u.measures.push_back(rest);
    u.density.assign(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < q(); ++i) u.density[i][i] = Rat(1);
    return u;
  }
};

/// Component-product density: after deleting isolated vertices, the product over
/// components of sum_j a_j^{n_i}. Works for both exact and floating block measures.
template <class S>
S component_product_density(const Graph& h, const std::vector<S>& a) {
  S total(1);
  auto deg = h.degrees();
  for (const auto& comp : h.components()) {
    if (comp.size() == 1 && deg[comp[0]] == 0) continue;  // isolated vertex
    S block{};
    for (const S& aj : a) {
      S p(1);
      for (std::size_t t = 0; t < comp.size(); ++t) p *= aj;
      block += p;
    }
    total *= block;
  }
  return total;
}

/// One representative per isomorphism class of simple graphs with 1..n_max
/// vertices, by brute-force edge-subset enumeration deduplicated canonically.
inline std::vector<Graph> enumerate_small_graphs(int n_max) {
  if (n_max > 7) fail(ErrorKind::TooLarge, "catalog enumeration limited to 7 vertices");
  std::vector<Graph> out;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<Edge> slots;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) slots.push_back({i, j});
    std::map<std::string, Graph> classes;
    for (std::uint64_t mask = 0; mask < (1ull << slots.size()); ++mask) {
      Graph g(n);
      for (std::size_t e = 0; e < slots.size(); ++e)
        if (mask & (1ull << e)) g.add_edge(slots[e].first, slots[e].second);
      std::string key = canonical_form(g);
      classes.emplace(std::move(key), std::move(g));
    }
    for (auto& [k, g] : classes) out.push_back(std::move(g));
  }
  return out;
}

/// Jacobian of the clique-density map (t(K_2), ..., t(K_q)) with respect to the
/// first q-1 block measures: entry (l, i) = (l+1) a_i^l. Nonsingular for distinct
/// positive coordinates (diagonal times Vandermonde times diagonal).
inline std::vector<std::vector<double>> power_sum_jacobian(const std::vector<double>& a) {
  int q = static_cast<int>(a.size());
  int m = q - 1;
  if (m < 1) fail(ErrorKind::UsageError, "need at least two blocks");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(a[i] - a[j]) < 1e-14) fail(ErrorKind::Singular, "coinciding block measures");
  std::vector<std::vector<double>> jac(m, std::vector<double>(m));
  for (int l = 1; l <= m; ++l)
    for (int i = 0; i < m; ++i) jac[l - 1][i] = (l + 1) * std::pow(a[i], l);
  return jac;
}

namespace detail {

/// Solve J x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> m, std::vector<double> b) {
  int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (std::abs(m[piv][c]) < 1e-300) fail(ErrorKind::Singular, "singular Jacobian");
    std::swap(m[c], m[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < n; ++r) {
      double f = m[r][c] / m[c][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < n; ++k) s -= m[r][k] * x[k];
    x[r] = s / m[r][r];
  }
  return x;
}

}  // namespace detail

/// Newton solve for the perturbed block measures: given the last measure moved to
/// a_q_new, adjust a_1..a_{q-1} so that all clique densities t(K_{l+1}), l in
/// [q-1], keep their original values. Inherently numeric.
inline std::vector<double> solve_perturbation(const std::vector<double>& a, double a_q_new,
                                              double tol = 1e-12, int max_iters = 100) {
  int q = static_cast<int>(a.size());
  if (q < 2) fail(ErrorKind::UsageError, "need at least two blocks");
  std::vector<double> target(q - 1, 0.0);
  for (int l = 1; l <= q - 1; ++l)
    for (int i = 0; i < q; ++i) target[l - 1] += std::pow(a[i], l + 1);
  std::vector<double> x(a.begin(), a.end() - 1);
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> resid(q - 1);
    double worst = 0;
    for (int l = 1; l <= q - 1; ++l) {
      double v = std::pow(a_q_new, l + 1);
      for (double xi : x) v += std::pow(xi, l + 1);
      resid[l - 1] = v - target[l - 1];
      worst = std::max(worst, std::abs(resid[l - 1]));
    }
    if (worst <= tol) {
      std::vector<double> out = x;
      out.push_back(a_q_new);
      double sum = 0;
      for (double v : out) {
        if (v <= 0) fail(ErrorKind::ConstraintViolated, "nonpositive block measure");
        sum += v;
      }
      if (sum >= 1) fail(ErrorKind::ConstraintViolated, "block measures sum past one");
      for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j)
          if (std::abs(out[i] - out[j]) < 1e-13)
            fail(ErrorKind::ConstraintViolated, "perturbed measures collide");
      return out;
    }
    std::vector<double> cur = x;
    cur.push_back(a_q_new);
    auto jac = power_sum_jacobian(cur);  // differentiates the first q-1 coordinates
    auto delta = detail::solve_linear(jac, resid);
    for (int i = 0; i < q - 1; ++i) x[i] -= delta[i];
  }
  fail(ErrorKind::NoConvergence, "Newton iteration did not reach tolerance");
}

struct CounterexampleReport {
  int q = 0;
  double delta_used = 0;
  double tol = 0;
  double max_small_gap = 0;     // over the catalog of <= q-vertex classes
  double clique_gap = 0;        // at K_{q+1}
  bool agrees_below = false;    // all <= q-vertex classes within tol
  bool separated_above = false; // clique gap > 10 tol
  bool part_matching_rejected = false;
  bool valid() const { return agrees_below && separated_above && part_matching_rejected; }
};

struct CounterexamplePair {
  std::vector<double> a_original;
  std::vector<double> a_perturbed;
  NumericKernel u, u2;
  CounterexampleReport report;
};

inline NumericKernel diagonal_block_numeric_kernel(const std::vector<double>& a) {
  int n = static_cast<int>(a.size()) + 1;
  NumericKernel u;
  u.q = n;
  u.graphon = true;
  u.measures = a;
  double rest = 1;
  for (double x : a) rest -= x;
  u.measures.push_back(rest);
  u.density.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i + 1 < n; ++i) u.density[i][i] = 1.0;
  return u;
}

/// The counterexample pair: two diagonal-block graphons agreeing (within tol) on
/// every graph with at most q vertices yet differing at K_{q+1}. Halves delta up
/// to 20 times when the solve fails or the report rejects the pair.
inline CounterexamplePair build_counterexample_pair(const std::vector<Rat>& a_exact, double delta,
                                                    double tol = 1e-12) {
  DiagonalBlockGraphon base(a_exact);  // validates positivity and total mass
  int q = base.q();
  std::vector<double> a(q);
  for (int i = 0; i < q; ++i) a[i] = to_double(a_exact[i]);

  for (int attempt = 0; attempt <= 20; ++attempt, delta /= 2) {
    std::vector<double> a2;
    try {
      a2 = solve_perturbation(a, a[q - 1] + delta, tol);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoConvergence || e.kind() == ErrorKind::ConstraintViolated)
        continue;
      throw;
    }
    CounterexamplePair pair;
    pair.a_original = a;
    pair.a_perturbed = a2;
    pair.u = diagonal_block_numeric_kernel(a);
    pair.u2 = diagonal_block_numeric_kernel(a2);
    auto& rep = pair.report;
    rep.q = q;
    rep.delta_used = delta;
    rep.tol = tol;
    rep.max_small_gap = 0;
    for (const Graph& h : enumerate_small_graphs(q)) {
      double gap = std::abs(component_product_density(h, a) - component_product_density(h, a2));
      rep.max_small_gap = std::max(rep.max_small_gap, gap);
    }
    rep.agrees_below = rep.max_small_gap <= tol;
    double t1 = 0, t2 = 0;
    for (double x : a) t1 += std::pow(x, q + 1);
    for (double x : a2) t2 += std::pow(x, q + 1);
    rep.clique_gap = std::abs(t1 - t2);
    rep.separated_above = rep.clique_gap > 10 * tol;
    rep.part_matching_rejected = !weak_iso_numeric(pair.u, pair.u2, 1e-9).has_value();
    if (rep.valid()) return pair;
    // delta == 0 or a borderline near-permutation: shrink and retry
    if (delta == 0) return pair;  // nothing to shrink; caller sees the failing report
  }
  fail(ErrorKind::NoConvergence, "no valid counterexample pair within the delta halvings");
}

}  // namespace qforce
