#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasiforce/catalog.hpp"
#include "quasiforce/gadgets.hpp"
#include "quasiforce/kernel.hpp"
#include "quasiforce/polynomial.hpp"

namespace qforce {

// -- pipeline stage probes --------------------------------------------------------

/// Smallest k <= q_max with a vanishing (k+1)-th step probe: the detected number
/// of steps. Nothing if every probe up to q_max + 1 is positive.
inline std::optional<int> detect_steps(const StepKernel& u2, int q_max) {
  if (q_max < 1) fail(ErrorKind::UsageError, "q_max must be positive");
  for (int k = 1; k <= q_max; ++k)
    if (is_zero(step_probe_density(u2, k + 1))) return k;
  return std::nullopt;
}

struct ProbeResult {
  bool matched = false;
  Rat density;  // exact value of the probe quantum graph on the kernel
};

namespace detail {

inline Rat squared_vanishing_poly_sum(const std::vector<Rat>& values,
                                      const std::vector<Rat>& d_set) {
  Rat acc(0);
  for (const Rat& v : values) {
    Rat p(1);
    for (const Rat& d : d_set) {
      Rat t = v - d;
      p *= t * t;
    }
    acc += p;
  }
  return acc;
}

inline Rat measure_power_product(const StepKernel& u, int power) {
  Rat prod(1);
  for (const Rat& a : u.measures) prod *= pow_rat(a, power);
  return prod;
}

inline Rat factorial(int n) {
  Rat f(1);
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Density of the part-density probe R_{d_set} on u2, via its closed form
/// d0 (q-1)! (prod a_i^{q+2}) (sum_i p(p_i)) with p(x) = prod (x-d)^2.
/// Zero exactly when every part density of u2 lies in d_set.
inline ProbeResult check_part_densities(const StepKernel& u2, const std::vector<Rat>& d_set) {
  if (static_cast<int>(d_set.size()) > u2.q)
    fail(ErrorKind::UsageError, "more target part densities than parts");
  std::vector<Rat> diag(u2.q);
  for (int i = 0; i < u2.q; ++i) diag[i] = u2.density[i][i];
  Rat s = detail::squared_vanishing_poly_sum(diag, d_set);
  ProbeResult r;
  r.density = selector_value(u2) * detail::factorial(u2.q - 1) *
              detail::measure_power_product(u2, u2.q + 2) * s;
  r.matched = is_zero(r.density);
  return r;
}

/// Density of the pair-density probe S_{d_set}: closed form
/// 2 d0 (q-2)! (prod a_i^{q+2}) (sum_{i<j} p(p_ij)).
inline ProbeResult check_pair_densities(const StepKernel& u2, const std::vector<Rat>& d_set) {
  if (u2.q < 2) fail(ErrorKind::UsageError, "pair densities need q >= 2");
  if (static_cast<int>(d_set.size()) > u2.q * (u2.q - 1) / 2)
    fail(ErrorKind::UsageError, "more target pair densities than pairs");
  std::vector<Rat> off;
  for (int i = 0; i < u2.q; ++i)
    for (int j = i + 1; j < u2.q; ++j) off.push_back(u2.density[i][j]);
  Rat s = detail::squared_vanishing_poly_sum(off, d_set);
  ProbeResult r;
  r.density = Rat(2) * selector_value(u2) * detail::factorial(u2.q - 2) *
              detail::measure_power_product(u2, u2.q + 2) * s;
  r.matched = is_zero(r.density);
  return r;
}

namespace detail {

/// prod over i<=j of prod_{z in Z\{D_target[i][j]}} (v.density[pi(i)][pi(j)] - z),
/// the polynomial part of the matrix probe at a surviving pattern.
inline Rat matrix_pattern_poly(const StepKernel& v, const std::vector<std::vector<Rat>>& d_target,
                               const std::vector<int>& pi, const std::vector<Rat>& z1,
                               const std::vector<Rat>& z2) {
  int q = v.q;
  Rat out(1);
  for (int i = 0; i < q && !is_zero(out); ++i)
    for (const Rat& z : z1)
      if (z != d_target[i][i]) out *= (v.density[pi[i]][pi[i]] - z);
  for (int i = 0; i < q && !is_zero(out); ++i)
    for (int j = i + 1; j < q; ++j)
      for (const Rat& z : z2)
        if (z != d_target[i][j]) out *= (v.density[pi[i]][pi[j]] - z);
  return out;
}

}  // namespace detail

/// Unrooted density of the matrix probe T_{s} built from d_target, on v. Sums the
/// q! surviving patterns; group sizes default to (q+2, ..., q+2).
inline Rat matrix_probe_density(const StepKernel& v, const std::vector<std::vector<Rat>>& d_target,
                                std::vector<int> s = {}) {
  int q = v.q;
  if (static_cast<int>(d_target.size()) != q)
    fail(ErrorKind::UsageError, "matrix size must match part count");
  if (s.empty()) s.assign(q, q + 2);
  auto z1 = diagonal_value_set(d_target);
  auto z2 = offdiagonal_value_set(d_target);
  Rat d0 = selector_value(v);
  std::vector<int> pi(q);
  std::iota(pi.begin(), pi.end(), 0);
  Rat total(0);
  do {
    Rat poly = detail::matrix_pattern_poly(v, d_target, pi, z1, z2);
    if (is_zero(poly)) continue;
    Rat w(1);
    for (int i = 0; i < q; ++i) w *= pow_rat(v.measures[pi[i]], s[i]);
    total += w * poly;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return total * d0;
}

/// Part relabeling pi of u2 with u2.density[pi[i]][pi[j]] = d_target[i][j] for all
/// i, j, confirmed by a nonzero matrix-probe density; nothing when the probe is zero.
inline std::optional<std::vector<int>> match_density_matrix(
    const StepKernel& u2, const std::vector<std::vector<Rat>>& d_target, Rat* density_out = nullptr) {
  Rat t = matrix_probe_density(u2, d_target);
  if (density_out) *density_out = t;
  if (is_zero(t)) return std::nullopt;
  int q = u2.q;
  std::vector<int> pi(q);
  std::iota(pi.begin(), pi.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i < q && ok; ++i)
      for (int j = i; j < q && ok; ++j)
        if (u2.density[pi[i]][pi[j]] != d_target[i][j]) ok = false;
    if (ok) return pi;
  } while (std::next_permutation(pi.begin(), pi.end()));
  fail(ErrorKind::UsageError, "nonzero matrix probe without a matching relabeling");
}

/// Moment density t(P_{q+2+k, q+2, ..., q+2}) of v; k = 0 is the normalizer.
inline Rat moment_density(const StepKernel& v, int k) {
  int q = v.q;
  std::vector<int> s(q, q + 2);
  s[0] += k;
  return selector_density(make_selector(q, s), v);
}

struct MeasureRecovery {
  bool exact = true;
  std::vector<Rat> measures;            // sorted multiset when exact
  std::vector<double> numeric_fallback;  // filled when not exact
  std::vector<Rat> power_sums;          // z_1..z_q from the density ratios
};

/// Measures of a q-step kernel from moment-density ratios: power sums in, exact
/// multiset out via Newton's identities and rational root extraction.
inline MeasureRecovery recover_measures(const StepKernel& u2, int q) {
  MeasureRecovery rec;
  if (q == 1) {
    rec.measures = {Rat(1)};
    rec.power_sums = {Rat(1)};
    return rec;
  }
  if (u2.q != q) fail(ErrorKind::UsageError, "kernel is not q-step");
  Rat base = moment_density(u2, 0);
  if (is_zero(base)) fail(ErrorKind::PreconditionViolated, "vanishing selector normalizer");
  for (int k = 1; k <= q; ++k)
    rec.power_sums.push_back(Rat(q) * moment_density(u2, k) / base);
  try {
    rec.measures = multiset_from_power_sums(rec.power_sums);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IrrationalMeasures) throw;
    rec.exact = false;
    auto e_(power_sums_to_elementary(rec.power_sums));
    rec.numeric_fallback = numeric_roots(elementary_to_monic(e_));
  }
  return rec;
}

// -- certificates -------------------------------------------------------------------

struct StageLog {
  std::string name;
  Rat t_u, t_u2;
  bool passed = false;  // the stage's forcing condition held for u2
  int max_vertices = 0;  // largest constituent of the probe evaluated here
};

struct WitnessResult {
  Graph witness;
  Rat density_u, density_u2;
};

struct ForcingCertificate {
  enum class Verdict { WeaklyIsomorphic, Distinguished, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::vector<int> permutation;  // parts of u -> parts of u2
  std::optional<WitnessResult> witness;
  std::vector<StageLog> stages;
  int vertex_budget = 0;
  std::string note;

  int max_stage_vertices() const {
    int m = 0;
    for (const auto& s : stages) m = std::max(m, s.max_vertices);
    return m;
  }
};

struct PipelineOptions {
  bool extract_witness = true;
  int witness_scan_cap = 256;    // constituents examined per differing probe
  bool minimize_witness = true;
  EvalLimits eval;
};

// -- witness extraction ---------------------------------------------------------------

namespace detail {

inline bool densities_differ(const Graph& h, const StepKernel& u, const StepKernel& u2,
                             const EvalLimits& lim, Rat& du, Rat& du2) {
  du = hom_density(h, u, lim);
  du2 = hom_density(h, u2, lim);
  return du != du2;
}

/// Greedy shrink keeping the density gap nonzero: bulk vertex deletion first
/// (halving chunks), then single vertices, then single edges.
inline WitnessResult minimize_witness(Graph h, const StepKernel& u, const StepKernel& u2,
                                      const EvalLimits& lim) {
  Rat du, du2;
  densities_differ(h, u, u2, lim, du, du2);
  int chunk = std::max(1, h.vertex_count() / 2);
  while (chunk >= 1) {
    bool shrunk = false;
    for (int start = 0; start + chunk <= h.vertex_count();) {
      std::vector<int> keep;
      for (int v = 0; v < h.vertex_count(); ++v)
        if (v < start || v >= start + chunk) keep.push_back(v);
      if (keep.empty()) {
        ++start;
        continue;
      }
      Graph cand = h.induced(keep);
      Rat c1, c2;
      bool diff = false;
      try {
        diff = densities_differ(cand, u, u2, lim, c1, c2);
      } catch (const Error&) {
        diff = false;
      }
      if (diff) {
        h = std::move(cand);
        du = c1;
        du2 = c2;
        shrunk = true;
        // same start now points at fresh vertices
      } else {
        ++start;
      }
    }
    if (!shrunk) chunk /= 2;
  }
  // single-edge pass
  for (std::size_t e = 0; e < h.edges().size();) {
    auto [a, b] = h.edges()[e];
    Graph cand = h.without_edge(a, b);
    Rat c1, c2;
    bool diff = false;
    try {
      diff = densities_differ(cand, u, u2, lim, c1, c2);
    } catch (const Error&) {
      diff = false;
    }
    if (diff) {
      h = std::move(cand);
      du = c1;
      du2 = c2;
    } else {
      ++e;
    }
  }
  // drop isolated vertices left behind (they never affect densities)
  std::vector<int> keep;
  auto deg = h.degrees();
  for (int v = 0; v < h.vertex_count(); ++v)
    if (deg[v] > 0) keep.push_back(v);
  if (!keep.empty() && static_cast<int>(keep.size()) < h.vertex_count()) {
    Graph cand = h.induced(keep);
    Rat c1, c2;
    if (densities_differ(cand, u, u2, lim, c1, c2)) {
      h = std::move(cand);
      du = c1;
      du2 = c2;
    }
  }
  return {h, du, du2};
}

/// First constituent of the factored probe whose plain density separates u and u2.
inline std::optional<WitnessResult> witness_from_factored(const FactoredRootedQuantum& src,
                                                          const StepKernel& u, const StepKernel& u2,
                                                          const PipelineOptions& opt) {
  std::vector<int> choice(src.factors.size(), 0);
  for (int scanned = 0; scanned < opt.witness_scan_cap; ++scanned) {
    int sign;
    Graph h = src.constituent(choice, sign).graph;
    Rat du, du2;
    bool diff = false;
    try {
      diff = densities_differ(h, u, u2, opt.eval, du, du2);
    } catch (const Error&) {
      diff = false;
    }
    if (diff) {
      if (opt.minimize_witness) return minimize_witness(h, u, u2, opt.eval);
      return WitnessResult{h, du, du2};
    }
    std::size_t d = 0;
    while (d < src.factors.size() && ++choice[d] == static_cast<int>(src.factors[d].size()))
      choice[d++] = 0;
    if (d == src.factors.size()) break;
  }
  return std::nullopt;
}

inline std::optional<WitnessResult> witness_from_quantum(const QuantumGraph& qg,
                                                         const StepKernel& u, const StepKernel& u2,
                                                         const PipelineOptions& opt) {
  int scanned = 0;
  for (const auto& [c, h] : qg.terms) {
    if (++scanned > opt.witness_scan_cap) break;
    Rat du, du2;
    if (densities_differ(h, u, u2, opt.eval, du, du2)) {
      if (opt.minimize_witness) return minimize_witness(h, u, u2, opt.eval);
      return WitnessResult{h, du, du2};
    }
  }
  return std::nullopt;
}

/// Decorated selector for a monomial of the R / S probes: m edges inside group 0
/// (part densities) or between groups 0 and 1 (pair densities).
inline SelectorGadget decorated_selector(int q, const std::vector<int>& s, bool within, int m) {
  SelectorGadget sel = make_selector(q, s);
  if (m > 0) add_decorations(sel, 0, within ? 0 : 1, m);
  return sel;
}

/// Decorated selector for a matrix-probe monomial: m_ij edges per group block.
inline SelectorGadget block_decorated_selector(int q, const std::vector<int>& s,
                                               const std::vector<std::vector<int>>& m) {
  SelectorGadget sel = make_selector(q, s);
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j)
      if (m[i][j] > 0) add_decorations(sel, i, j, m[i][j]);
  return sel;
}

/// Witness descent through a univariate polynomial probe (R or S): find the
/// monomial whose decorated-selector density differs, then scan its constituents.
inline std::optional<WitnessResult> witness_from_poly_probe(const StepKernel& u,
                                                            const StepKernel& u2,
                                                            const std::vector<Rat>& d_set,
                                                            bool within,
                                                            const PipelineOptions& opt) {
  int q = u.q;
  std::vector<int> s(q, q + 2);
  Poly p{Rat(1)};
  for (const Rat& d : d_set) p = poly_mul(p, poly_mul(Poly{-d, Rat(1)}, Poly{-d, Rat(1)}));
  for (int m = 0; m < static_cast<int>(p.size()); ++m) {
    if (is_zero(p[m])) continue;
    SelectorGadget sel = decorated_selector(q, s, within, m);
    if (selector_density(sel, u) != selector_density(sel, u2))
      return witness_from_factored(selector_factored(sel), u, u2, opt);
  }
  return std::nullopt;
}

/// Per-variable factor polynomials of the matrix probe, indexed by block (i, j).
inline std::vector<std::vector<Poly>> matrix_probe_block_polys(
    const std::vector<std::vector<Rat>>& d_target) {
  int q = static_cast<int>(d_target.size());
  auto z1 = diagonal_value_set(d_target);
  auto z2 = offdiagonal_value_set(d_target);
  std::vector<std::vector<Poly>> h(q, std::vector<Poly>(q));
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) {
      Poly f{Rat(1)};
      const auto& zs = (i == j) ? z1 : z2;
      for (const Rat& z : zs)
        if (z != d_target[i][j]) f = poly_mul(f, Poly{-z, Rat(1)});
      h[i][j] = f;
    }
  return h;
}

/// Density of one decorated matrix-probe monomial on v without expansion.
inline Rat block_monomial_density(const StepKernel& v, const std::vector<int>& s,
                                  const std::vector<std::vector<int>>& m) {
  int q = v.q;
  Rat d0 = selector_value(v);
  std::vector<int> pi(q);
  std::iota(pi.begin(), pi.end(), 0);
  Rat total(0);
  do {
    Rat w(1);
    for (int i = 0; i < q; ++i) w *= pow_rat(v.measures[pi[i]], s[i]);
    for (int i = 0; i < q; ++i)
      for (int j = i; j < q; ++j)
        if (m[i][j] > 0) w *= pow_rat(v.density[pi[i]][pi[j]], m[i][j]);
    total += w;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return total * d0;
}

/// Witness descent through the matrix probe T_{s}: locate the differing block
/// monomial of its defining polynomial, then scan that decorated selector.
inline std::optional<WitnessResult> witness_from_matrix_probe(
    const StepKernel& u, const StepKernel& u2, const std::vector<std::vector<Rat>>& d_target,
    const std::vector<int>& s, const PipelineOptions& opt) {
  int q = u.q;
  auto blocks = matrix_probe_block_polys(d_target);
  std::vector<std::pair<int, int>> vars;
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) vars.push_back({i, j});
  std::vector<int> exp(vars.size(), 0);
  while (true) {
    Rat coeff(1);
    for (std::size_t k = 0; k < vars.size(); ++k) {
      auto [i, j] = vars[k];
      coeff *= blocks[i][j][exp[k]];
      if (is_zero(coeff)) break;
    }
    if (!is_zero(coeff)) {
      std::vector<std::vector<int>> m(q, std::vector<int>(q, 0));
      for (std::size_t k = 0; k < vars.size(); ++k) m[vars[k].first][vars[k].second] = exp[k];
      if (block_monomial_density(u, s, m) != block_monomial_density(u2, s, m))
        return witness_from_factored(selector_factored(block_decorated_selector(q, s, m)), u, u2,
                                     opt);
    }
    std::size_t d = 0;
    while (d < vars.size()) {
      auto [i, j] = vars[d];
      if (++exp[d] < static_cast<int>(blocks[i][j].size())) break;
      exp[d++] = 0;
    }
    if (d == vars.size()) break;
  }
  return std::nullopt;
}

}  // namespace detail

// -- the main forcing pipeline --------------------------------------------------------

/// Density of the final alignment probe: the matrix probe
/// composed with the measure-separating polynomial of u's measures, evaluated on v
/// through its q! surviving patterns.
inline Rat alignment_probe_density(const StepKernel& v, const std::vector<std::vector<Rat>>& d_target,
                                   const std::vector<Rat>& u_measures) {
  int q = v.q;
  auto z1 = diagonal_value_set(d_target);
  auto z2 = offdiagonal_value_set(d_target);
  std::set<Rat> mset(u_measures.begin(), u_measures.end());
  Rat d0 = selector_value(v);
  std::vector<int> pi(q);
  std::iota(pi.begin(), pi.end(), 0);
  Rat total(0);
  do {
    Rat poly = detail::matrix_pattern_poly(v, d_target, pi, z1, z2);
    if (is_zero(poly)) continue;
    Rat w(1);
    for (int i = 0; i < q; ++i) {
      // g_i(x) = x^{q+2} prod_{a in mset \ {a_i}} (x - a), at x = v.measures[pi[i]]
      const Rat& x = v.measures[pi[i]];
      w *= pow_rat(x, q + 2);
      for (const Rat& a : mset)
        if (a != u_measures[i]) w *= (x - a);
      if (is_zero(w)) break;
    }
    total += w * poly;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return total * d0;
}

/// Largest constituent of the alignment probe: sum_i deg(g_i) plus the selector
/// non-roots. Equals 4q^2 - q when the measures are pairwise distinct.
inline int alignment_probe_max_vertices(const StepKernel& u) {
  int q = u.q;
  std::set<Rat> mset(u.measures.begin(), u.measures.end());
  int total = 2 * q * (q - 1);
  for (int i = 0; i < q; ++i) {
    int deg = q + 2;
    for (const Rat& a : mset)
      if (a != u.measures[i]) ++deg;
    total += deg;
  }
  return total;
}

namespace detail {

inline void push_stage(ForcingCertificate& cert, std::string name, Rat tu, Rat tu2, bool passed,
                       int max_vertices, int budget) {
  if (max_vertices > budget)
    fail(ErrorKind::BudgetExceeded,
         "probe exceeds the vertex budget: " + std::to_string(max_vertices) + " > " +
             std::to_string(budget));
  StageLog log;
  log.name = std::move(name);
  log.t_u = std::move(tu);
  log.t_u2 = std::move(tu2);
  log.passed = passed;
  log.max_vertices = max_vertices;
  cert.stages.push_back(std::move(log));
}

inline ForcingCertificate constant_kernel_pipeline(const StepKernel& u, const StepKernel& u2,
                                                   const PipelineOptions& opt) {
  // 1-step case: the classical edge + 4-cycle pair within budget max(4q^2-q, 4)
  ForcingCertificate cert;
  cert.vertex_budget = 4;
  Graph k2 = complete_graph(2), c4 = cycle_graph(4);
  Rat e_u = hom_density(k2, u), e_u2 = hom_density(k2, u2);
  push_stage(cert, "edge-density", e_u, e_u2, e_u == e_u2, 2, cert.vertex_budget);
  if (e_u != e_u2) {
    cert.verdict = ForcingCertificate::Verdict::Distinguished;
    cert.witness = WitnessResult{k2, e_u, e_u2};
    return cert;
  }
  Rat c_u = hom_density(c4, u), c_u2 = hom_density(c4, u2);
  push_stage(cert, "four-cycle-density", c_u, c_u2, c_u == c_u2, 4, cert.vertex_budget);
  if (c_u != c_u2) {
    cert.verdict = ForcingCertificate::Verdict::Distinguished;
    cert.witness = WitnessResult{c4, c_u, c_u2};
    return cert;
  }
  auto pi = weak_iso(u, u2);
  if (!pi) {
    cert.verdict = ForcingCertificate::Verdict::Inconclusive;
    cert.note = "probe densities agree but no part matching exists";
    return cert;
  }
  cert.verdict = ForcingCertificate::Verdict::WeaklyIsomorphic;
  cert.permutation = *pi;
  return cert;
}

}  // namespace detail

/// Main forcing pipeline: decides weak isomorphism of two minimal step kernels by
/// evaluating only graphs with at most 4q^2 - q vertices, in the
/// step-count / part-density / pair-density / matrix / moments / alignment order.
/// Every stage logs exact densities; the first differing stage drives witness
/// extraction.
inline ForcingCertificate forcing_pipeline(const StepKernel& u, const StepKernel& u2,
                                           const PipelineOptions& opt = {}) {
  validate_kernel(u, true);
  validate_kernel(u2, true);
  int q = u.q;
  if (q == 1) return detail::constant_kernel_pipeline(u, u2, opt);

  ForcingCertificate cert;
  cert.vertex_budget = 4 * q * q - q;
  auto distinguished = [&](std::optional<WitnessResult> w, const std::string& note) {
    cert.verdict = ForcingCertificate::Verdict::Distinguished;
    if (w) {
      cert.witness = std::move(w);
    } else if (opt.extract_witness) {
      cert.note = "witness extraction failed: " + note;
    }
    return cert;
  };

  // stage 1: step count. Q_{q+1} must vanish on u2 and Q_q must not.
  {
    Rat hi_u = step_probe_density(u, q + 1), hi_u2 = step_probe_density(u2, q + 1);
    detail::push_stage(cert, "step-probe(q+1)", hi_u, hi_u2, is_zero(hi_u2), (q + 1) * (q + 2),
                       cert.vertex_budget);
    if (!is_zero(hi_u2)) {
      std::optional<WitnessResult> w;
      if (opt.extract_witness)
        w = detail::witness_from_factored(step_probe_factored(q + 1), u, u2, opt);
      return distinguished(std::move(w), "step probe q+1");
    }
    Rat lo_u = step_probe_density(u, q), lo_u2 = step_probe_density(u2, q);
    detail::push_stage(cert, "step-probe(q)", lo_u, lo_u2, !is_zero(lo_u2), q * (q + 1),
                       cert.vertex_budget);
    if (is_zero(lo_u2)) {
      std::optional<WitnessResult> w;
      if (opt.extract_witness)
        w = detail::witness_from_factored(step_probe_factored(q), u, u2, opt);
      return distinguished(std::move(w), "step probe q");
    }
  }
  // from here on u2 is an exactly-q-step minimal kernel (same q as u)

  // stage 2: every part density of u2 must be one of u's diagonal values
  std::vector<Rat> z1 = diagonal_value_set(u.density);
  {
    auto r_u = check_part_densities(u, z1);
    auto r_u2 = check_part_densities(u2, z1);
    detail::push_stage(cert, "part-density-probe", r_u.density, r_u2.density, r_u2.matched,
                       3 * q * q, cert.vertex_budget);
    if (!r_u2.matched) {
      std::optional<WitnessResult> w;
      if (opt.extract_witness) w = detail::witness_from_poly_probe(u, u2, z1, true, opt);
      return distinguished(std::move(w), "part-density probe");
    }
  }

  // stage 3: every pair density of u2 must be one of u's off-diagonal values
  std::vector<Rat> z2 = offdiagonal_value_set(u.density);
  {
    auto r_u = check_pair_densities(u, z2);
    auto r_u2 = check_pair_densities(u2, z2);
    detail::push_stage(cert, "pair-density-probe", r_u.density, r_u2.density, r_u2.matched,
                       3 * q * q, cert.vertex_budget);
    if (!r_u2.matched) {
      std::optional<WitnessResult> w;
      if (opt.extract_witness) w = detail::witness_from_poly_probe(u, u2, z2, false, opt);
      return distinguished(std::move(w), "pair-density probe");
    }
  }

  // stage 4: a nonzero matrix probe aligns u2's density matrix with u's
  std::vector<int> base_sizes(q, q + 2);
  {
    Rat t_u = matrix_probe_density(u, u.density);
    Rat t_u2;
    auto relabel = match_density_matrix(u2, u.density, &t_u2);
    detail::push_stage(cert, "matrix-probe", t_u, t_u2, relabel.has_value(), 3 * q * q,
                       cert.vertex_budget);
    if (!relabel) {
      std::optional<WitnessResult> w;
      if (opt.extract_witness)
        w = detail::witness_from_matrix_probe(u, u2, u.density, base_sizes, opt);
      return distinguished(std::move(w), "matrix probe");
    }
  }

  // stage 5: measure multisets through moment-density ratios (power sums)
  {
    Rat base_u = moment_density(u, 0);
    Rat base_u2 = moment_density(u2, 0);
    detail::push_stage(cert, "measure-moment(0)", base_u, base_u2,
                       !is_zero(base_u) && !is_zero(base_u2), 3 * q * q, cert.vertex_budget);
    for (int k = 1; k <= q; ++k) {
      Rat m_u = moment_density(u, k);
      Rat m_u2 = moment_density(u2, k);
      bool same_power_sum = (m_u * base_u2 == m_u2 * base_u);
      detail::push_stage(cert, "measure-moment(" + std::to_string(k) + ")", m_u, m_u2,
                         same_power_sum, 3 * q * q + k, cert.vertex_budget);
      if (!same_power_sum) {
        std::optional<WitnessResult> w;
        if (opt.extract_witness) {
          // one of the raw moment densities must differ; descend into it
          int diff_k = (base_u != base_u2) ? 0 : k;
          std::vector<int> s(q, q + 2);
          s[0] += diff_k;
          w = detail::witness_from_factored(selector_factored(make_selector(q, s)), u, u2, opt);
        }
        return distinguished(std::move(w), "measure moment " + std::to_string(k));
      }
    }
  }

  // stage 6: simultaneous measure and matrix alignment (nonzero final probe)
  {
    Rat t_u = alignment_probe_density(u, u.density, u.measures);
    Rat t_u2 = alignment_probe_density(u2, u.density, u.measures);
    detail::push_stage(cert, "alignment-probe", t_u, t_u2, !is_zero(t_u2),
                       alignment_probe_max_vertices(u), cert.vertex_budget);
    if (is_zero(t_u2)) {
      std::optional<WitnessResult> w;
      if (opt.extract_witness) {
        // descend through the outer measure polynomial, then the matrix monomials
        std::set<Rat> mset(u.measures.begin(), u.measures.end());
        std::vector<Poly> g(q);
        for (int i = 0; i < q; ++i) {
          Poly gi{Rat(1)};
          for (const Rat& a : mset)
            if (a != u.measures[i]) gi = poly_mul(gi, Poly{-a, Rat(1)});
          g[i] = gi;
        }
        std::vector<int> exp(q, 0);
        while (!w) {
          Rat coeff(1);
          for (int i = 0; i < q; ++i) {
            coeff *= g[i][exp[i]];
            if (is_zero(coeff)) break;
          }
          if (!is_zero(coeff)) {
            std::vector<int> s(q);
            for (int i = 0; i < q; ++i) s[i] = q + 2 + exp[i];
            if (matrix_probe_density(u, u.density, s) != matrix_probe_density(u2, u.density, s))
              w = detail::witness_from_matrix_probe(u, u2, u.density, s, opt);
          }
          int d = 0;
          while (d < q && ++exp[d] == static_cast<int>(g[d].size())) exp[d++] = 0;
          if (d == q) break;
        }
      }
      return distinguished(std::move(w), "alignment probe");
    }
  }

  // all probes agree: a measure- and density-aligning permutation must exist
  auto pi = weak_iso(u, u2);
  if (!pi) {
    cert.verdict = ForcingCertificate::Verdict::Inconclusive;
    cert.note = "all probe densities agree but no part matching exists";
    return cert;
  }
  cert.verdict = ForcingCertificate::Verdict::WeaklyIsomorphic;
  cert.permutation = *pi;
  return cert;
}

/// A single graph within the 4q^2 - q budget whose densities in u and u2 differ,
/// with both exact values. Requires the kernels not to be weakly isomorphic.
inline WitnessResult distinguishing_graph(const StepKernel& u, const StepKernel& u2,
                                          const PipelineOptions& opt_in = {}) {
  int qmax = std::max(u.q, u2.q);
  if (qmax > 3) fail(ErrorKind::BudgetExceeded, "witness extraction is budgeted to q <= 3");
  PipelineOptions opt = opt_in;
  opt.extract_witness = true;
  ForcingCertificate cert = forcing_pipeline(u, u2, opt);
  if (cert.verdict == ForcingCertificate::Verdict::WeaklyIsomorphic)
    fail(ErrorKind::UsageError, "kernels are weakly isomorphic; no witness exists");
  if (!cert.witness) fail(ErrorKind::BudgetExceeded, "witness scan exhausted its budget");
  return *cert.witness;
}

// -- degree pipeline (distinct part degrees) ---------------------------------------

/// unlabel(prod_i (K2* - d_i K1*)^2) when squared, or the same product without
/// squaring and skipping index `skip`: stars with coefficient products.
inline QuantumGraph degree_filter_probe(const std::vector<Rat>& degs, bool squared,
                                        int skip = -1) {
  std::vector<Rat> ds;
  for (int i = 0; i < static_cast<int>(degs.size()); ++i) {
    if (i == skip) continue;
    ds.push_back(degs[i]);
    if (squared) ds.push_back(degs[i]);
  }
  int f = static_cast<int>(ds.size());
  QuantumGraph out;
  for (int mask = 0; mask < (1 << f); ++mask) {
    Rat coeff(1);
    int pendants = 0;
    for (int i = 0; i < f; ++i) {
      if (mask & (1 << i))
        ++pendants;
      else
        coeff *= -ds[i];
    }
    Graph star(1 + pendants);
    for (int p = 0; p < pendants; ++p) star.add_edge(0, 1 + p);
    out.add_term(coeff, std::move(star));
  }
  return merge_isomorphic(out);
}

/// unlabel(H_kl) or unlabel(H'_kl): double stars built from the degree factors of
/// the two roots, optionally joined by the root edge.
inline QuantumGraph degree_pair_probe(const std::vector<Rat>& degs, int k, int l, bool with_edge) {
  std::vector<Rat> left, right;
  for (int i = 0; i < static_cast<int>(degs.size()); ++i) {
    if (i != k) left.push_back(degs[i]);
    if (i != l) right.push_back(degs[i]);
  }
  int fl = static_cast<int>(left.size()), fr = static_cast<int>(right.size());
  QuantumGraph out;
  for (int ml = 0; ml < (1 << fl); ++ml)
    for (int mr = 0; mr < (1 << fr); ++mr) {
      Rat coeff(1);
      int pl = 0, pr = 0;
      for (int i = 0; i < fl; ++i) {
        if (ml & (1 << i))
          ++pl;
        else
          coeff *= -left[i];
      }
      for (int i = 0; i < fr; ++i) {
        if (mr & (1 << i))
          ++pr;
        else
          coeff *= -right[i];
      }
      Graph g(2 + pl + pr);
      if (with_edge) g.add_edge(0, 1);
      for (int p = 0; p < pl; ++p) g.add_edge(0, 2 + p);
      for (int p = 0; p < pr; ++p) g.add_edge(1, 2 + pl + p);
      out.add_term(coeff, std::move(g));
    }
  return merge_isomorphic(out);
}

/// Closed form of the pair probe on u itself: a_k a_l prod_{i != k} (d_k - d_i)
/// prod_{j != l} (d_l - d_j), times D_kl when the root edge is present.
inline Rat degree_pair_probe_closed_form(const StepKernel& u, int k, int l, bool with_edge) {
  auto d = degree_vector(u);
  Rat v = u.measures[k] * u.measures[l];
  if (with_edge) v *= u.density[k][l];
  for (int i = 0; i < u.q; ++i) {
    if (i != k) v *= (d[k] - d[i]);
    if (i != l) v *= (d[l] - d[i]);
  }
  return v;
}

/// Degree pipeline: for kernels whose parts have pairwise distinct degrees,
/// decides weak isomorphism with probes on at most 2q+1 vertices.
inline ForcingCertificate degree_forcing_pipeline(const StepKernel& u, const StepKernel& u2,
                                                  const PipelineOptions& opt = {}) {
  validate_kernel(u, true);
  validate_kernel(u2, true);
  int q = u.q;
  if (q < 2) fail(ErrorKind::UsageError, "degree pipeline needs q >= 2");
  auto degs = degree_vector(u);
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      if (degs[i] == degs[j])
        fail(ErrorKind::DegreesNotDistinct,
             "parts " + std::to_string(i) + " and " + std::to_string(j) + " share a degree");

  ForcingCertificate cert;
  cert.vertex_budget = 2 * q + 1;
  auto run_stage = [&](const std::string& name, const QuantumGraph& probe)
      -> std::optional<ForcingCertificate> {
    Rat t_u = quantum_density(probe, u, opt.eval);
    Rat t_u2 = quantum_density(probe, u2, opt.eval);
    detail::push_stage(cert, name, t_u, t_u2, t_u == t_u2, probe.max_constituent_vertices(),
                       cert.vertex_budget);
    if (t_u != t_u2) {
      cert.verdict = ForcingCertificate::Verdict::Distinguished;
      if (opt.extract_witness) {
        cert.witness = detail::witness_from_quantum(probe, u, u2, opt);
        if (!cert.witness) cert.note = "witness extraction failed at " + name;
      }
      return cert;
    }
    return std::nullopt;
  };

  if (auto c = run_stage("degree-filter", degree_filter_probe(degs, true))) return *c;
  for (int k = 0; k < q; ++k)
    if (auto c = run_stage("degree-measure(" + std::to_string(k) + ")",
                           degree_filter_probe(degs, false, k)))
      return *c;
  for (int k = 0; k < q; ++k)
    for (int l = k; l < q; ++l) {
      if (auto c = run_stage("degree-pair(" + std::to_string(k) + "," + std::to_string(l) + ")",
                             degree_pair_probe(degs, k, l, false)))
        return *c;
      if (auto c = run_stage("degree-pair-edge(" + std::to_string(k) + "," + std::to_string(l) + ")",
                             degree_pair_probe(degs, k, l, true)))
        return *c;
    }
  {
    QuantumGraph c4q;
    c4q.add_term(Rat(1), cycle_graph(4));
    if (auto c = run_stage("four-cycle", c4q)) return *c;
  }

  auto pi = weak_iso(u, u2);
  if (!pi) {
    cert.verdict = ForcingCertificate::Verdict::Inconclusive;
    cert.note = "all degree probes agree but no part matching exists";
    return cert;
  }
  cert.verdict = ForcingCertificate::Verdict::WeaklyIsomorphic;
  cert.permutation = *pi;
  return cert;
}

// -- C4 minimality property test ----------------------------------------------------

struct C4MinimalityReport {
  int trials = 0;
  int strict = 0;
  int equal_constant = 0;  // equality with a per-block-constant refinement
  int violations = 0;      // smaller C4 density, or equality with a nonconstant one
  Rat base_density;
  std::vector<std::string> findings;
  bool ok() const { return violations == 0; }
};

/// Property test of the C4-minimality of step graphons: random average-preserving
/// refinements never decrease the 4-cycle density, strictly increasing it unless
/// constant per block. Exact comparisons.
inline C4MinimalityReport c4_minimality_test(const StepKernel& u, int trials, std::uint64_t seed) {
  if (!u.graphon) fail(ErrorKind::NotAGraphon, "C4 minimality test needs a graphon");
  C4MinimalityReport rep;
  rep.trials = trials;
  Graph c4 = cycle_graph(4);
  rep.base_density = hom_density(c4, u);
  for (int t = 0; t < trials; ++t) {
    bool nonconstant = false;
    StepKernel refined = average_preserving_refinement(u, hash_combine(seed, t), &nonconstant);
    Rat d = hom_density(c4, refined);
    if (d < rep.base_density) {
      ++rep.violations;
      rep.findings.push_back("trial " + std::to_string(t) + ": refinement decreased t(C4)");
    } else if (d == rep.base_density) {
      if (nonconstant) {
        ++rep.violations;
        rep.findings.push_back("trial " + std::to_string(t) +
                               ": nonconstant refinement kept t(C4) equal");
      } else {
        ++rep.equal_constant;
      }
    } else {
      if (!nonconstant) {
        ++rep.violations;
        rep.findings.push_back("trial " + std::to_string(t) +
                               ": constant refinement changed t(C4)");
      } else {
        ++rep.strict;
      }
    }
  }
  return rep;
}

}  // namespace qforce
