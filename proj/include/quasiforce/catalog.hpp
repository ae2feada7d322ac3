#pragma once

#include <cstdint>
#include <vector>

#include "quasiforce/kernel.hpp"
#include "quasiforce/rng.hpp"

namespace qforce {

// Deterministic, seed-driven inputs for property tests and verification batches.

inline Rat random_rational_01(SplitMix& rng, int max_den = 8) {
  long den = rng.next_in(2, max_den);
  long num = rng.next_in(0, den);
  return rat(num, den);
}

inline Rat random_rational_signed(SplitMix& rng, int max_den = 8) {
  long den = rng.next_in(2, max_den);
  long num = rng.next_in(-den, den);
  return rat(num, den);
}

/// Positive rational measures summing to one, from small integer weights.
inline std::vector<Rat> random_measures(SplitMix& rng, int q) {
  std::vector<long> w(q);
  long total = 0;
  for (int i = 0; i < q; ++i) {
    w[i] = rng.next_in(1, 9);
    total += w[i];
  }
  std::vector<Rat> a(q);
  for (int i = 0; i < q; ++i) a[i] = rat(w[i], total);
  return a;
}

/// Minimal q-step kernel with rational entries; graphon restricts values to [0,1].
/// Retries until the rows are pairwise distinct.
inline StepKernel random_minimal_kernel(int q, std::uint64_t seed, bool graphon = true,
                                        int max_den = 8) {
  SplitMix rng(hash_combine(seed, 0x6b65726eULL));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    StepKernel u;
    u.q = q;
    u.graphon = graphon;
    u.measures = random_measures(rng, q);
    u.density.assign(q, std::vector<Rat>(q));
    for (int i = 0; i < q; ++i)
      for (int j = i; j < q; ++j) {
        Rat v = graphon ? random_rational_01(rng, max_den) : random_rational_signed(rng, max_den);
        u.density[i][j] = v;
        u.density[j][i] = v;
      }
    if (!check_minimality(u)) return u;
  }
  fail(ErrorKind::UsageError, "could not generate a minimal kernel");
}

/// Kernel with pairwise distinct part degrees, as the degree pipeline needs.
inline StepKernel random_degree_distinct_kernel(int q, std::uint64_t seed, bool graphon = true) {
  for (std::uint64_t salt = 0; salt < 1000; ++salt) {
    StepKernel u = random_minimal_kernel(q, hash_combine(seed, salt), graphon);
    auto d = degree_vector(u);
    bool distinct = true;
    for (int i = 0; i < q && distinct; ++i)
      for (int j = i + 1; j < q; ++j)
        if (d[i] == d[j]) {
          distinct = false;
          break;
        }
    if (distinct) return u;
  }
  fail(ErrorKind::UsageError, "could not generate a degree-distinct kernel");
}

/// Same kernel with parts listed in a seeded random order.
inline StepKernel scramble_parts(const StepKernel& u, std::uint64_t seed) {
  SplitMix rng(hash_combine(seed, 0x7363726dULL));
  std::vector<int> perm(u.q);
  for (int i = 0; i < u.q; ++i) perm[i] = i;
  for (int i = u.q - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.next_in(0, i)]);
  StepKernel out;
  out.q = u.q;
  out.graphon = u.graphon;
  out.measures.resize(u.q);
  out.density.assign(u.q, std::vector<Rat>(u.q));
  for (int i = 0; i < u.q; ++i) {
    out.measures[perm[i]] = u.measures[i];
    for (int j = 0; j < u.q; ++j) out.density[perm[i]][perm[j]] = u.density[i][j];
  }
  return out;
}

/// Erdos-Renyi style random graph from counter-based draws.
inline Graph random_graph(int n, double p, std::uint64_t seed) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unit_double(counter_hash(seed, 0x67726170ULL, i, j)) < p) g.add_edge(i, j);
  return g;
}

/// A refinement of the graphon splitting every part in two, with sub-block values
/// perturbed but exactly average-preserving per original block. Boundary blocks
/// (values 0 or 1) are left constant. Exact rational arithmetic throughout.
inline StepKernel average_preserving_refinement(const StepKernel& u, std::uint64_t seed,
                                                bool* nonconstant_out = nullptr) {
  SplitMix rng(hash_combine(seed, 0x72656669ULL));
  int q = u.q;
  std::vector<Rat> sub_measure(2 * q);
  for (int i = 0; i < q; ++i) {
    long den = rng.next_in(2, 6);
    long num = rng.next_in(1, den - 1);
    Rat f = u.measures[i] * rat(num, den);
    sub_measure[2 * i] = f;
    sub_measure[2 * i + 1] = u.measures[i] - f;
  }
  StepKernel out;
  out.q = 2 * q;
  out.graphon = u.graphon;
  out.measures = sub_measure;
  out.density.assign(2 * q, std::vector<Rat>(2 * q));
  bool nonconstant = false;
  auto set_block = [&](int bi, int bj, const Rat& v00, const Rat& v01, const Rat& v10,
                       const Rat& v11) {
    out.density[2 * bi][2 * bj] = v00;
    out.density[2 * bi][2 * bj + 1] = v01;
    out.density[2 * bi + 1][2 * bj] = v10;
    out.density[2 * bi + 1][2 * bj + 1] = v11;
    out.density[2 * bj][2 * bi] = v00;
    out.density[2 * bj + 1][2 * bi] = v01;
    out.density[2 * bj][2 * bi + 1] = v10;
    out.density[2 * bj + 1][2 * bi + 1] = v11;
  };
  for (int i = 0; i < q; ++i) {
    for (int j = i; j < q; ++j) {
      Rat d = u.density[i][j];
      Rat w0 = sub_measure[2 * i], w1 = sub_measure[2 * i + 1];
      Rat v0 = sub_measure[2 * j], v1 = sub_measure[2 * j + 1];
      Rat mass = u.measures[i] * u.measures[j];
      bool boundary = u.graphon && (d == 0 || d == 1);
      if (boundary) {
        set_block(i, j, d, d, d, d);
        continue;
      }
      // shrink the perturbation until the solved-for corner stays in range
      Rat eps = rat(1, rng.next_in(7, 19));
      bool placed = false;
      for (int halve = 0; halve < 40 && !placed; ++halve, eps /= 2) {
        if (i == j) {
          Rat x00 = d + eps * rat(rng.next_in(-3, 3), 3);
          Rat x01 = d + eps * rat(rng.next_in(-3, 3), 3);
          // w0^2 x00 + 2 w0 w1 x01 + w1^2 x11 = mass * d
          Rat x11 = (mass * d - w0 * w0 * x00 - 2 * w0 * w1 * x01) / (w1 * w1);
          if (u.graphon && (x00 < 0 || x00 > 1 || x01 < 0 || x01 > 1 || x11 < 0 || x11 > 1))
            continue;
          set_block(i, j, x00, x01, x01, x11);
          if (x00 != d || x01 != d || x11 != d) nonconstant = true;
          placed = true;
        } else {
          Rat x00 = d + eps * rat(rng.next_in(-3, 3), 3);
          Rat x01 = d + eps * rat(rng.next_in(-3, 3), 3);
          Rat x10 = d + eps * rat(rng.next_in(-3, 3), 3);
          Rat x11 = (mass * d - w0 * v0 * x00 - w0 * v1 * x01 - w1 * v0 * x10) / (w1 * v1);
          if (u.graphon && (x00 < 0 || x00 > 1 || x01 < 0 || x01 > 1 || x10 < 0 || x10 > 1 ||
                            x11 < 0 || x11 > 1))
            continue;
          set_block(i, j, x00, x01, x10, x11);
          if (x00 != d || x01 != d || x10 != d || x11 != d) nonconstant = true;
          placed = true;
        }
      }
      if (!placed) set_block(i, j, d, d, d, d);
    }
  }
  if (nonconstant_out) *nonconstant_out = nonconstant;
  return out;
}

}  // namespace qforce
