#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "quasiforce/graph.hpp"
#include "quasiforce/kernel.hpp"
#include "quasiforce/rng.hpp"

namespace qforce {

// Stochastic block model sampling: the finite counterpart of a step graphon.
// Labels draw from (seed, vertex) and edges from (seed, i, j); the output is a
// pure function of (kernel, n, seed) regardless of worker count.

struct SampledGraph {
  Graph graph;
  std::vector<int> part_labels;
  std::uint64_t seed = 0;
  int n = 0;
};

namespace detail {
constexpr std::uint64_t kLabelStream = 0x6c61626cULL;
constexpr std::uint64_t kEdgeStream = 0x65646765ULL;
}  // namespace detail

inline SampledGraph sample_block_model(const StepKernel& u, int n, std::uint64_t seed,
                                       int threads = 1) {
  if (!u.graphon) fail(ErrorKind::NotAGraphon, "sampling needs a graphon");
  if (n < 1) fail(ErrorKind::UsageError, "need at least one vertex");
  std::vector<double> cums(u.q);
  double acc = 0;
  for (int p = 0; p < u.q; ++p) {
    acc += to_double(u.measures[p]);
    cums[p] = acc;
  }
  std::vector<std::vector<double>> dens(u.q, std::vector<double>(u.q));
  for (int i = 0; i < u.q; ++i)
    for (int j = 0; j < u.q; ++j) dens[i][j] = to_double(u.density[i][j]);

  SampledGraph out;
  out.seed = seed;
  out.n = n;
  out.part_labels.resize(n);
  for (int v = 0; v < n; ++v) {
    double x = unit_double(counter_hash(seed, detail::kLabelStream, v));
    int p = 0;
    while (p + 1 < u.q && x >= cums[p]) ++p;
    out.part_labels[v] = p;
  }

  auto edges_for_rows = [&](int lo, int hi) {
    std::vector<Edge> es;
    for (int i = lo; i < hi; ++i)
      for (int j = i + 1; j < n; ++j) {
        double x = unit_double(counter_hash(seed, detail::kEdgeStream, i, j));
        if (x < dens[out.part_labels[i]][out.part_labels[j]]) es.push_back({i, j});
      }
    return es;
  };

  std::vector<Edge> edges;
  if (threads <= 1) {
    edges = edges_for_rows(0, n);
  } else {
    int workers = std::min(threads, n);
    std::vector<std::future<std::vector<Edge>>> tasks;
    for (int w = 0; w < workers; ++w) {
      int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
      int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
      tasks.push_back(std::async(std::launch::async, edges_for_rows, lo, hi));
    }
    for (auto& t : tasks) {
      auto part = t.get();
      edges.insert(edges.end(), part.begin(), part.end());
    }
  }
  out.graph = Graph(n, std::move(edges));
  return out;
}

struct DensityEstimate {
  double value = 0;
  double std_error = 0;
  bool exhaustive = false;
  long long samples = 0;
};

namespace detail {

/// Exact t(h, g) by enumerating all |V(g)|^{|V(h)|} maps, with prefix pruning.
inline double exact_hom_density(const Graph& h, const Graph& g) {
  int k = h.vertex_count();
  long long n = g.vertex_count();
  std::vector<std::vector<int>> back(k);
  for (auto [u, v] : h.edges()) back[v].push_back(u);
  // bit adjacency for speed
  int words = static_cast<int>((n + 63) / 64);
  std::vector<std::uint64_t> adj(static_cast<std::size_t>(n) * words, 0);
  for (auto [u, v] : g.edges()) {
    adj[static_cast<std::size_t>(u) * words + v / 64] |= (1ull << (v % 64));
    adj[static_cast<std::size_t>(v) * words + u / 64] |= (1ull << (u % 64));
  }
  auto has_edge = [&](long long a, long long b) {
    return (adj[static_cast<std::size_t>(a) * words + b / 64] >> (b % 64)) & 1ull;
  };
  std::vector<long long> img(k, -1);
  long long count = 0;
  int v = 0;
  while (v >= 0) {
    long long c = ++img[v];
    if (c >= n) {
      img[v] = -1;
      --v;
      continue;
    }
    bool ok = true;
    for (int u : back[v])
      if (!has_edge(img[u], c)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    if (v == k - 1) {
      ++count;
    } else {
      ++v;
    }
  }
  double total = std::pow(static_cast<double>(n), k);
  return static_cast<double>(count) / total;
}

}  // namespace detail

/// Unbiased Monte-Carlo estimate of t(h, g) over uniform maps, switching to exact
/// exhaustive enumeration when |V(g)|^{|V(h)|} is small enough.
inline DensityEstimate empirical_hom_density(const Graph& h, const Graph& g, long long samples,
                                             std::uint64_t seed, int threads = 1,
                                             double exhaustive_budget = 1e7) {
  if (samples < 1) fail(ErrorKind::UsageError, "need at least one sample");
  int k = h.vertex_count();
  long long n = g.vertex_count();
  if (n < 1) fail(ErrorKind::UsageError, "host graph is empty");
  DensityEstimate est;
  if (std::pow(static_cast<double>(n), k) <= exhaustive_budget) {
    est.value = detail::exact_hom_density(h, g);
    est.exhaustive = true;
    return est;
  }

  int words = static_cast<int>((n + 63) / 64);
  std::vector<std::uint64_t> adj(static_cast<std::size_t>(n) * words, 0);
  for (auto [u, v] : g.edges()) {
    adj[static_cast<std::size_t>(u) * words + v / 64] |= (1ull << (v % 64));
    adj[static_cast<std::size_t>(v) * words + u / 64] |= (1ull << (u % 64));
  }
  auto hits_in_range = [&](long long lo, long long hi) {
    long long hit = 0;
    std::vector<long long> img(k);
    for (long long s = lo; s < hi; ++s) {
      for (int v = 0; v < k; ++v)
        img[v] = static_cast<long long>(counter_hash(seed, 0x6d617073ULL, s, v) %
                                        static_cast<std::uint64_t>(n));
      bool ok = true;
      for (auto [a, b] : h.edges()) {
        long long ia = img[a], ib = img[b];
        if (!((adj[static_cast<std::size_t>(ia) * words + ib / 64] >> (ib % 64)) & 1ull)) {
          ok = false;
          break;
        }
      }
      if (ok) ++hit;
    }
    return hit;
  };

  long long hits = 0;
  if (threads <= 1) {
    hits = hits_in_range(0, samples);
  } else {
    int workers = threads;
    std::vector<std::future<long long>> tasks;
    for (int w = 0; w < workers; ++w) {
      long long lo = samples * w / workers, hi = samples * (w + 1) / workers;
      tasks.push_back(std::async(std::launch::async, hits_in_range, lo, hi));
    }
    for (auto& t : tasks) hits += t.get();
  }
  est.samples = samples;
  est.value = static_cast<double>(hits) / static_cast<double>(samples);
  est.std_error = std::sqrt(est.value * (1 - est.value) / static_cast<double>(samples));
  return est;
}

struct ConvergenceRow {
  std::string graph_name;
  int n = 0;
  double empirical = 0;
  double exact = 0;
  double deviation = 0;
  double std_error = 0;
};

/// For each (h, n): sample, estimate, and compare against the exact density.
inline std::vector<ConvergenceRow> convergence_report(
    const StepKernel& u, const std::vector<std::pair<std::string, Graph>>& hs,
    const std::vector<int>& ns, std::uint64_t seed, long long samples = 200000, int threads = 1) {
  std::vector<ConvergenceRow> rows;
  for (int n : ns) {
    SampledGraph sg = sample_block_model(u, n, hash_combine(seed, n), threads);
    for (const auto& [name, h] : hs) {
      ConvergenceRow row;
      row.graph_name = name;
      row.n = n;
      DensityEstimate est =
          empirical_hom_density(h, sg.graph, samples, hash_combine(seed, n + 7777), threads);
      row.empirical = est.value;
      row.std_error = est.std_error;
      row.exact = to_double(hom_density(h, u));
      row.deviation = std::abs(row.empirical - row.exact);
      rows.push_back(row);
    }
  }
  return rows;
}

/// Canonical byte serialization, for reproducibility checks.
inline std::string sampled_graph_bytes(const SampledGraph& sg) {
  std::string s = std::to_string(sg.n) + ":" + std::to_string(sg.seed) + ":";
  for (int p : sg.part_labels) s += std::to_string(p) + ",";
  s += "|";
  for (auto [u, v] : sg.graph.edges()) s += std::to_string(u) + "-" + std::to_string(v) + ";";
  return s;
}

}  // namespace qforce
