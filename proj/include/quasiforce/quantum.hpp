#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "quasiforce/graph.hpp"
#include "quasiforce/rational.hpp"

namespace qforce {

/// Formal rational linear combination of graphs. Zero coefficients are dropped.
struct QuantumGraph {
  std::vector<std::pair<Rat, Graph>> terms;

  QuantumGraph() = default;
  explicit QuantumGraph(std::vector<std::pair<Rat, Graph>> t) : terms(std::move(t)) {
    prune();
  }

  void add_term(Rat coeff, Graph g) {
    if (!is_zero(coeff)) terms.emplace_back(std::move(coeff), std::move(g));
  }
  void prune() {
    std::erase_if(terms, [](const auto& t) { return is_zero(t.first); });
  }
  int max_constituent_vertices() const {
    int m = 0;
    for (const auto& [c, g] : terms) m = std::max(m, g.vertex_count());
    return m;
  }
};

/// Linear combination of rooted graphs sharing group sizes and the same
/// root-induced subgraph.
struct QuantumRootedGraph {
  std::vector<std::pair<Rat, RootedGraph>> terms;

  QuantumRootedGraph() = default;
  explicit QuantumRootedGraph(std::vector<std::pair<Rat, RootedGraph>> t) : terms(std::move(t)) {
    std::erase_if(terms, [](const auto& x) { return is_zero(x.first); });
    validate();
  }

  const std::vector<int>& group_sizes() const {
    static const std::vector<int> none;
    return terms.empty() ? none : terms.front().second.group_sizes;
  }

  void validate() const {
    if (terms.empty()) return;
    const auto& groups = terms.front().second.group_sizes;
    Graph root_sub = terms.front().second.root_induced_subgraph();
    for (const auto& [c, h] : terms) {
      if (h.group_sizes != groups)
        fail(ErrorKind::RootMismatch, "constituents with different group sizes");
      if (!(h.root_induced_subgraph() == root_sub))
        fail(ErrorKind::UsageError, "constituents with different root-induced subgraphs");
    }
  }

  int max_constituent_vertices() const {
    int m = 0;
    for (const auto& [c, g] : terms) m = std::max(m, g.graph.vertex_count());
    return m;
  }
};

/// Term-wise forgetting of roots; coefficients preserved. With merge on,
/// isomorphic constituents are combined (compression only, exactness unchanged).
inline QuantumGraph unlabel(const QuantumRootedGraph& q, bool merge_isomorphic = false,
                            int iso_limit = 16) {
  QuantumGraph out;
  if (!merge_isomorphic) {
    for (const auto& [c, h] : q.terms) out.add_term(c, h.graph);
    return out;
  }
  std::map<std::string, std::pair<Rat, Graph>> classes;
  for (const auto& [c, h] : q.terms) {
    std::string key = canonical_form(h.graph, iso_limit);
    auto it = classes.find(key);
    if (it == classes.end())
      classes.emplace(std::move(key), std::make_pair(c, h.graph));
    else
      it->second.first += c;
  }
  for (auto& [k, term] : classes) out.add_term(std::move(term.first), std::move(term.second));
  return out;
}

inline QuantumGraph merge_isomorphic(const QuantumGraph& q, int iso_limit = 16) {
  std::map<std::string, std::pair<Rat, Graph>> classes;
  for (const auto& [c, g] : q.terms) {
    std::string key = canonical_form(g, iso_limit);
    auto it = classes.find(key);
    if (it == classes.end())
      classes.emplace(std::move(key), std::make_pair(c, g));
    else
      it->second.first += c;
  }
  QuantumGraph out;
  for (auto& [k, term] : classes) out.add_term(std::move(term.first), std::move(term.second));
  return out;
}

/// Bilinear extension of the rooted product.
inline QuantumRootedGraph product(const QuantumRootedGraph& a, const QuantumRootedGraph& b) {
  std::vector<std::pair<Rat, RootedGraph>> terms;
  terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& [ca, ha] : a.terms)
    for (const auto& [cb, hb] : b.terms) terms.emplace_back(ca * cb, product(ha, hb));
  return QuantumRootedGraph(std::move(terms));
}

/// Full distribution of a product of sums. The constituent count is the product
/// of the factor term counts; refuses to expand past the limit.
inline QuantumRootedGraph expand_quantum_product(const std::vector<QuantumRootedGraph>& factors,
                                                 std::uint64_t expansion_limit = 1000000) {
  if (factors.empty()) fail(ErrorKind::UsageError, "empty factor list");
  double estimate = 1.0;
  for (const auto& f : factors) estimate *= static_cast<double>(f.terms.size());
  if (estimate > static_cast<double>(expansion_limit))
    fail(ErrorKind::ExpansionTooLarge,
         "expansion would produce ~" + std::to_string(estimate) + " constituents");
  QuantumRootedGraph acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = product(acc, factors[i]);
  return acc;
}

}  // namespace qforce
