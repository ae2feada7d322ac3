#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "quasiforce/graph.hpp"
#include "quasiforce/kernel.hpp"
#include "quasiforce/quantum.hpp"

namespace qforce {

using Json = nlohmann::json;

/// 18 significant digits, enough to round-trip a double.
inline std::string format_decimal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17e", x);
  return buf;
}

inline bool looks_rational(const std::string& s) {
  return s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
         s.find('E') == std::string::npos;
}

// -- kernels -------------------------------------------------------------------

inline Json kernel_to_json(const StepKernel& u) {
  Json j;
  j["q"] = u.q;
  Json meas = Json::array();
  for (const Rat& a : u.measures) meas.push_back(rat_to_string(a));
  j["measures"] = meas;
  Json rows = Json::array();
  for (const auto& row : u.density) {
    Json r = Json::array();
    for (const Rat& x : row) r.push_back(rat_to_string(x));
    rows.push_back(r);
  }
  j["D"] = rows;
  j["graphon"] = u.graphon;
  return j;
}

inline Json kernel_to_json(const NumericKernel& u) {
  Json j;
  j["q"] = u.q;
  Json meas = Json::array();
  for (double a : u.measures) meas.push_back(format_decimal(a));
  j["measures"] = meas;
  Json rows = Json::array();
  for (const auto& row : u.density) {
    Json r = Json::array();
    for (double x : row) r.push_back(format_decimal(x));
    rows.push_back(r);
  }
  j["D"] = rows;
  j["graphon"] = u.graphon;
  return j;
}

inline StepKernel kernel_from_json(const Json& j, bool require_minimal = true) {
  StepKernel u;
  u.q = j.at("q").get<int>();
  for (const auto& m : j.at("measures")) u.measures.push_back(rat_from_string(m.get<std::string>()));
  for (const auto& row : j.at("D")) {
    std::vector<Rat> r;
    for (const auto& x : row) r.push_back(rat_from_string(x.get<std::string>()));
    u.density.push_back(std::move(r));
  }
  u.graphon = j.value("graphon", false);
  validate_kernel(u, require_minimal);
  return u;
}

inline NumericKernel numeric_kernel_from_json(const Json& j) {
  NumericKernel u;
  u.q = j.at("q").get<int>();
  auto parse = [](const std::string& s) {
    return looks_rational(s) ? to_double(rat_from_string(s)) : std::stod(s);
  };
  for (const auto& m : j.at("measures")) u.measures.push_back(parse(m.get<std::string>()));
  for (const auto& row : j.at("D")) {
    std::vector<double> r;
    for (const auto& x : row) r.push_back(parse(x.get<std::string>()));
    u.density.push_back(std::move(r));
  }
  u.graphon = j.value("graphon", false);
  return u;
}

// -- quantum graphs ------------------------------------------------------------

inline Json quantum_graph_to_json(const QuantumGraph& q) {
  Json arr = Json::array();
  for (const auto& [c, g] : q.terms) {
    Json t;
    t["coeff"] = rat_to_string(c);
    t["graph"] = to_edge_list(g);
    arr.push_back(t);
  }
  return arr;
}

inline QuantumGraph quantum_graph_from_json(const Json& j) {
  QuantumGraph q;
  for (const auto& t : j)
    q.add_term(rat_from_string(t.at("coeff").get<std::string>()),
               from_edge_list(t.at("graph").get<std::string>()));
  return q;
}

}  // namespace qforce

#include "quasiforce/counterexample.hpp"
#include "quasiforce/forcing.hpp"
#include "quasiforce/gadgets.hpp"

namespace qforce {

// -- certificates and reports ----------------------------------------------------

inline Json certificate_to_json(const ForcingCertificate& cert) {
  Json j;
  switch (cert.verdict) {
    case ForcingCertificate::Verdict::WeaklyIsomorphic: j["verdict"] = "weakly_isomorphic"; break;
    case ForcingCertificate::Verdict::Distinguished: j["verdict"] = "distinguished"; break;
    case ForcingCertificate::Verdict::Inconclusive: j["verdict"] = "inconclusive"; break;
  }
  j["vertex_budget"] = cert.vertex_budget;
  if (!cert.permutation.empty()) j["permutation"] = cert.permutation;
  if (cert.witness) {
    j["witness"] = to_edge_list(cert.witness->witness);
    j["densities"] = Json{{"U", rat_to_string(cert.witness->density_u)},
                          {"U2", rat_to_string(cert.witness->density_u2)}};
  }
  Json stages = Json::array();
  for (const auto& s : cert.stages) {
    stages.push_back(Json{{"name", s.name},
                          {"t_u", rat_to_string(s.t_u)},
                          {"t_u2", rat_to_string(s.t_u2)},
                          {"passed", s.passed},
                          {"max_vertices", s.max_vertices}});
  }
  j["stages"] = stages;
  if (!cert.note.empty()) j["note"] = cert.note;
  return j;
}

inline Json color_gadget_report_to_json(const ColorGadgetReport& rep) {
  Json j;
  j["sizes_ok"] = rep.sizes_ok;
  j["disjoint"] = rep.disjoint;
  j["independent"] = rep.independent;
  j["chromatic_number"] = rep.chromatic_number;
  j["classes_forced"] = rep.classes_forced;
  j["colorings_with_clique_pinned"] = rep.colorings_with_clique_pinned;
  j["findings"] = rep.findings;
  j["ok"] = rep.ok();
  return j;
}

inline Json counterexample_to_json(const CounterexamplePair& pair) {
  Json j;
  j["U"] = kernel_to_json(pair.u);
  j["U2"] = kernel_to_json(pair.u2);
  j["report"] = Json{{"q", pair.report.q},
                     {"delta_used", pair.report.delta_used},
                     {"tol", pair.report.tol},
                     {"max_small_gap", pair.report.max_small_gap},
                     {"clique_gap", pair.report.clique_gap},
                     {"agrees_below", pair.report.agrees_below},
                     {"separated_above", pair.report.separated_above},
                     {"part_matching_rejected", pair.report.part_matching_rejected},
                     {"valid", pair.report.valid()}};
  return j;
}

// -- gadget descriptors ------------------------------------------------------------

inline Json selector_to_json(const SelectorGadget& sel) {
  Json j;
  j["kind"] = "P";
  j["s"] = sel.sizes();
  Json dec = Json::array();
  for (auto [a, b] : sel.decorations) dec.push_back(Json::array({a, b}));
  j["decorations"] = dec;
  return j;
}

inline SelectorGadget selector_from_json(const Json& j) {
  if (j.at("kind").get<std::string>() != "P")
    fail(ErrorKind::UsageError, "expected a descriptor of kind P");
  std::vector<int> s = j.at("s").get<std::vector<int>>();
  SelectorGadget sel = make_selector(static_cast<int>(s.size()), s);
  if (j.contains("decorations"))
    for (const auto& e : j.at("decorations")) {
      int a = e.at(0).get<int>(), b = e.at(1).get<int>();
      if (a == b || a < 0 || b < 0 || a >= sel.root_count() || b >= sel.root_count())
        fail(ErrorKind::UsageError, "decoration endpoints must be distinct roots");
      Edge edge{std::min(a, b), std::max(a, b)};
      for (auto existing : sel.decorations)
        if (existing == edge) fail(ErrorKind::UsageError, "duplicate decoration edge");
      sel.decorations.push_back(edge);
    }
  return sel;
}

}  // namespace qforce
