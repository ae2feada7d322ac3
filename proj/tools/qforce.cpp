// Command-line frontend: exact step-kernel densities, gadget construction and
// verification, the forcing pipelines with JSON certificates, the block-model
// sampler, and per-lemma verification batches.
//
// Exit codes: 0 success, 1 a verification found a property violation, 2 usage or
// budget errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "quasiforce/quasiforce.hpp"

using namespace qforce;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::UsageError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::UsageError, "cannot write " + path);
  out << text;
}

StepKernel load_kernel(const std::string& path, bool require_minimal = true) {
  return kernel_from_json(Json::parse(read_file(path)), require_minimal);
}

Graph load_graph_arg(const std::string& arg) {
  if (arg == "c4") return cycle_graph(4);
  if (arg.size() >= 2 && arg[0] == 'k') {
    int n = std::atoi(arg.c_str() + 1);
    if (n >= 1 && n <= 7 && arg == "k" + std::to_string(n)) return complete_graph(n);
  }
  if (arg.size() >= 2 && arg[0] == 'p') {
    int n = std::atoi(arg.c_str() + 1);
    if ((n == 3 || n == 4) && arg == "p" + std::to_string(n)) return path_graph(n);
  }
  return from_edge_list(read_file(arg));
}

std::vector<Rat> parse_rat_list(const std::string& s) {
  std::vector<Rat> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(rat_from_string(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

struct CheckList {
  Json checks = Json::array();
  bool all_ok = true;
  void add(const std::string& name, bool ok, Json detail = {}) {
    Json c{{"name", name}, {"ok", ok}};
    if (!detail.is_null()) c["detail"] = std::move(detail);
    checks.push_back(std::move(c));
    all_ok = all_ok && ok;
  }
  int finish(const std::string& id) {
    emit(Json{{"lemma", id}, {"ok", all_ok}, {"checks", checks}});
    return all_ok ? 0 : 1;
  }
};

std::uint64_t need_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed) fail(ErrorKind::UsageError, "this check is randomized; pass --seed");
  return *seed;
}

// -- verify-lemma bodies -----------------------------------------------------------

int verify_step_probe(int q, int trials, std::uint64_t seed) {
  CheckList cl;
  for (int t = 0; t < trials; ++t) {
    StepKernel u = random_minimal_kernel(q, hash_combine(seed, t));
    Rat hi = step_probe_density(u, q + 1);
    Rat lo = step_probe_density(u, q);
    cl.add("probe(q+1) vanishes", is_zero(hi), Json{{"value", rat_to_string(hi)}});
    cl.add("probe(q) positive", lo > 0, Json{{"value", rat_to_string(lo)}});
    cl.add("detect_steps", detect_steps(u, q + 2) == q);
    if (q == 2) {
      QuantumGraph expanded = step_probe_expanded(2);
      cl.add("expanded probe agrees", quantum_density(expanded, u) == lo);
    }
  }
  return cl.finish("3.1");
}

int verify_color_lemma(const std::string& id, int q, std::vector<int> s) {
  CheckList cl;
  if (s.empty()) s.assign(q, q + 2);
  ColorGadget g = build_color_gadget(q, s);
  auto rep = verify_color_gadget(g);
  cl.add("sizes", rep.sizes_ok);
  cl.add("matchings disjoint", rep.disjoint);
  cl.add("groups independent", rep.independent);
  cl.add("unique coloring with the group classes", rep.classes_forced,
         Json{{"pinned_colorings", rep.colorings_with_clique_pinned}});
  cl.add("chromatic number", rep.chromatic_number == q);
  return cl.finish(id);
}

int verify_selector(int q, std::vector<int> s, std::optional<StepKernel> kernel,
                    std::optional<std::uint64_t> seed, long long samples) {
  CheckList cl;
  if (s.empty()) s.assign(q, q + 2);
  StepKernel u = kernel ? *kernel : random_minimal_kernel(q, need_seed(seed));
  SelectorGadget sel = make_selector(q, s);
  Rat d0 = selector_value(u);
  cl.add("d0 positive", d0 > 0, Json{{"d0", rat_to_string(d0)}});

  long long roots = sel.root_count();
  double full = std::pow(static_cast<double>(q), static_cast<double>(roots));
  long long nonzero = 0, expected_nonzero = 1;
  for (int i = 2; i <= q; ++i) expected_nonzero *= i;
  bool two_valued = true;
  if (full <= 2e6) {
    std::vector<int> parts(roots, 0);
    while (true) {
      Rat v = selector_rooted_density(sel, u, parts);
      if (!is_zero(v)) {
        ++nonzero;
        if (v != d0) two_valued = false;
      }
      int d = 0;
      while (d < roots && ++parts[d] == q) parts[d++] = 0;
      if (d == roots) break;
    }
    cl.add("exhaustive two-valuedness", two_valued, Json{{"nonzero_patterns", nonzero}});
    cl.add("nonzero exactly on injective group patterns", nonzero == expected_nonzero);
  } else {
    // all group-constant patterns, then random assignments
    std::vector<int> pat(q, 0);
    bool ok = true;
    long long hits = 0;
    while (true) {
      std::vector<int> parts;
      for (int g2 = 0; g2 < q; ++g2)
        for (int i = 0; i < s[g2]; ++i) parts.push_back(pat[g2]);
      Rat v = selector_rooted_density(sel, u, parts);
      bool injective = [&] {
        std::set<int> seen(pat.begin(), pat.end());
        return static_cast<int>(seen.size()) == q;
      }();
      if (injective ? (v != d0) : !is_zero(v)) ok = false;
      if (!is_zero(v)) ++hits;
      int d = 0;
      while (d < q && ++pat[d] == q) pat[d++] = 0;
      if (d == q) break;
    }
    cl.add("group-constant patterns two-valued", ok, Json{{"nonzero_patterns", hits}});
    std::uint64_t sd = need_seed(seed);
    bool rnd_ok = true;
    for (long long t = 0; t < samples; ++t) {
      std::vector<int> parts(roots);
      for (long long r = 0; r < roots; ++r)
        parts[r] = static_cast<int>(counter_hash(sd, 0x726f6f74ULL, t, r) % q);
      Rat v = selector_rooted_density(sel, u, parts);
      if (!(is_zero(v) || v == d0)) rnd_ok = false;
    }
    cl.add("random assignments two-valued", rnd_ok, Json{{"samples", samples}});
  }
  return cl.finish("3.4");
}

int verify_density_probe(const std::string& id, bool within, int trials, std::uint64_t seed) {
  CheckList cl;
  for (int t = 0; t < trials; ++t) {
    StepKernel u = random_minimal_kernel(2, hash_combine(seed, t));
    std::vector<int> s = {4, 4};
    for (int m = 0; m <= 4; ++m) {
      SelectorGadget sel = make_selector(2, s);
      if (m > 0) add_decorations(sel, 0, within ? 0 : 1, m);
      Rat fast = selector_density(sel, u);
      Rat slow = selector_density_by_enumeration(sel, u);
      cl.add("pattern sum equals enumeration (m=" + std::to_string(m) + ")", fast == slow);
    }
    if (within) {
      auto own = diagonal_value_set(u.density);
      cl.add("probe vanishes on own part densities", check_part_densities(u, own).matched);
      cl.add("probe detects a foreign value set",
             !check_part_densities(u, {rat(979, 980)}).matched);
    } else {
      auto own = offdiagonal_value_set(u.density);
      cl.add("probe vanishes on own pair densities", check_pair_densities(u, own).matched);
      cl.add("probe detects a foreign value set",
             !check_pair_densities(u, {rat(979, 980)}).matched);
    }
  }
  return cl.finish(id);
}

int verify_matrix_probe(int q, int trials, std::uint64_t seed) {
  CheckList cl;
  for (int t = 0; t < trials; ++t) {
    StepKernel u = random_minimal_kernel(q, hash_combine(seed, 2 * t));
    StepKernel u2 = scramble_parts(u, hash_combine(seed, 2 * t + 1));
    Rat c0 = matrix_probe_value(u, u.density);
    cl.add("c0 nonzero", !is_zero(c0), Json{{"c0", rat_to_string(c0)}});
    auto pi = match_density_matrix(u2, u.density);
    bool aligned = pi.has_value();
    if (pi)
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
          if (u2.density[(*pi)[i]][(*pi)[j]] != u.density[i][j]) aligned = false;
    cl.add("scrambled kernel aligns", aligned);
  }
  return cl.finish("4.3");
}

int verify_power_sums(int trials, std::uint64_t seed) {
  CheckList cl;
  SplitMix rng(seed);
  for (int t = 0; t < trials; ++t) {
    int q = 1 + static_cast<int>(rng.next_in(0, 5));
    std::vector<Rat> xs;
    for (int i = 0; i < q; ++i) xs.push_back(rat(rng.next_in(1, 30), rng.next_in(2, 14)));
    std::sort(xs.begin(), xs.end());
    cl.add("round trip q=" + std::to_string(q),
           multiset_from_power_sums(power_sums(xs, q)) == xs);
  }
  return cl.finish("4.4");
}

int verify_pipeline_batch(const std::string& id, int q, int trials, std::uint64_t seed, bool degree_mode) {
  CheckList cl;
  for (int t = 0; t < trials; ++t) {
    StepKernel u = degree_mode ? random_degree_distinct_kernel(q, hash_combine(seed, 3 * t))
                               : random_minimal_kernel(q, hash_combine(seed, 3 * t));
    StepKernel u2;
    if (t % 2 == 0) {
      u2 = scramble_parts(u, hash_combine(seed, 3 * t + 1));
    } else {
      u2 = degree_mode ? random_degree_distinct_kernel(q, hash_combine(seed, 3 * t + 2))
                       : random_minimal_kernel(q, hash_combine(seed, 3 * t + 2));
    }
    ForcingCertificate cert =
        degree_mode ? degree_forcing_pipeline(u, u2) : forcing_pipeline(u, u2);
    bool iso = weak_iso(u, u2).has_value();
    bool sound = (cert.verdict == ForcingCertificate::Verdict::WeaklyIsomorphic) == iso;
    cl.add("verdict matches weak_iso", sound);
    int budget = degree_mode ? 2 * q + 1 : 4 * q * q - q;
    cl.add("vertex budget respected", cert.max_stage_vertices() <= budget,
           Json{{"max", cert.max_stage_vertices()}, {"budget", budget}});
    if (cert.verdict == ForcingCertificate::Verdict::Distinguished) {
      bool wok = cert.witness.has_value();
      if (wok && q <= 3) {
        wok = cert.witness->witness.vertex_count() <= budget &&
              hom_density_brute(cert.witness->witness, u) == cert.witness->density_u &&
              hom_density_brute(cert.witness->witness, u2) == cert.witness->density_u2 &&
              cert.witness->density_u != cert.witness->density_u2;
      }
      cl.add("witness verified", wok);
    }
  }
  return cl.finish(id);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact step-kernel forcing toolkit"};
  app.require_subcommand(1);
  // --h is a documented option name, so help is long-form only
  app.set_help_flag("--help", "print usage");

  auto add_subcommand = [&](const std::string& name, const std::string& desc) {
    auto* sc = app.add_subcommand(name, desc);
    sc->set_help_flag("--help", "print usage");
    return sc;
  };

  // kernel ------------------------------------------------------------------
  auto* sc_kernel = add_subcommand("kernel", "inspect or transform a kernel");
  std::string k_file, k_refine, k_weak_iso;
  bool k_merge = false;
  sc_kernel->add_option("--kernel", k_file, "kernel JSON file")->required();
  sc_kernel->add_option("--refine", k_refine, "PART:F1,F2,... split a part into fractions");
  sc_kernel->add_flag("--merge-rows", k_merge, "merge identical rows");
  sc_kernel->add_option("--weak-iso", k_weak_iso, "second kernel to match against");

  // density -----------------------------------------------------------------
  auto* sc_density = add_subcommand("density", "exact homomorphism density");
  std::string d_h, d_kernel, d_roots;
  sc_density->add_option("--h", d_h, "graph: k1..k7, c4, p3, p4, or an edge-list file")->required();
  sc_density->add_option("--kernel", d_kernel, "kernel JSON file")->required();
  sc_density->add_option("--roots", d_roots, "pin the first vertices to parts (comma list)");

  // gadget ------------------------------------------------------------------
  auto* sc_gadget = add_subcommand("gadget", "build / verify / eval gadgets");
  std::string g_mode, g_kind = "P", g_s, g_kernel, g_roots, g_desc;
  int g_q = 2, g_k = 2;
  std::uint64_t g_limit = 1000000;
  sc_gadget->add_option("mode", g_mode, "build | verify | eval")->required();
  sc_gadget->add_option("--kind", g_kind, "P or Qk");
  sc_gadget->add_option("--q", g_q, "group count");
  sc_gadget->add_option("--k", g_k, "step probe index");
  sc_gadget->add_option("--s", g_s, "group sizes, comma list");
  sc_gadget->add_option("--desc", g_desc, "descriptor JSON file");
  sc_gadget->add_option("--kernel", g_kernel, "kernel JSON file");
  sc_gadget->add_option("--roots", g_roots, "root part assignment, comma list");
  sc_gadget->add_option("--expansion-limit", g_limit, "constituent cap for expansion");

  // force / degree-force / distinguish ---------------------------------------
  auto* sc_force = add_subcommand("force", "main forcing pipeline certificate");
  auto* sc_dforce = add_subcommand("degree-force", "degree pipeline certificate");
  auto* sc_dist = add_subcommand("distinguish", "explicit distinguishing graph");
  std::string f_u, f_u2;
  bool f_no_witness = false;
  for (auto* sc : {sc_force, sc_dforce, sc_dist}) {
    sc->add_option("--u", f_u, "first kernel JSON")->required();
    sc->add_option("--u2", f_u2, "second kernel JSON")->required();
  }
  sc_force->add_flag("--no-witness", f_no_witness, "skip witness extraction");

  // counterexample ------------------------------------------------------------
  auto* sc_cex = add_subcommand("counterexample", "perturbed diagonal-block pair");
  std::string c_a;
  double c_delta = 0.01, c_tol = 1e-12;
  int c_q = 2;
  sc_cex->add_option("--q", c_q, "number of diagonal blocks");
  sc_cex->add_option("--a", c_a, "block measures, comma list of rationals")->required();
  sc_cex->add_option("--delta", c_delta, "last-measure perturbation");
  sc_cex->add_option("--tol", c_tol, "residual tolerance");

  // sample / estimate ----------------------------------------------------------
  auto* sc_sample = add_subcommand("sample", "draw a block-model graph");
  std::string s_kernel, s_out;
  int s_n = 100, s_threads = 1;
  std::uint64_t s_seed = 0;
  sc_sample->add_option("--kernel", s_kernel)->required();
  sc_sample->add_option("--n", s_n)->required();
  sc_sample->add_option("--seed", s_seed)->required();
  sc_sample->add_option("--out", s_out, "edge-list output file")->required();
  sc_sample->add_option("--threads", s_threads);

  auto* sc_est = add_subcommand("estimate", "empirical homomorphism density");
  std::string e_h, e_graph;
  long long e_samples = 100000;
  std::uint64_t e_seed = 0;
  int e_threads = 1;
  sc_est->add_option("--h", e_h)->required();
  sc_est->add_option("--graph", e_graph, "edge-list file")->required();
  sc_est->add_option("--samples", e_samples);
  sc_est->add_option("--seed", e_seed)->required();
  sc_est->add_option("--threads", e_threads);

  // verify-lemma ---------------------------------------------------------------
  auto* sc_verify = add_subcommand("verify-lemma", "run a lemma's acceptance checks");
  std::string v_id, v_s, v_kernel;
  int v_q = 0, v_trials = 5;
  long long v_samples = 100000;
  std::optional<std::uint64_t> v_seed;
  sc_verify->add_option("id", v_id, "3.1 3.2 3.3 3.4 4.1 4.2 4.3 4.4 thm9 thm10")->required();
  sc_verify->add_option("--q", v_q, "part count (defaults per lemma)");
  sc_verify->add_option("--s", v_s, "group sizes for gadget lemmas");
  sc_verify->add_option("--kernel", v_kernel, "kernel JSON file");
  sc_verify->add_option("--trials", v_trials, "batch size");
  sc_verify->add_option("--samples", v_samples, "random root assignments for 3.4");
  sc_verify->add_option("--seed", [&v_seed](const CLI::results_t& r) {
    v_seed = std::stoull(r[0]);
    return true;
  }, "seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sc_kernel) {
      StepKernel u = load_kernel(k_file, false);
      if (!k_refine.empty()) {
        auto colon = k_refine.find(':');
        if (colon == std::string::npos) fail(ErrorKind::UsageError, "--refine PART:F1,F2");
        int part = std::stoi(k_refine.substr(0, colon));
        StepKernel r = refine_part(u, part, parse_rat_list(k_refine.substr(colon + 1)));
        emit(kernel_to_json(r));
        return 0;
      }
      if (k_merge) {
        emit(kernel_to_json(merge_identical_rows(u)));
        return 0;
      }
      Json j;
      j["kernel"] = kernel_to_json(u);
      auto bad = check_minimality(u);
      j["minimal"] = !bad.has_value();
      if (bad) j["identical_rows"] = Json::array({bad->first, bad->second});
      Json degs = Json::array();
      for (int i = 0; i < u.q; ++i) degs.push_back(rat_to_string(degree_of_part(u, i)));
      j["degrees"] = degs;
      if (!k_weak_iso.empty()) {
        auto pi = weak_iso(merge_identical_rows(u), merge_identical_rows(load_kernel(k_weak_iso, false)));
        j["weakly_isomorphic"] = pi.has_value();
        if (pi) j["permutation"] = *pi;
      }
      emit(j);
      return 0;
    }

    if (*sc_density) {
      Graph h = load_graph_arg(d_h);
      StepKernel u = load_kernel(d_kernel, false);
      if (!d_roots.empty()) {
        auto roots = parse_int_list(d_roots);
        emit(Json{{"t", rat_to_string(rooted_density(h, u, roots))}});
      } else {
        emit(Json{{"t", rat_to_string(hom_density(h, u))}});
      }
      return 0;
    }

    if (*sc_gadget) {
      if (g_mode == "build") {
        if (g_kind == "Qk") {
          double count = std::pow(4.0, g_k * (g_k - 1));
          if (count <= static_cast<double>(g_limit)) {
            emit(Json{{"kind", "Qk"}, {"k", g_k}, {"expanded", quantum_graph_to_json(step_probe_expanded(g_k, g_limit))}});
          } else {
            emit(Json{{"kind", "Qk"}, {"k", g_k}, {"note", "expansion exceeds limit; use the factored evaluator"}});
          }
          return 0;
        }
        std::vector<int> s = g_s.empty() ? std::vector<int>(g_q, g_q + 2) : parse_int_list(g_s);
        SelectorGadget sel = make_selector(g_q, s);
        emit(selector_to_json(sel));
        return 0;
      }
      if (g_mode == "verify") {
        std::vector<int> s = g_s.empty() ? std::vector<int>(g_q, g_q + 2) : parse_int_list(g_s);
        auto rep = verify_color_gadget(build_color_gadget(g_q, s));
        emit(color_gadget_report_to_json(rep));
        return rep.ok() ? 0 : 1;
      }
      if (g_mode == "eval") {
        StepKernel u = load_kernel(g_kernel);
        if (g_kind == "Qk") {
          emit(Json{{"t", rat_to_string(step_probe_density(u, g_k))}});
          return 0;
        }
        SelectorGadget sel =
            !g_desc.empty()
                ? selector_from_json(Json::parse(read_file(g_desc)))
                : make_selector(g_q, g_s.empty() ? std::vector<int>(g_q, g_q + 2)
                                                 : parse_int_list(g_s));
        if (!g_roots.empty()) {
          emit(Json{{"t_rooted", rat_to_string(selector_rooted_density(sel, u, parse_int_list(g_roots)))},
                    {"d0", rat_to_string(selector_value(u))}});
        } else {
          emit(Json{{"t", rat_to_string(selector_density(sel, u))},
                    {"d0", rat_to_string(selector_value(u))}});
        }
        return 0;
      }
      fail(ErrorKind::UsageError, "gadget mode must be build, verify, or eval");
    }

    if (*sc_force || *sc_dforce) {
      StepKernel u = load_kernel(f_u);
      StepKernel u2 = load_kernel(f_u2);
      PipelineOptions opt;
      opt.extract_witness = !f_no_witness;
      ForcingCertificate cert =
          *sc_force ? forcing_pipeline(u, u2, opt) : degree_forcing_pipeline(u, u2, opt);
      emit(certificate_to_json(cert));
      return cert.verdict == ForcingCertificate::Verdict::Inconclusive ? 1 : 0;
    }

    if (*sc_dist) {
      StepKernel u = load_kernel(f_u);
      StepKernel u2 = load_kernel(f_u2);
      WitnessResult w = distinguishing_graph(u, u2);
      emit(Json{{"witness", to_edge_list(w.witness)},
                {"densities", Json{{"U", rat_to_string(w.density_u)}, {"U2", rat_to_string(w.density_u2)}}}});
      return 0;
    }

    if (*sc_cex) {
      auto a = parse_rat_list(c_a);
      if (c_q != static_cast<int>(a.size()))
        fail(ErrorKind::UsageError, "--q must match the number of block measures");
      CounterexamplePair pair = build_counterexample_pair(a, c_delta, c_tol);
      emit(counterexample_to_json(pair));
      return pair.report.valid() ? 0 : 1;
    }

    if (*sc_sample) {
      StepKernel u = load_kernel(s_kernel);
      SampledGraph sg = sample_block_model(u, s_n, s_seed, s_threads);
      write_file(s_out, to_edge_list(sg.graph));
      emit(Json{{"n", sg.n}, {"edges", sg.graph.edge_count()}, {"seed", sg.seed}, {"out", s_out}});
      return 0;
    }

    if (*sc_est) {
      Graph h = load_graph_arg(e_h);
      Graph g = from_edge_list(read_file(e_graph));
      DensityEstimate est = empirical_hom_density(h, g, e_samples, e_seed, e_threads);
      emit(Json{{"estimate", est.value},
                {"std_error", est.std_error},
                {"exhaustive", est.exhaustive},
                {"samples", est.samples}});
      return 0;
    }

    if (*sc_verify) {
      std::optional<StepKernel> kern;
      if (!v_kernel.empty()) kern = load_kernel(v_kernel);
      std::vector<int> s = v_s.empty() ? std::vector<int>{} : parse_int_list(v_s);
      if (v_id == "3.1") return verify_step_probe(v_q ? v_q : 2, v_trials, need_seed(v_seed));
      if (v_id == "3.2") return verify_color_lemma("3.2", v_q ? v_q : 2, s);
      if (v_id == "3.3") return verify_color_lemma("3.3", v_q ? v_q : 3, s);
      if (v_id == "3.4") return verify_selector(v_q ? v_q : 2, s, kern, v_seed, v_samples);
      if (v_id == "4.1") return verify_density_probe("4.1", true, v_trials, need_seed(v_seed));
      if (v_id == "4.2") return verify_density_probe("4.2", false, v_trials, need_seed(v_seed));
      if (v_id == "4.3") return verify_matrix_probe(v_q ? v_q : 3, v_trials, need_seed(v_seed));
      if (v_id == "4.4") return verify_power_sums(v_trials, need_seed(v_seed));
      if (v_id == "thm9") return verify_pipeline_batch("thm9", v_q ? v_q : 2, v_trials, need_seed(v_seed), false);
      if (v_id == "thm10") return verify_pipeline_batch("thm10", v_q ? v_q : 2, v_trials, need_seed(v_seed), true);
      fail(ErrorKind::UsageError, "unknown lemma id: " + v_id);
    }
  } catch (const Error& e) {
    std::cerr << Json{{"error", e.what()}, {"kind", error_kind_name(e.kind())}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", e.what()}}.dump() << "\n";
    return 2;
  }
  return 2;
}
