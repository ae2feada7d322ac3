#include <catch2/catch_amalgamated.hpp>

#include "quasiforce/catalog.hpp"
#include "quasiforce/forcing.hpp"

using namespace qforce;
using Verdict = ForcingCertificate::Verdict;

namespace {

StepKernel example_kernel() {
  StepKernel u;
  u.q = 2;
  u.measures = {rat(1, 3), rat(2, 3)};
  u.density = {{rat(1, 2), rat(1, 4)}, {rat(1, 4), rat(3, 4)}};
  u.graphon = true;
  return u;
}

std::string first_failed_stage(const ForcingCertificate& c) {
  for (const auto& s : c.stages)
    if (!s.passed) return s.name;
  return "";
}

}  // namespace

TEST_CASE("detect_steps") {
  REQUIRE(detect_steps(constant_kernel(rat(1, 3)), 4) == 1);
  StepKernel u3 = random_minimal_kernel(3, 42);
  REQUIRE(detect_steps(u3, 5) == 3);
  // a refined 2-step kernel presented with 3 parts still detects as 2-step
  StepKernel u2 = random_minimal_kernel(2, 43);
  StepKernel refined = refine_part(u2, 0, {u2.measures[0] / 2, u2.measures[0] / 2});
  REQUIRE(refined.q == 3);
  REQUIRE(detect_steps(refined, 5) == 2);
}

TEST_CASE("part-density probe") {
  StepKernel u = example_kernel();  // part densities 1/2 and 3/4
  REQUIRE(check_part_densities(u, {rat(1, 2), rat(3, 4)}).matched);
  auto r = check_part_densities(u, {rat(1, 2)});
  REQUIRE(!r.matched);
  REQUIRE(r.density > 0);

  // closed form equals the monomial-by-monomial decorated-selector sum
  for (int t = 0; t < 5; ++t) {
    StepKernel v = random_minimal_kernel(2, 1300 + t);
    std::vector<Rat> d_set = {rat(1, 3), rat(2, 7)};
    Poly p{Rat(1)};
    for (const Rat& d : d_set) p = poly_mul(p, poly_mul(Poly{-d, Rat(1)}, Poly{-d, Rat(1)}));
    Rat via_monomials(0);
    for (int m = 0; m < static_cast<int>(p.size()); ++m) {
      if (is_zero(p[m])) continue;
      SelectorGadget sel = make_selector(2, {4, 4});
      if (m > 0) add_decorations(sel, 0, 0, m);
      via_monomials += p[m] * selector_density(sel, v);
    }
    REQUIRE(check_part_densities(v, d_set).density == via_monomials);
  }
}

TEST_CASE("pair-density probe") {
  StepKernel u = example_kernel();  // single pair density 1/4
  REQUIRE(check_pair_densities(u, {rat(1, 4)}).matched);
  REQUIRE(!check_pair_densities(u, {rat(1, 3)}).matched);

  for (int t = 0; t < 5; ++t) {
    StepKernel v = random_minimal_kernel(2, 1400 + t);
    std::vector<Rat> d_set = {rat(1, 5)};
    Poly p = poly_mul(Poly{-d_set[0], Rat(1)}, Poly{-d_set[0], Rat(1)});
    Rat via_monomials(0);
    for (int m = 0; m < static_cast<int>(p.size()); ++m) {
      if (is_zero(p[m])) continue;
      SelectorGadget sel = make_selector(2, {4, 4});
      if (m > 0) add_decorations(sel, 0, 1, m);
      via_monomials += p[m] * selector_density(sel, v);
    }
    REQUIRE(check_pair_densities(v, d_set).density == via_monomials);
  }
}

TEST_CASE("matrix probe matches scrambled kernels") {
  StepKernel u = random_minimal_kernel(3, 77);
  StepKernel u2 = scramble_parts(u, 5);
  auto pi = match_density_matrix(u2, u.density);
  REQUIRE(pi);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) REQUIRE(u2.density[(*pi)[i]][(*pi)[j]] == u.density[i][j]);
}

TEST_CASE("matrix probe rejects incompatible arrangements") {
  // same diagonal and off-diagonal value multisets, but no aligning permutation
  StepKernel u, u2;
  u.q = u2.q = 3;
  u.measures = u2.measures = {rat(1, 3), rat(1, 3), rat(1, 3)};
  u.graphon = u2.graphon = true;
  u.density = {{rat(1, 2), rat(1, 5), rat(1, 6)},
               {rat(1, 5), rat(1, 3), rat(1, 7)},
               {rat(1, 6), rat(1, 7), rat(1, 4)}};
  u2.density = {{rat(1, 2), rat(1, 6), rat(1, 5)},
                {rat(1, 6), rat(1, 3), rat(1, 7)},
                {rat(1, 5), rat(1, 7), rat(1, 4)}};
  // brute-force confirmation that the arrangement really is incompatible
  std::vector<int> pi = {0, 1, 2};
  bool any = false;
  do {
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i)
      for (int j = i; j < 3 && ok; ++j)
        if (u2.density[pi[i]][pi[j]] != u.density[i][j]) ok = false;
    any = any || ok;
  } while (std::next_permutation(pi.begin(), pi.end()));
  REQUIRE(!any);

  Rat t;
  REQUIRE(!match_density_matrix(u2, u.density, &t));
  REQUIRE(is_zero(t));
}

TEST_CASE("measure recovery round trips on kernels") {
  SplitMix rng(31);
  for (int t = 0; t < 50; ++t) {
    int q = 1 + static_cast<int>(rng.next_in(0, 3));
    StepKernel u = random_minimal_kernel(q, 10000 + t);
    auto rec = recover_measures(u, q);
    REQUIRE(rec.exact);
    std::vector<Rat> expect = u.measures;
    std::sort(expect.begin(), expect.end());
    REQUIRE(rec.measures == expect);
  }
}

TEST_CASE("pipeline accepts scrambled kernels") {
  for (int q : {2, 3}) {
    StepKernel u = random_minimal_kernel(q, 2024 + q);
    StepKernel u2 = scramble_parts(u, 9 + q);
    auto cert = forcing_pipeline(u, u2);
    REQUIRE(cert.verdict == Verdict::WeaklyIsomorphic);
    for (int i = 0; i < q; ++i) {
      REQUIRE(u2.measures[cert.permutation[i]] == u.measures[i]);
      for (int j = 0; j < q; ++j)
        REQUIRE(u2.density[cert.permutation[i]][cert.permutation[j]] == u.density[i][j]);
    }
    REQUIRE(cert.max_stage_vertices() <= cert.vertex_budget);
    REQUIRE(cert.vertex_budget == 4 * q * q - q);
  }
}

TEST_CASE("measure perturbation is caught at the moment stage") {
  StepKernel u = random_minimal_kernel(3, 321);
  StepKernel u2 = u;
  u2.measures[0] += rat(1, 24);
  u2.measures[2] -= rat(1, 24);
  REQUIRE(!check_minimality(u2));
  auto cert = forcing_pipeline(u, u2);
  REQUIRE(cert.verdict == Verdict::Distinguished);
  REQUIRE(first_failed_stage(cert).starts_with("measure-moment"));
  REQUIRE(cert.witness);
  REQUIRE(cert.witness->density_u != cert.witness->density_u2);
  REQUIRE(hom_density_brute(cert.witness->witness, u) == cert.witness->density_u);
  REQUIRE(hom_density_brute(cert.witness->witness, u2) == cert.witness->density_u2);
}

TEST_CASE("alignment stage catches multiset-preserving measure swaps") {
  StepKernel u = random_minimal_kernel(3, 808);
  StepKernel u2 = u;
  std::swap(u2.measures[0], u2.measures[1]);
  if (u2.measures[0] == u2.measures[1]) return;  // degenerate draw
  auto cert = forcing_pipeline(u, u2);
  if (weak_iso(u, u2)) {
    REQUIRE(cert.verdict == Verdict::WeaklyIsomorphic);
  } else {
    REQUIRE(cert.verdict == Verdict::Distinguished);
    REQUIRE(first_failed_stage(cert) == "alignment-probe");
  }
}

TEST_CASE("the largest alignment constituents reach exactly 4q^2-q vertices") {
  for (int q : {2, 3}) {
    StepKernel u = random_minimal_kernel(q, 5555 + q);
    bool distinct = true;
    for (int i = 0; i < q && distinct; ++i)
      for (int j = i + 1; j < q; ++j)
        if (u.measures[i] == u.measures[j]) distinct = false;
    if (!distinct) continue;
    REQUIRE(alignment_probe_max_vertices(u) == 4 * q * q - q);
  }
}

TEST_CASE("pipeline verdicts agree with weak_iso on a batch") {
  int n = 0;
  for (int t = 0; t < 20; ++t) {
    int q = 2 + t % 2;
    StepKernel a = random_minimal_kernel(q, 40000 + t);
    StepKernel b = (t % 2 == 0) ? scramble_parts(a, t) : random_minimal_kernel(q, 50000 + t);
    auto cert = forcing_pipeline(a, b, PipelineOptions{.extract_witness = false});
    REQUIRE((cert.verdict == Verdict::WeaklyIsomorphic) == weak_iso(a, b).has_value());
    ++n;
  }
  REQUIRE(n == 20);
}

TEST_CASE("the pipeline still decides at q=4") {
  StepKernel u = random_minimal_kernel(4, 11);
  auto iso = forcing_pipeline(u, scramble_parts(u, 3), PipelineOptions{.extract_witness = false});
  REQUIRE(iso.verdict == Verdict::WeaklyIsomorphic);
  REQUIRE(iso.vertex_budget == 60);
  REQUIRE(iso.max_stage_vertices() <= 60);
  StepKernel v = random_minimal_kernel(4, 12);
  auto dist = forcing_pipeline(u, v, PipelineOptions{.extract_witness = false});
  REQUIRE((dist.verdict == Verdict::WeaklyIsomorphic) == weak_iso(u, v).has_value());
}

TEST_CASE("distinguishing constant graphons") {
  StepKernel p = constant_kernel(rat(1, 3));
  StepKernel p2 = constant_kernel(rat(2, 5));
  WitnessResult w = distinguishing_graph(p, p2);
  REQUIRE(w.witness.vertex_count() == 2);
  REQUIRE(w.density_u == rat(1, 3));
  REQUIRE(w.density_u2 == rat(2, 5));
}

TEST_CASE("distinguishing 2-step kernels differing in one pair density") {
  StepKernel u = example_kernel();
  StepKernel u2 = u;
  u2.density[0][1] = u2.density[1][0] = rat(1, 5);
  WitnessResult w = distinguishing_graph(u, u2);
  REQUIRE(w.witness.vertex_count() <= 14);  // 4q^2-q at q=2
  REQUIRE(w.density_u != w.density_u2);
  REQUIRE(hom_density_brute(w.witness, u) == w.density_u);
  REQUIRE(hom_density_brute(w.witness, u2) == w.density_u2);

  StepKernel scr = scramble_parts(u, 77);
  REQUIRE_THROWS(distinguishing_graph(u, scr));  // weakly isomorphic: no witness
}

TEST_CASE("degree pipeline on degree-distinct kernels") {
  StepKernel u = example_kernel();  // degrees 1/3 and 7/12
  StepKernel u2 = scramble_parts(u, 3);
  auto cert = degree_forcing_pipeline(u, u2);
  REQUIRE(cert.verdict == Verdict::WeaklyIsomorphic);
  REQUIRE(cert.vertex_budget == 5);
  REQUIRE(cert.max_stage_vertices() <= 5);

  StepKernel u3 = u;
  u3.density[0][1] = u3.density[1][0] = rat(3, 10);
  auto cert2 = degree_forcing_pipeline(u, u3);
  REQUIRE(cert2.verdict == Verdict::Distinguished);
  REQUIRE(cert2.witness);
  REQUIRE(cert2.witness->witness.vertex_count() <= 5);
  REQUIRE(hom_density_brute(cert2.witness->witness, u) == cert2.witness->density_u);
  REQUIRE(hom_density_brute(cert2.witness->witness, u3) == cert2.witness->density_u2);
}

TEST_CASE("degree pipeline rejects equal degrees") {
  StepKernel bi;
  bi.q = 2;
  bi.measures = {rat(1, 2), rat(1, 2)};
  bi.density = {{rat(1), rat(0)}, {rat(0), rat(1)}};
  bi.graphon = true;
  REQUIRE_THROWS_MATCHES(degree_forcing_pipeline(bi, bi), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::DegreesNotDistinct;
                         }));
}

TEST_CASE("degree pair probes match their closed forms") {
  for (int q : {2, 3}) {
    StepKernel u = random_degree_distinct_kernel(q, 999 + q);
    auto degs = degree_vector(u);
    for (int k = 0; k < q; ++k) {
      // the measure probe: a_k prod_{i != k} (d_k - d_i)
      Rat expect = u.measures[k];
      for (int i = 0; i < q; ++i)
        if (i != k) expect *= (degs[k] - degs[i]);
      REQUIRE(quantum_density(degree_filter_probe(degs, false, k), u) == expect);
      for (int l = k; l < q; ++l) {
        REQUIRE(quantum_density(degree_pair_probe(degs, k, l, false), u) ==
                degree_pair_probe_closed_form(u, k, l, false));
        REQUIRE(quantum_density(degree_pair_probe(degs, k, l, true), u) ==
                degree_pair_probe_closed_form(u, k, l, true));
      }
    }
    // the squared filter vanishes on u itself
    REQUIRE(is_zero(quantum_density(degree_filter_probe(degs, true), u)));
  }
}

TEST_CASE("C4 minimality: checkerboard refinement has an exact fourth-power gap") {
  StepKernel half = constant_kernel(rat(1, 2));
  StepKernel checker;
  checker.q = 2;
  checker.measures = {rat(1, 4), rat(1, 4) + rat(1, 2)};  // any split works
  checker.measures = {rat(1, 2), rat(1, 2)};
  Rat e = rat(1, 10);
  checker.density = {{rat(1, 2) + e, rat(1, 2) - e}, {rat(1, 2) - e, rat(1, 2) + e}};
  checker.graphon = true;
  Rat gap = hom_density(cycle_graph(4), checker) - hom_density(cycle_graph(4), half);
  REQUIRE(gap == pow_rat(e, 4));
}

TEST_CASE("C4 minimality property test") {
  StepKernel u = random_minimal_kernel(2, 2718, true);
  auto rep = c4_minimality_test(u, 25, 99);
  REQUIRE(rep.ok());
  REQUIRE(rep.strict + rep.equal_constant == rep.trials);
  REQUIRE(rep.strict > 0);

  // a refinement with unchanged per-block values keeps t(C4) exactly
  StepKernel trivial = refine_part(u, 0, {u.measures[0] / 3, u.measures[0] - u.measures[0] / 3});
  REQUIRE(hom_density(cycle_graph(4), trivial) == hom_density(cycle_graph(4), u));
}
