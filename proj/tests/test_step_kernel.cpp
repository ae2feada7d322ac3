#include <catch2/catch_amalgamated.hpp>

#include "quasiforce/catalog.hpp"
#include "quasiforce/json_io.hpp"
#include "quasiforce/kernel.hpp"

using namespace qforce;

namespace {

StepKernel example_kernel() {
  StepKernel u;
  u.q = 2;
  u.measures = {rat(1, 3), rat(2, 3)};
  u.density = {{rat(1, 2), rat(1, 4)}, {rat(1, 4), rat(3, 4)}};
  u.graphon = true;
  return u;
}

StepKernel block_identity() {
  StepKernel u;
  u.q = 2;
  u.measures = {rat(1, 2), rat(1, 2)};
  u.density = {{rat(1), rat(0)}, {rat(0), rat(1)}};
  u.graphon = true;
  return u;
}

}  // namespace

TEST_CASE("minimality check") {
  REQUIRE(!check_minimality(block_identity()));

  StepKernel flat;
  flat.q = 2;
  flat.measures = {rat(1, 2), rat(1, 2)};
  flat.density = {{rat(1, 3), rat(1, 3)}, {rat(1, 3), rat(1, 3)}};
  auto bad = check_minimality(flat);
  REQUIRE(bad);
  REQUIRE(*bad == std::make_pair(0, 1));

  StepKernel three = random_minimal_kernel(3, 11);
  three.density[2] = three.density[0];
  for (int j = 0; j < 3; ++j) three.density[j][2] = three.density[j][0];
  REQUIRE(check_minimality(three).has_value());
}

TEST_CASE("densities on the constant graphon") {
  StepKernel w = constant_kernel(rat(2, 5));
  REQUIRE(hom_density(complete_graph(2), w) == rat(2, 5));
  REQUIRE(hom_density(cycle_graph(4), w) == pow_rat(rat(2, 5), 4));
}

TEST_CASE("block identity and the worked 2-step kernel") {
  REQUIRE(hom_density(cycle_graph(4), block_identity()) == rat(1, 8));
  REQUIRE(hom_density(complete_graph(2), example_kernel()) == rat(1, 2));
}

TEST_CASE("rooted densities") {
  StepKernel u = example_kernel();
  REQUIRE(degree_of_part(constant_kernel(rat(3, 8)), 0) == rat(3, 8));
  // one root: the density of rooted K2 is the part degree
  REQUIRE(rooted_density(k2_rooted(), u, {0}) == rat(1, 3));
  REQUIRE(rooted_density(k2_rooted(), u, {1}) == rat(7, 12));
  REQUIRE(degree_of_part(u, 0) == rat(1, 3));
  REQUIRE(degree_of_part(u, 1) == rat(7, 12));

  // zero roots coincide with the plain density
  Graph h = cycle_graph(4);
  REQUIRE(rooted_density(h, u, {}) == hom_density(h, u));

  auto bi = block_identity();
  REQUIRE(degree_of_part(bi, 0) == degree_of_part(bi, 1));  // degree pipeline precondition fails
}

TEST_CASE("root integration reproduces the unlabeled density") {
  SplitMix rng(21);
  for (int t = 0; t < 20; ++t) {
    int q = 2 + (t % 2);
    StepKernel u = random_minimal_kernel(q, 900 + t);
    int n = static_cast<int>(rng.next_in(2, 5));
    int k = static_cast<int>(rng.next_in(1, n));
    Graph g = random_graph(n, 0.5, rng.next());
    // measure-weighted sum of rooted densities over all root assignments
    std::vector<int> parts(k, 0);
    Rat total(0);
    while (true) {
      Rat w(1);
      for (int i = 0; i < k; ++i) w *= u.measures[parts[i]];
      total += w * rooted_density(g, u, parts);
      int d = 0;
      while (d < k && ++parts[d] == q) parts[d++] = 0;
      if (d == k) break;
    }
    REQUIRE(total == hom_density(g, u));
  }
}

TEST_CASE("quantum densities are linear") {
  StepKernel u = example_kernel();
  REQUIRE(is_zero(quantum_density(QuantumGraph{}, u)));

  QuantumGraph q;
  q.add_term(Rat(1), complete_graph(2));
  q.add_term(-rat(2, 5), Graph(1));
  StepKernel w = constant_kernel(rat(2, 5));
  REQUIRE(is_zero(quantum_density(q, w)));
}

TEST_CASE("brute force and elimination DP agree") {
  SplitMix rng(77);
  for (int t = 0; t < 25; ++t) {
    int q = 2 + (t % 2);
    StepKernel u = random_minimal_kernel(q, 300 + t, t % 3 != 0);
    int n = static_cast<int>(rng.next_in(1, 8));
    Graph g = random_graph(n, 0.45, rng.next());
    REQUIRE(hom_density_brute(g, u) == hom_density_eliminate(g, u));
  }
}

TEST_CASE("density is multiplicative over disjoint unions and ignores isolated vertices") {
  SplitMix rng(13);
  for (int t = 0; t < 10; ++t) {
    StepKernel u = random_minimal_kernel(2, 600 + t);
    int n1 = static_cast<int>(rng.next_in(1, 4)), n2 = static_cast<int>(rng.next_in(1, 4));
    Graph a = random_graph(n1, 0.5, rng.next());
    Graph b = random_graph(n2, 0.5, rng.next());
    Graph uni(n1 + n2);
    for (auto [x, y] : a.edges()) uni.add_edge(x, y);
    for (auto [x, y] : b.edges()) uni.add_edge(n1 + x, n1 + y);
    REQUIRE(hom_density(uni, u) == hom_density(a, u) * hom_density(b, u));

    Graph plus_isolated(n1 + 1);
    for (auto [x, y] : a.edges()) plus_isolated.add_edge(x, y);
    REQUIRE(hom_density(plus_isolated, u) == hom_density(a, u));
  }
}

TEST_CASE("weak isomorphism finds the part matching") {
  StepKernel u = example_kernel();
  StepKernel rev;
  rev.q = 2;
  rev.measures = {u.measures[1], u.measures[0]};
  rev.density = {{u.density[1][1], u.density[1][0]}, {u.density[0][1], u.density[0][0]}};
  rev.graphon = true;
  auto pi = weak_iso(u, rev);
  REQUIRE(pi);
  REQUIRE(*pi == std::vector<int>{1, 0});

  StepKernel other = block_identity();
  StepKernel tweaked = other;
  tweaked.density = {{rat(1), rat(1, 2)}, {rat(1, 2), rat(1)}};
  REQUIRE(!weak_iso(other, tweaked));

  StepKernel not_minimal;
  not_minimal.q = 2;
  not_minimal.measures = {rat(1, 2), rat(1, 2)};
  not_minimal.density = {{rat(1, 3), rat(1, 3)}, {rat(1, 3), rat(1, 3)}};
  REQUIRE_THROWS_MATCHES(weak_iso(not_minimal, not_minimal), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::NotMinimal;
                         }));
}

TEST_CASE("weak isomorphism is an equivalence on a catalog") {
  std::vector<StepKernel> cat;
  for (int t = 0; t < 6; ++t) cat.push_back(random_minimal_kernel(2 + t % 2, 7000 + t));
  cat.push_back(scramble_parts(cat[0], 5));
  cat.push_back(scramble_parts(cat[1], 9));
  for (const auto& a : cat) REQUIRE(weak_iso(a, a));  // reflexive
  for (const auto& a : cat)
    for (const auto& b : cat) {
      auto ab = weak_iso(a, b);
      auto ba = weak_iso(b, a);
      REQUIRE(ab.has_value() == ba.has_value());  // symmetric
      if (ab) {
        for (int i = 0; i < a.q; ++i) {
          REQUIRE(b.measures[(*ab)[i]] == a.measures[i]);
          for (int j = 0; j < a.q; ++j)
            REQUIRE(b.density[(*ab)[i]][(*ab)[j]] == a.density[i][j]);
        }
      }
      for (const auto& c : cat) {  // transitive
        if (weak_iso(a, b) && weak_iso(b, c)) REQUIRE(weak_iso(a, c).has_value());
      }
    }
}

TEST_CASE("refinement preserves all densities") {
  StepKernel w = constant_kernel(rat(3, 7));
  StepKernel split = refine_part(w, 0, {rat(1, 3), rat(1, 3) + rat(1, 3)});
  REQUIRE(split.q == 2);
  REQUIRE(check_minimality(split).has_value());
  for (int n = 1; n <= 4; ++n) {
    Graph g = random_graph(n, 0.6, 1234 + n);
    REQUIRE(hom_density(g, split) == hom_density(g, w));
  }

  StepKernel u = random_minimal_kernel(2, 5150);
  StepKernel fine = refine_part(u, 1, {u.measures[1] / 3, u.measures[1] - u.measures[1] / 3});
  REQUIRE(hom_density(cycle_graph(4), fine) == hom_density(cycle_graph(4), u));
  for (int n = 1; n <= 6; ++n) {
    Graph g = random_graph(n, 0.5, 99 + n);
    REQUIRE(hom_density(g, fine) == hom_density(g, u));
  }
  REQUIRE(merge_identical_rows(fine).q == u.q);
  REQUIRE(weak_iso(merge_identical_rows(fine), u).has_value());

  REQUIRE_THROWS_MATCHES(refine_part(u, 0, {rat(1, 100), rat(1, 100)}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::BadSplit;
                         }));
}

TEST_CASE("kernel JSON round trip is exact") {
  StepKernel u = example_kernel();
  Json j = kernel_to_json(u);
  StepKernel back = kernel_from_json(j);
  REQUIRE(back.q == u.q);
  REQUIRE(back.measures == u.measures);
  REQUIRE(back.density == u.density);
  REQUIRE(back.graphon == u.graphon);
  REQUIRE(kernel_to_json(back).dump() == j.dump());

  // canonical "p/q" strings
  REQUIRE(rat_to_string(rat(-7, 21)) == "-1/3");
  REQUIRE(rat_from_string("6/8") == rat(3, 4));
  REQUIRE(rat_to_string(rat(2)) == "2/1");
}

TEST_CASE("quantum graph JSON round trip") {
  QuantumGraph q;
  q.add_term(rat(-3, 7), cycle_graph(4));
  q.add_term(rat(5, 2), path_graph(3));
  QuantumGraph back = quantum_graph_from_json(quantum_graph_to_json(q));
  REQUIRE(back.terms.size() == 2);
  REQUIRE(back.terms[0].first == rat(-3, 7));
  REQUIRE(back.terms[0].second == cycle_graph(4));
  REQUIRE(quantum_graph_to_json(back).dump() == quantum_graph_to_json(q).dump());
}

TEST_CASE("numeric kernel JSON round trip is bit exact") {
  NumericKernel u;
  u.q = 2;
  u.measures = {0.17860571099491755, 0.41};
  u.density = {{1.0, 0.0}, {0.0, 1.0}};
  u.graphon = true;
  NumericKernel back = numeric_kernel_from_json(kernel_to_json(u));
  REQUIRE(back.measures == u.measures);
  REQUIRE(back.density == u.density);
  REQUIRE(kernel_to_json(back).dump() == kernel_to_json(u).dump());
}

TEST_CASE("kernel validation rejects bad inputs") {
  StepKernel u = example_kernel();
  u.measures = {rat(1, 3), rat(1, 3)};
  REQUIRE_THROWS(validate_kernel(u));

  StepKernel v = example_kernel();
  v.density[0][1] = rat(1, 5);  // asymmetric
  REQUIRE_THROWS(validate_kernel(v));

  StepKernel w = example_kernel();
  w.density[0][0] = rat(3, 2);  // out of graphon range
  REQUIRE_THROWS_MATCHES(validate_kernel(w), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::NotAGraphon;
                         }));
  w.graphon = false;
  REQUIRE_NOTHROW(validate_kernel(w));  // kernels may leave [0,1]
}
