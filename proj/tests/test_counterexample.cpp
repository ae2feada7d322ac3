#include <catch2/catch_amalgamated.hpp>

#include "quasiforce/catalog.hpp"
#include "quasiforce/counterexample.hpp"
#include "quasiforce/forcing.hpp"

using namespace qforce;

TEST_CASE("component product density formula") {
  std::vector<Rat> a = {rat(1, 5), rat(2, 5)};
  // a single clique K_{l+1}: sum_j a_j^{l+1}
  for (int l = 1; l <= 4; ++l) {
    Rat expect = pow_rat(a[0], l + 1) + pow_rat(a[1], l + 1);
    REQUIRE(component_product_density(complete_graph(l + 1), a) == expect);
  }
  // two disjoint edges: (sum a_j^2)^2
  Graph two_edges(4);
  two_edges.add_edge(0, 1);
  two_edges.add_edge(2, 3);
  Rat s2 = a[0] * a[0] + a[1] * a[1];
  REQUIRE(component_product_density(two_edges, a) == s2 * s2);
  // isolated vertices contribute nothing
  Graph with_isolated(3);
  with_isolated.add_edge(0, 1);
  REQUIRE(component_product_density(with_isolated, a) == s2);
}

TEST_CASE("component product equals the induced-kernel density") {
  DiagonalBlockGraphon block({rat(1, 6), rat(1, 4), rat(1, 3)});
  StepKernel u = block.kernel();
  REQUIRE(u.q == 4);
  REQUIRE(!check_minimality(u));
  SplitMix rng(55);
  for (int t = 0; t < 30; ++t) {
    int n = static_cast<int>(rng.next_in(1, 6));
    Graph g = random_graph(n, 0.5, rng.next());
    REQUIRE(component_product_density(g, block.a) == hom_density(g, u));
  }
}

TEST_CASE("small graph catalog sizes") {
  REQUIRE(enumerate_small_graphs(1).size() == 1);
  REQUIRE(enumerate_small_graphs(2).size() == 3);    // 1 + 2
  REQUIRE(enumerate_small_graphs(3).size() == 7);    // + 4
  REQUIRE(enumerate_small_graphs(4).size() == 18);   // + 11
  REQUIRE(enumerate_small_graphs(5).size() == 52);   // + 34
  REQUIRE(enumerate_small_graphs(6).size() == 208);  // + 156
  REQUIRE_THROWS_MATCHES(enumerate_small_graphs(8), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::TooLarge;
                         }));
}

TEST_CASE("power sum jacobian") {
  // q = 2: single entry 2 a_1
  auto j = power_sum_jacobian({0.2, 0.4});
  REQUIRE(j.size() == 1);
  REQUIRE(j[0][0] == Catch::Approx(0.4));

  // q = 3: factored determinant 2*3*a1*a2*(a2-a1)
  auto j3 = power_sum_jacobian({0.1, 0.2, 0.3});
  double det = j3[0][0] * j3[1][1] - j3[0][1] * j3[1][0];
  REQUIRE(det == Catch::Approx(6 * 0.1 * 0.2 * (0.2 - 0.1)));

  REQUIRE_THROWS_MATCHES(power_sum_jacobian({0.2, 0.2, 0.5}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::Singular;
                         }));
}

TEST_CASE("jacobian matches central finite differences") {
  std::vector<double> a = {0.12, 0.23, 0.31};
  auto jac = power_sum_jacobian(a);
  double h = 1e-7;
  for (int l = 1; l <= 2; ++l) {
    for (int i = 0; i < 2; ++i) {
      auto hi = a, lo = a;
      hi[i] += h;
      lo[i] -= h;
      double f1 = 0, f0 = 0;
      for (int t = 0; t < 3; ++t) {
        f1 += std::pow(hi[t], l + 1);
        f0 += std::pow(lo[t], l + 1);
      }
      double fd = (f1 - f0) / (2 * h);
      REQUIRE(std::abs(fd - jac[l - 1][i]) / std::abs(jac[l - 1][i]) < 1e-6);
    }
  }
}

TEST_CASE("perturbation solve at q=2 has a closed-form check") {
  // new last measure 41/100; the remaining one solves a single quadratic
  auto x = solve_perturbation({0.2, 0.4}, 0.41);
  double expect = std::sqrt(0.2 * 0.2 + 0.4 * 0.4 - 0.41 * 0.41);
  REQUIRE(std::abs(x[0] - expect) < 1e-12);
  REQUIRE(x[1] == 0.41);
  REQUIRE(std::abs(x[0] - 0.178606) < 1e-5);

  // zero perturbation is a fixed point
  auto fixed = solve_perturbation({0.2, 0.4}, 0.4);
  REQUIRE(fixed[0] == Catch::Approx(0.2).margin(1e-14));
  REQUIRE(fixed[1] == 0.4);
}

TEST_CASE("perturbation solve at q=3 leaves tiny residuals") {
  std::vector<double> a = {0.1, 0.2, 0.3};
  auto x = solve_perturbation(a, 0.305, 1e-12);
  for (int l = 1; l <= 2; ++l) {
    double before = 0, after = 0;
    for (double v : a) before += std::pow(v, l + 1);
    for (double v : x) after += std::pow(v, l + 1);
    REQUIRE(std::abs(after - before) <= 1e-12);
  }
}

TEST_CASE("counterexample pair at q=2") {
  auto pair = build_counterexample_pair({rat(1, 5), rat(2, 5)}, 0.01);
  REQUIRE(pair.report.valid());
  REQUIRE(pair.report.max_small_gap <= 1e-12);
  REQUIRE(pair.report.clique_gap >= 1e-3);
  REQUIRE(pair.report.clique_gap == Catch::Approx(0.00261852).margin(2e-5));
  REQUIRE(!weak_iso_numeric(pair.u, pair.u2, 1e-9));

  // exact densities of the unperturbed side: t(K2) = 1/5, t(K3) = 9/125
  std::vector<Rat> a = {rat(1, 5), rat(2, 5)};
  REQUIRE(component_product_density(complete_graph(2), a) == rat(1, 5));
  REQUIRE(component_product_density(complete_graph(3), a) == rat(9, 125));
}

TEST_CASE("zero delta is rejected") {
  auto pair = build_counterexample_pair({rat(1, 5), rat(2, 5)}, 0.0);
  REQUIRE(!pair.report.valid());
  REQUIRE(!pair.report.separated_above);
}

TEST_CASE("counterexample pair at q=3") {
  auto pair = build_counterexample_pair({rat(1, 10), rat(2, 10), rat(3, 10)}, 0.005);
  REQUIRE(pair.report.valid());
  // all 3-vertex classes agree, K4 separates
  for (const Graph& h : enumerate_small_graphs(3)) {
    double gap = std::abs(component_product_density(h, pair.a_original) -
                          component_product_density(h, pair.a_perturbed));
    REQUIRE(gap <= 1e-12);
  }
  double k4_gap = std::abs(component_product_density(complete_graph(4), pair.a_original) -
                           component_product_density(complete_graph(4), pair.a_perturbed));
  REQUIRE(k4_gap > 1e-11);
}
