#include <catch2/catch_amalgamated.hpp>

#include "quasiforce/catalog.hpp"
#include "quasiforce/sbm.hpp"

using namespace qforce;

TEST_CASE("degenerate block models") {
  StepKernel zero;
  zero.q = 1;
  zero.measures = {rat(1)};
  zero.density = {{rat(0)}};
  zero.graphon = true;
  for (std::uint64_t seed : {1ull, 99ull}) {
    REQUIRE(sample_block_model(zero, 40, seed).graph.edge_count() == 0);
  }
  StepKernel one = constant_kernel(rat(1));
  REQUIRE(sample_block_model(one, 30, 7).graph.edge_count() == 30 * 29 / 2);

  StepKernel notg = constant_kernel(rat(1, 2));
  notg.graphon = false;
  REQUIRE_THROWS_MATCHES(sample_block_model(notg, 10, 1), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::NotAGraphon;
                         }));
}

TEST_CASE("edge counts concentrate") {
  StepKernel half = constant_kernel(rat(1, 2));
  auto sg = sample_block_model(half, 1000, 12345);
  double mean = 0.5 * (1000.0 * 999.0 / 2.0);
  double sd = std::sqrt((1000.0 * 999.0 / 2.0) * 0.25);
  REQUIRE(std::abs(sg.graph.edge_count() - mean) <= 4 * sd);
}

TEST_CASE("sampling is reproducible and worker-count independent") {
  StepKernel u = random_minimal_kernel(3, 31415, true);
  auto a = sample_block_model(u, 400, 999, 1);
  auto b = sample_block_model(u, 400, 999, 1);
  auto c = sample_block_model(u, 400, 999, 7);
  REQUIRE(sampled_graph_bytes(a) == sampled_graph_bytes(b));
  REQUIRE(sampled_graph_bytes(a) == sampled_graph_bytes(c));
  auto d = sample_block_model(u, 400, 1000, 1);
  REQUIRE(sampled_graph_bytes(a) != sampled_graph_bytes(d));
}

TEST_CASE("empirical density basics") {
  Graph host = random_graph(60, 0.4, 2222);
  // a single vertex maps anywhere
  auto k1 = empirical_hom_density(Graph(1), host, 10, 5);
  REQUIRE(k1.exhaustive);
  REQUIRE(k1.value == 1.0);
  // the edge density is 2m/n^2 in exhaustive mode
  auto k2 = empirical_hom_density(complete_graph(2), host, 10, 5);
  REQUIRE(k2.exhaustive);
  REQUIRE(k2.value == 2.0 * host.edge_count() / (60.0 * 60.0));
}

TEST_CASE("monte carlo matches exhaustive on small hosts") {
  Graph host = random_graph(20, 0.5, 777);
  Graph h = cycle_graph(4);
  double exact = empirical_hom_density(h, host, 1, 1).value;  // 20^4 is exhaustive
  // force the sampling path by shrinking the exhaustive budget
  long long reps = 50, samples = 20000;
  double mean = 0;
  std::vector<double> vals;
  for (long long r = 0; r < reps; ++r) {
    auto est = empirical_hom_density(h, host, samples, 1000 + r, 1, /*exhaustive_budget=*/1);
    REQUIRE(!est.exhaustive);
    vals.push_back(est.value);
    mean += est.value;
  }
  mean /= static_cast<double>(reps);
  double se = std::sqrt(exact * (1 - exact) / static_cast<double>(samples * reps));
  REQUIRE(std::abs(mean - exact) <= 5 * se);
}

TEST_CASE("sampled graphs approach the kernel densities") {
  StepKernel half = constant_kernel(rat(1, 2));
  auto sg = sample_block_model(half, 1000, 424242);
  auto est = empirical_hom_density(cycle_graph(4), sg.graph, 300000, 5);
  REQUIRE(std::abs(est.value - 1.0 / 16.0) <= 3 * (est.std_error + 0.002));
}

TEST_CASE("convergence report shrinks deviations") {
  StepKernel u = constant_kernel(rat(2, 5));
  std::vector<std::pair<std::string, Graph>> hs = {{"k1", Graph(1)}, {"k2", complete_graph(2)}};
  auto rows = convergence_report(u, hs, {100, 400, 1600}, 2024, 100000);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    if (r.graph_name == "k1") {
      REQUIRE(r.deviation == 0.0);  // every map is a homomorphism
    } else {
      double slack = 4 * (r.std_error + 1.0 / std::sqrt(r.n));
      REQUIRE(r.deviation <= slack);
    }
  }
}
