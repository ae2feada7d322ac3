#include <catch2/catch_amalgamated.hpp>

#include "quasiforce/catalog.hpp"
#include "quasiforce/polynomial.hpp"

using namespace qforce;

TEST_CASE("newton identities round trip") {
  // z = (1, 5/9) -> e = (1, 2/9) -> roots {1/3, 2/3}
  auto roots = multiset_from_power_sums({rat(1), rat(5, 9)});
  REQUIRE(roots == std::vector<Rat>{rat(1, 3), rat(2, 3)});

  // q = 1: the single power sum is the value itself
  REQUIRE(multiset_from_power_sums({rat(1)}) == std::vector<Rat>{rat(1)});
}

TEST_CASE("random multisets recover exactly from power sums") {
  SplitMix rng(4242);
  for (int t = 0; t < 60; ++t) {
    int q = 1 + static_cast<int>(rng.next_in(0, 5));
    std::vector<Rat> xs;
    for (int i = 0; i < q; ++i) xs.push_back(rat(rng.next_in(1, 24), rng.next_in(2, 12)));
    std::sort(xs.begin(), xs.end());
    auto back = multiset_from_power_sums(power_sums(xs, q));
    REQUIRE(back == xs);
  }
}

TEST_CASE("repeated and negative roots") {
  std::vector<Rat> xs = {rat(-3, 2), rat(1, 4), rat(1, 4), rat(2)};
  std::sort(xs.begin(), xs.end());
  REQUIRE(multiset_from_power_sums(power_sums(xs, 4)) == xs);
}

TEST_CASE("irrational power sums are flagged") {
  // x^2 - 2: power sums z1 = 0, z2 = 4 give roots +-sqrt(2)
  REQUIRE_THROWS_MATCHES(multiset_from_power_sums({rat(0), rat(4)}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind() == ErrorKind::IrrationalMeasures;
                         }));
  auto approx = numeric_roots(Poly{rat(-2), rat(0), rat(1)});
  REQUIRE(approx.size() == 2);
  REQUIRE(std::abs(approx[0] + std::sqrt(2.0)) < 1e-9);
  REQUIRE(std::abs(approx[1] - std::sqrt(2.0)) < 1e-9);
}

TEST_CASE("rational root extraction details") {
  // roots with multiplicity, zero roots, and a deterministic order
  Poly p = poly_from_roots({rat(0), rat(0), rat(5, 3), rat(-1, 2), rat(5, 3)});
  auto rr = rational_roots(p);
  REQUIRE(rr.complete());
  REQUIRE(rr.roots == std::vector<Rat>{rat(-1, 2), rat(0), rat(0), rat(5, 3), rat(5, 3)});

  // mixed rational/irrational factorization leaves the irrational part behind
  Poly mixed = poly_mul(poly_from_roots({rat(3, 4)}), Poly{rat(-2), rat(0), rat(1)});
  auto rr2 = rational_roots(mixed);
  REQUIRE(rr2.roots == std::vector<Rat>{rat(3, 4)});
  REQUIRE(poly_degree(rr2.remainder) == 2);
}

TEST_CASE("polynomial helpers") {
  Poly p = poly_mul(Poly{rat(1), rat(1)}, Poly{rat(-1), rat(1)});  // (x+1)(x-1)
  REQUIRE(p == Poly{rat(-1), rat(0), rat(1)});
  REQUIRE(poly_eval(p, rat(3)) == rat(8));
  REQUIRE(poly_div_linear(p, rat(1)) == Poly{rat(1), rat(1)});
}
