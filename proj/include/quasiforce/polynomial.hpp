#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "quasiforce/rational.hpp"

namespace qforce {

/// Dense univariate polynomial, coeffs[i] is the coefficient of x^i.
using Poly = std::vector<Rat>;

inline void poly_trim(Poly& p) {
  while (!p.empty() && is_zero(p.back())) p.pop_back();
}

inline int poly_degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, Rat(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline Rat poly_eval(const Poly& p, const Rat& x) {
  Rat v(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

/// p / (x - root), exact; the caller guarantees root is a root.
inline Poly poly_div_linear(const Poly& p, const Rat& root) {
  Poly out(p.size() > 0 ? p.size() - 1 : 0);
  Rat carry(0);
  for (int i = static_cast<int>(p.size()) - 1; i >= 1; --i) {
    carry = p[i] + carry * root;
    out[i - 1] = carry;
  }
  return out;
}

/// Product of (x - r) over the multiset of roots.
inline Poly poly_from_roots(const std::vector<Rat>& roots) {
  Poly p{Rat(1)};
  for (const Rat& r : roots) p = poly_mul(p, Poly{-r, Rat(1)});
  return p;
}

// -- power sums and Newton's identities ----------------------------------------

/// z[k-1] = sum of x_i^k, k = 1..deg(values not needed beyond q).
inline std::vector<Rat> power_sums(const std::vector<Rat>& xs, int upto) {
  std::vector<Rat> z(upto, Rat(0));
  for (const Rat& x : xs) {
    Rat p(1);
    for (int k = 0; k < upto; ++k) {
      p *= x;
      z[k] += p;
    }
  }
  return z;
}

/// First q elementary symmetric polynomials from the first q power sums.
/// k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} z_i, with e_0 = 1.
inline std::vector<Rat> power_sums_to_elementary(const std::vector<Rat>& z) {
  int q = static_cast<int>(z.size());
  std::vector<Rat> e(q + 1, Rat(0));
  e[0] = Rat(1);
  for (int k = 1; k <= q; ++k) {
    Rat acc(0);
    for (int i = 1; i <= k; ++i) {
      Rat term = e[k - i] * z[i - 1];
      if (i % 2 == 0) term = -term;
      acc += term;
    }
    e[k] = acc / k;
  }
  return e;  // e[0..q]
}

/// Monic polynomial with the x_i as roots: x^q - e1 x^{q-1} + ... + (-1)^q e_q.
inline Poly elementary_to_monic(const std::vector<Rat>& e) {
  int q = static_cast<int>(e.size()) - 1;
  Poly p(q + 1);
  for (int k = 0; k <= q; ++k) {
    Rat c = e[q - k];
    if ((q - k) % 2 == 1) c = -c;
    p[k] = c;
  }
  return p;
}

namespace detail {

/// Positive divisors via trial division; fails once the cofactor resists the
/// budgeted sieve (caller treats that as "cannot enumerate").
inline bool positive_divisors(Int n, std::vector<Int>& out, long trial_limit = 1000000) {
  if (n < 0) n = -n;
  if (n == 0) return false;
  std::map<Int, int> fac;
  for (Int d(2); d * d <= n && d <= trial_limit; ++d) {
    while (n % d == 0) {
      fac[d]++;
      n /= d;
    }
  }
  if (n > 1) {
    // leftover cofactor: usable only if prime (probabilistic check is fine here)
    if (mpz_probab_prime_p(n.get_mpz_t(), 30) == 0) return false;
    fac[n]++;
  }
  out = {Int(1)};
  for (const auto& [p, e] : fac) {
    std::size_t sz = out.size();
    Int pk(1);
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < sz; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return true;
}

}  // namespace detail

struct RationalRootsResult {
  std::vector<Rat> roots;  // with multiplicity, ascending
  Poly remainder;          // what is left after dividing the rational roots out
  bool complete() const { return poly_degree(remainder) <= 0; }
};

/// All rational roots with multiplicity. Candidates p/s come from the divisors of
/// the constant and leading coefficients of the primitive integer form, tried in a
/// deterministic order and confirmed by exact division.
inline RationalRootsResult rational_roots(Poly p) {
  poly_trim(p);
  RationalRootsResult res;
  if (p.empty()) {
    res.remainder = p;
    return res;
  }
  // strip x^k factors: zero roots
  std::size_t k = 0;
  while (k < p.size() && is_zero(p[k])) ++k;
  for (std::size_t i = 0; i < k; ++i) res.roots.push_back(Rat(0));
  p.erase(p.begin(), p.begin() + k);

  while (poly_degree(p) >= 1) {
    // primitive integer form
    Int denlcm(1);
    for (const Rat& c : p) {
      Int d = c.get_den();
      denlcm = lcm(denlcm, d);
    }
    std::vector<Int> ic(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      ic[i] = Int(p[i].get_num() * (denlcm / p[i].get_den()));
    std::vector<Int> nums, dens;
    if (!detail::positive_divisors(ic.front(), nums) ||
        !detail::positive_divisors(ic.back(), dens)) {
      res.remainder = p;
      return res;  // cannot enumerate candidates; incomplete
    }
    bool found = false;
    for (const Int& s : dens) {
      for (const Int& num : nums) {
        for (int sign : {+1, -1}) {
          Rat cand(sign * num, s);
          cand.canonicalize();
          if (cand.get_den() != s) continue;  // only lowest terms
          if (!is_zero(poly_eval(p, cand))) continue;
          res.roots.push_back(cand);
          p = poly_div_linear(p, cand);
          poly_trim(p);
          found = true;
          break;
        }
        if (found) break;
      }
      if (found) break;
    }
    if (!found) break;
  }
  std::sort(res.roots.begin(), res.roots.end());
  res.remainder = p;
  return res;
}

/// Numeric roots by Durand-Kerner, for the flagged fallback path.
inline std::vector<double> numeric_roots(const Poly& p_in, int iters = 600) {
  Poly p = p_in;
  poly_trim(p);
  int n = poly_degree(p);
  if (n <= 0) return {};
  std::vector<double> c(n + 1);
  double lead = to_double(p[n]);
  for (int i = 0; i <= n; ++i) c[i] = to_double(p[i]) / lead;
  auto eval = [&](double x) {
    double v = 0;
    for (int i = n; i >= 0; --i) v = v * x + c[i];
    return v;
  };
  std::vector<double> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = 0.4 + 0.9 * i;  // standard spread start
  for (int it = 0; it < iters; ++it) {
    for (int i = 0; i < n; ++i) {
      double denom = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= (roots[i] - roots[j]);
      if (denom == 0.0) denom = 1e-30;
      roots[i] -= eval(roots[i]) / denom;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// The multiset {x_i} from its first q power sums.
/// Throws IrrationalMeasures when the monic polynomial does not factor rationally.
inline std::vector<Rat> multiset_from_power_sums(const std::vector<Rat>& z) {
  auto e = power_sums_to_elementary(z);
  Poly monic = elementary_to_monic(e);
  auto rr = rational_roots(monic);
  if (!rr.complete() || static_cast<int>(rr.roots.size()) != static_cast<int>(z.size()))
    fail(ErrorKind::IrrationalMeasures, "power-sum polynomial has no full rational factorization");
  // verify by recomputing the power sums
  auto back = power_sums(rr.roots, static_cast<int>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i)
    if (back[i] != z[i])
      fail(ErrorKind::IrrationalMeasures, "root verification failed");
  return rr.roots;
}

}  // namespace qforce
