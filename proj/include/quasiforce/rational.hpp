#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "quasiforce/error.hpp"

namespace qforce {

// Exact rational scalar used throughout the exact-arithmetic mode.
// GMP keeps values canonical (den > 0, gcd(num, den) = 1).
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
  if (den == 0) fail(ErrorKind::UsageError, "rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

/// Canonical "p/q" form; the denominator is always written, even when 1.
inline std::string rat_to_string(const Rat& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

/// Accepts "p" and "p/q"; normalizes sign and gcd.
inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) fail(ErrorKind::UsageError, "empty rational literal");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '/'))
      fail(ErrorKind::UsageError, "bad rational literal: " + s);
  }
  Rat r;
  if (r.set_str(s, 10) != 0) fail(ErrorKind::UsageError, "bad rational literal: " + s);
  if (r.get_den() == 0) fail(ErrorKind::UsageError, "zero denominator: " + s);
  r.canonicalize();
  return r;
}

inline Rat pow_rat(Rat base, unsigned long e) {
  Rat out(1);
  while (e > 0) {
    if (e & 1) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

inline double to_double(const Rat& x) { return x.get_d(); }

inline Rat abs_rat(const Rat& x) { return x < 0 ? Rat(-x) : x; }

inline bool is_zero(const Rat& x) { return sgn(x) == 0; }

/// Sum of a vector, exact.
inline Rat rat_sum(const std::vector<Rat>& xs) {
  Rat s(0);
  for (const auto& x : xs) s += x;
  return s;
}

}  // namespace qforce
