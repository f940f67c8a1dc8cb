#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace atomip {

// Exact rational numbers backed by GMP. Always kept canonical.
using Rational = mpq_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational r(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
  r.canonicalize();
  return r;
}

inline bool is_integral(const Rational& r) { return r.get_den() == 1; }

inline mpz_class floor_of(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline double to_double(const Rational& r) { return r.get_d(); }

// "7", "-3", "1/2".
inline std::string to_string(const Rational& r) { return r.get_str(); }

}  // namespace atomip
