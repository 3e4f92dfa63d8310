#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bgc {

/// Arbitrary-precision rational. All arena charges and exact-mode budgets
/// are stored canonicalized.
using Rational = mpq_class;

/// Parses "p/q", an integer, or a plain decimal such as "0.25" into an
/// exact rational. Throws std::invalid_argument on malformed input.
Rational parse_rational(const std::string& text);

/// Canonical "p/q" (or "p" when q == 1) rendering.
std::string format_rational(const Rational& q);

struct DenominatorOverflow : std::runtime_error {
  explicit DenominatorOverflow(std::size_t bits)
      : std::runtime_error("exact denominator exceeded " + std::to_string(bits) + " bits"),
        bits(bits) {}
  std::size_t bits;
};

/// Scalar abstraction: solvers are templated on S in {Rational, double}.
/// A computation is single-mode; mixing is a type error by construction.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<Rational> {
  static constexpr bool exact = true;
  static Rational from(const Rational& q) { return q; }
  static double to_double(const Rational& q) { return q.get_d(); }
  static std::string str(const Rational& q) { return format_rational(q); }
  static std::size_t denominator_bits(const Rational& q) {
    return mpz_sizeinbase(q.get_den().get_mpz_t(), 2);
  }
  static Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }
};

template <>
struct ScalarOps<double> {
  static constexpr bool exact = false;
  static double from(const Rational& q) { return q.get_d(); }
  static double to_double(double x) { return x; }
  static std::string str(double x) { return std::to_string(x); }
  static std::size_t denominator_bits(double) { return 0; }
  static double abs(double x) { return std::fabs(x); }
};

/// Saturation of a value to [0,1].
template <class S>
S clamp01(const S& x) {
  if (x < S(0)) return S(0);
  if (x > S(1)) return S(1);
  return x;
}

}  // namespace bgc
