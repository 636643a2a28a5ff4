#pragma once

// Phases alpha*k mod 1 for integer k, reduced without losing the fractional bits.

#include <cstdint>
#include <string>
#include <string_view>

#include "crl/common.hpp"

namespace crl {

/// frac(a*k) for the exact binary value of `a`, rounded once to double. Result in [0,1).
double frac_product(double a, u128 k);

/// A rotation frequency: either an exact rational p/q or a real carried as an unevaluated sum hi+lo.
class Frequency {
 public:
  static Frequency rational(std::int64_t p, std::uint64_t q);
  static Frequency real(double hi, double lo = 0.0);

  /// "p/q", a decimal, or the literals "sqrt2" and "golden".
  static Frequency parse(std::string_view text);

  bool is_rational() const { return rational_; }
  std::int64_t numerator() const { return p_; }
  std::uint64_t denominator() const { return q_; }

  /// Nearest double (for reporting).
  double approx() const;

  /// frac(alpha * k) in [0,1).
  double turns(u128 k) const;

  /// Rational p/q times m, reduced. Throws DomainError for reals (use turns(m*k) instead).
  Frequency scaled(std::int64_t m) const;

  /// alpha reduced mod 1 is zero.
  bool is_zero() const;

  std::string to_text() const;

 private:
  bool rational_ = true;
  std::int64_t p_ = 0;  // reduced, 0 <= p < q
  std::uint64_t q_ = 1;
  double hi_ = 0.0;
  double lo_ = 0.0;
};

}  // namespace crl
