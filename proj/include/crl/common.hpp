#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crl {

using u128 = unsigned __int128;

/// Position of an element in the increasing enumeration of a Cantor set.
using Index = std::uint64_t;
/// An element k_n of a Cantor set. 128 bits covers prefixes far past desk scale.
using Element = u128;

/// Input outside an operation's domain (bad parameters, kind mismatches).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result does not fit the fixed integer width.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

std::string to_string(u128 value);

/// Parses a non-negative decimal integer into 128 bits; throws DomainError on junk or overflow.
u128 parse_u128(std::string_view text);

/// Checked arithmetic; throw RangeError on wrap-around.
inline u128 checked_mul(u128 a, u128 b) {
  u128 out;
  if (__builtin_mul_overflow(a, b, &out)) throw RangeError("128-bit overflow in multiplication");
  return out;
}

inline u128 checked_add(u128 a, u128 b) {
  u128 out;
  if (__builtin_add_overflow(a, b, &out)) throw RangeError("128-bit overflow in addition");
  return out;
}

std::uint64_t narrow_u64(u128 value);

}  // namespace crl
