#include "crl/common.hpp"

#include <algorithm>

namespace crl {

std::string to_string(u128 value) {
  if (value == 0) return "0";
  std::string out;
  while (value != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

u128 parse_u128(std::string_view text) {
  if (text.empty()) throw DomainError("expected an unsigned integer, got empty text");
  u128 value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw DomainError("expected an unsigned integer, got '" + std::string(text) + "'");
    u128 next;
    if (__builtin_mul_overflow(value, u128{10}, &next) ||
        __builtin_add_overflow(next, static_cast<u128>(c - '0'), &next))
      throw DomainError("integer does not fit 128 bits: " + std::string(text));
    value = next;
  }
  return value;
}

std::uint64_t narrow_u64(u128 value) {
  if (value > static_cast<u128>(UINT64_MAX)) throw RangeError("value exceeds 64 bits: " + to_string(value));
  return static_cast<std::uint64_t>(value);
}

}  // namespace crl
