#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crl/common.hpp"

namespace crl {

/// A subset of [1, M] stored as a bitset; bit y is element y (bit 0 is always clear).
class IntSet {
 public:
  explicit IntSet(std::uint64_t max_value);

  /// Either an expression of '&'-joined terms "q*Z", "q*Z+r" and "[lo,hi]" (at least one interval,
  /// whose upper bounds fix M), or whitespace-separated integers (M is `bound` if given, else the maximum).
  static IntSet parse(std::string_view text, std::optional<std::uint64_t> bound = std::nullopt);

  static IntSet interval(std::uint64_t max_value);

  std::uint64_t max_value() const { return max_; }
  bool contains(std::uint64_t y) const { return y >= 1 && y <= max_ && ((words_[y >> 6] >> (y & 63)) & 1u); }
  void insert(std::uint64_t y);
  std::uint64_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<std::uint64_t> members() const;

  std::span<const std::uint64_t> words() const { return words_; }

 private:
  std::uint64_t max_;
  std::vector<std::uint64_t> words_;
};

}  // namespace crl
