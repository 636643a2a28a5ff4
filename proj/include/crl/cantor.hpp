#pragma once

// Integer Cantor sets K_{b,D}: the non-negative integers whose base-b digits all lie in D.
//
// Elements are indexed from 0 in increasing order. When 0 is an admissible digit the index
// n, written in base |D|, maps digit-for-digit through D to the base-b expansion of k_n.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crl/common.hpp"

namespace crl {

class DigitSpec {
 public:
  /// Throws DomainError unless base >= 2, 2 <= |digits| <= base, digits strictly increasing and < base.
  DigitSpec(std::uint32_t base, std::vector<std::uint32_t> digits);

  /// Accepts "b=3;D=0,2" or {"base":3,"digits":[0,2]}.
  static DigitSpec parse(std::string_view text);

  std::uint32_t base() const { return base_; }
  const std::vector<std::uint32_t>& digits() const { return digits_; }
  std::uint32_t radix() const { return static_cast<std::uint32_t>(digits_.size()); }
  bool zero_digit() const { return digits_.front() == 0; }

  /// Position of `digit` in D, or -1.
  int digit_index(std::uint32_t digit) const { return digit < base_ ? lookup_[digit] : -1; }

  std::string to_text() const;

  /// Throws DomainError naming `operation` when 0 is not admissible.
  void require_zero_digit(std::string_view operation) const;

  friend bool operator==(const DigitSpec& a, const DigitSpec& b) {
    return a.base_ == b.base_ && a.digits_ == b.digits_;
  }

 private:
  std::uint32_t base_;
  std::vector<std::uint32_t> digits_;
  std::vector<int> lookup_;
};

/// k_n. Throws RangeError when k_n does not fit 128 bits.
Element unrank(const DigitSpec& spec, Index n);

/// The index n with k_n = m, or nullopt when m is not in the set.
std::optional<Index> rank(const DigitSpec& spec, Element m);

bool contains(const DigitSpec& spec, Element m);

/// Base-b digit sum of k_n, read off the base-|D| digits of n.
std::uint64_t digit_sum(const DigitSpec& spec, Index n);

/// b^e, throwing RangeError past 128 bits.
u128 checked_pow(std::uint64_t base, unsigned exponent);

/// Walks k_n, k_{n+1}, ... in amortised O(1) per step, carrying the base-b digit sum.
class CantorOdometer {
 public:
  CantorOdometer(const DigitSpec& spec, Index start);

  Index index() const { return index_; }
  Element value() const { return value_; }
  std::uint64_t digit_sum() const { return digit_sum_; }

  /// Highest base-|D| position touched by the last advance(); positions below it were reset to 0.
  unsigned carry_depth() const { return carry_depth_; }

  /// Base-|D| digits of the current index (bijective numeration when 0 is not a digit), low first.
  const std::vector<std::uint32_t>& positions() const { return positions_; }

  void advance();

 private:
  void grow();

  const DigitSpec* spec_;
  Index index_;
  Element value_ = 0;
  std::uint64_t digit_sum_ = 0;
  unsigned carry_depth_ = 0;
  std::vector<std::uint32_t> positions_;  // base-|D| digits of the current element, low first
  std::vector<u128> powers_;              // b^c
};

/// Arithmetic progression {start + t*step : 0 <= t < count}.
struct IndexProgression {
  Index start = 0;
  Index step = 1;
  Index count = 0;

  Index last() const { return start + (count - 1) * step; }
  friend bool operator==(const IndexProgression&, const IndexProgression&) = default;
};

struct DeltaKey {
  Element jump = 0;          // k_{n+h} - k_n
  std::int64_t sum_jump = 0;  // s_b(k_{n+h}) - s_b(k_n)

  friend bool operator==(const DeltaKey&, const DeltaKey&) = default;
  friend bool operator<(const DeltaKey& a, const DeltaKey& b) {
    return a.jump != b.jump ? a.jump < b.jump : a.sum_jump < b.sum_jump;
  }
};

struct DeltaEntry {
  std::vector<Index> indices;
  std::vector<IndexProgression> progressions;
};

/// The sets of indices n in [0, N-h) sharing the same element jump and digit-sum jump over gap h,
/// each split into disjoint progressions whose steps are powers of |D|.
struct DeltaStructure {
  Index gap = 1;
  Index prefix = 0;
  std::map<DeltaKey, DeltaEntry> entries;

  const DeltaEntry* find(Element jump, std::int64_t sum_jump) const;
};

/// Requires h >= 1 and N >= h.
DeltaStructure delta_star(const DigitSpec& spec, Index gap, Index prefix);

/// Splits a sorted index list into disjoint progressions with steps |D|^i.
///
/// Greedy: the smallest uncovered index starts a run; every power step up to the window is tried
/// and the longest run wins. Ties go to a run that reaches the window edge, then to the smaller step.
std::vector<IndexProgression> decompose_progressions(const std::vector<Index>& sorted, std::uint32_t radix,
                                                     Index window);

/// Checks k_{|D|^i n + j} = b^i k_n + k_j and the matching digit-sum identity.
/// Throws DomainError unless j < |D|^i.
bool self_similarity_check(const DigitSpec& spec, unsigned i, Index n, Index j);

}  // namespace crl
