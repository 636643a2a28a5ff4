#pragma once

// Finite witnesses for progressions whose step lies in a Cantor set: monochromatic progressions in
// colorings, the matching van der Waerden-type numbers, sum-closure of digit-disjoint elements, and
// recurrence counts on integer sets.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crl/cantor.hpp"
#include "crl/intset.hpp"
#include "crl/rational.hpp"

namespace crl {

/// Colors of the positions 1..W, each below `palette`.
class Coloring {
 public:
  Coloring(std::vector<std::uint32_t> colors, std::uint32_t palette);

  /// Symbols of `pattern` become colors in order of first appearance; the pattern repeats to length W.
  static Coloring from_pattern(std::string_view pattern, std::uint64_t length);

  std::uint64_t size() const { return colors_.size(); }
  std::uint32_t palette() const { return palette_; }
  /// Color of position x in [1, W].
  std::uint32_t at(std::uint64_t x) const { return colors_.at(x - 1); }
  const std::vector<std::uint32_t>& colors() const { return colors_; }

 private:
  std::vector<std::uint32_t> colors_;
  std::uint32_t palette_;
};

enum class Direction { Forward, Backward };

/// The points start + s * step (Forward) or start - s * step (Backward) for s < length.
struct ProgressionWitness {
  std::uint64_t start = 0;
  Element step = 0;
  std::uint64_t length = 0;
  std::optional<std::uint32_t> color;
  Direction direction = Direction::Forward;

  std::vector<std::uint64_t> points() const;
};

/// First t-term monochromatic progression with step in K \ {0}, scanning steps k_1, k_2, ... and then
/// starts x = 1, 2, ...; nullopt when none fits in [1, W]. For t = 1 the witness is (1, k_1).
std::optional<ProgressionWitness> find_mono_progression(const Coloring& coloring, std::uint64_t length,
                                                        const DigitSpec& spec);

/// Independent re-check: step in K \ {0}, points in [1, W], all the same color.
bool verify_witness(const Coloring& coloring, const ProgressionWitness& witness, const DigitSpec& spec);

/// Independent re-check: step in K \ {0} and every point in A.
bool verify_witness(const IntSet& set, const ProgressionWitness& witness, const DigitSpec& spec);

struct CvdwResult {
  enum class Status { Found, Unknown, BudgetExceeded };
  Status status = Status::Unknown;
  std::optional<std::uint64_t> value;  // set when Found
  std::uint64_t longest_avoiding = 0;  // longest coloring seen with no monochromatic progression
  std::uint64_t nodes = 0;
  std::optional<Coloring> extremal;    // a longest avoiding coloring
};

inline constexpr std::uint64_t kDefaultNodeBudget = 1'000'000'000;

/// Smallest W <= W_max such that every L-coloring of [1, W] has a monochromatic t-term progression
/// with step in K \ {0}. Depth-first over colorings with position 1 fixed to color 0, pruning a
/// branch at the first monochromatic progression ending at the newest position.
CvdwResult cvdw_number(std::uint64_t length, std::uint32_t palette, const DigitSpec& spec, std::uint64_t max_width,
                       std::uint64_t node_budget = kDefaultNodeBudget);

struct ClosurePart {
  unsigned scale = 0;  // h: the element is b^h * r
  Element value = 0;   // r
};

struct ClosureReport {
  bool certified = false;        // every consecutive block sum lies in K \ {0}
  bool parts_in_set = false;     // every r_j lies in K
  bool scales_disjoint = false;  // each b^{h_j} exceeds the sum of all earlier elements
  std::vector<Element> elements;
  std::optional<std::pair<std::size_t, std::size_t>> failing_block;  // first [j, j'] whose sum is not in K \ {0}

  bool preconditions_hold() const { return parts_in_set && scales_disjoint; }
};

ClosureReport sum_closure_certify(const DigitSpec& spec, std::span<const ClosurePart> parts);

/// E_{x in [1,M]} E_{n < N} prod_{j < ell} 1_A(x -/+ j k_n), exactly. The two directions agree.
Rational density_recurrence_average(const IntSet& set, unsigned ell, const DigitSpec& spec, Index prefix,
                                    Direction direction = Direction::Backward);

struct CensusMember {
  Index n = 0;
  Element step = 0;
  std::uint64_t count = 0;  // number of anchors x giving a progression in A
  ProgressionWitness witness;
};

struct CensusReport {
  Index prefix = 0;
  std::vector<CensusMember> members;
  Rational density;  // |B| / N
};

/// B = {n < N : A contains an ell-term progression with step k_n}, one witness each.
CensusReport step_census(const IntSet& set, unsigned ell, const DigitSpec& spec, Index prefix,
                         Direction direction = Direction::Forward);

}  // namespace crl
