#include "crl/ramsey.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "crl/kernels.hpp"

namespace crl {

namespace {

std::uint64_t fetch_bits(std::span<const std::uint64_t> words, std::uint64_t bit) {
  const std::uint64_t q = bit >> 6;
  const unsigned r = static_cast<unsigned>(bit & 63);
  const std::uint64_t lo = q < words.size() ? words[q] : 0;
  if (r == 0) return lo;
  const std::uint64_t hi = q + 1 < words.size() ? words[q + 1] : 0;
  return (lo >> r) | (hi << (64 - r));
}

// Offsets {0, k, ..., (ell-1)k}, or nullopt when the progression cannot fit below `limit`.
std::optional<std::vector<std::uint64_t>> progression_offsets(unsigned ell, Element k, std::uint64_t limit) {
  std::vector<std::uint64_t> offsets(ell);
  for (unsigned j = 0; j < ell; ++j) {
    const u128 off = static_cast<u128>(j) * k;
    if (off > limit) return std::nullopt;
    offsets[j] = static_cast<std::uint64_t>(off);
  }
  return offsets;
}

}  // namespace

Coloring::Coloring(std::vector<std::uint32_t> colors, std::uint32_t palette)
    : colors_(std::move(colors)), palette_(palette) {
  if (palette_ < 1) throw DomainError("a coloring needs at least one color");
  for (auto c : colors_)
    if (c >= palette_) throw DomainError("color value outside the palette");
}

Coloring Coloring::from_pattern(std::string_view pattern, std::uint64_t length) {
  if (pattern.empty()) throw DomainError("empty coloring pattern");
  std::map<char, std::uint32_t> symbols;
  std::vector<std::uint32_t> base;
  for (char ch : pattern) {
    if (ch == ',' || ch == ' ') continue;
    auto [it, fresh] = symbols.emplace(ch, static_cast<std::uint32_t>(symbols.size()));
    base.push_back(it->second);
  }
  if (base.empty()) throw DomainError("empty coloring pattern");
  if (length == 0) length = base.size();
  std::vector<std::uint32_t> colors(length);
  for (std::uint64_t i = 0; i < length; ++i) colors[i] = base[i % base.size()];
  return Coloring(std::move(colors), static_cast<std::uint32_t>(symbols.size()));
}

std::vector<std::uint64_t> ProgressionWitness::points() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 0; s < length; ++s) {
    const u128 delta = static_cast<u128>(s) * step;
    out.push_back(direction == Direction::Forward ? static_cast<std::uint64_t>(start + delta)
                                                  : static_cast<std::uint64_t>(start - delta));
  }
  return out;
}

std::optional<ProgressionWitness> find_mono_progression(const Coloring& coloring, std::uint64_t length,
                                                        const DigitSpec& spec) {
  spec.require_zero_digit("monochromatic progression search");
  if (length < 1) throw DomainError("progression length must be at least 1");
  const std::uint64_t width = coloring.size();
  if (width < 1) return std::nullopt;
  if (length == 1) return ProgressionWitness{1, unrank(spec, 1), 1, coloring.at(1), Direction::Forward};
  CantorOdometer odo(spec, 1);
  while (true) {
    const Element r = odo.value();
    const u128 reach = static_cast<u128>(length - 1) * r;
    if (reach + 1 > width) return std::nullopt;
    const auto span = static_cast<std::uint64_t>(reach);
    for (std::uint64_t x = 1; x + span <= width; ++x) {
      const auto c = coloring.at(x);
      bool mono = true;
      for (std::uint64_t s = 1; s < length && mono; ++s)
        mono = coloring.at(x + static_cast<std::uint64_t>(s * r)) == c;
      if (mono) return ProgressionWitness{x, r, length, c, Direction::Forward};
    }
    odo.advance();
  }
}

bool verify_witness(const Coloring& coloring, const ProgressionWitness& witness, const DigitSpec& spec) {
  if (witness.step == 0 || !contains(spec, witness.step) || witness.length < 1) return false;
  const auto pts = witness.points();
  for (auto x : pts)
    if (x < 1 || x > coloring.size()) return false;
  // guard against wrap-around in points()
  const u128 reach = static_cast<u128>(witness.length - 1) * witness.step;
  if (reach >= coloring.size()) return witness.length == 1 && reach == 0 ? true : false;
  const auto c = coloring.at(pts.front());
  if (witness.color && *witness.color != c) return false;
  return std::all_of(pts.begin(), pts.end(), [&](auto x) { return coloring.at(x) == c; });
}

bool verify_witness(const IntSet& set, const ProgressionWitness& witness, const DigitSpec& spec) {
  if (witness.step == 0 && witness.length > 1) {
    // k_0 = 0 gives the degenerate progression x, x, ..., x
  } else if (!contains(spec, witness.step)) {
    return false;
  }
  const u128 reach = static_cast<u128>(witness.length == 0 ? 0 : witness.length - 1) * witness.step;
  if (reach > set.max_value()) return false;
  const auto pts = witness.points();
  return !pts.empty() && std::all_of(pts.begin(), pts.end(), [&](auto y) { return set.contains(y); });
}

CvdwResult cvdw_number(std::uint64_t length, std::uint32_t palette, const DigitSpec& spec, std::uint64_t max_width,
                       std::uint64_t node_budget) {
  spec.require_zero_digit("Cantor van der Waerden numbers");
  if (length < 1) throw DomainError("progression length must be at least 1");
  if (palette < 1) throw DomainError("need at least one color");
  CvdwResult out;
  if (length == 1) {
    if (max_width >= 1) {
      out.status = CvdwResult::Status::Found;
      out.value = 1;
    }
    return out;
  }

  std::vector<std::uint64_t> steps;
  for (CantorOdometer odo(spec, 1);; odo.advance()) {
    const u128 reach = static_cast<u128>(length - 1) * odo.value();
    if (reach >= max_width) break;
    steps.push_back(static_cast<std::uint64_t>(odo.value()));
  }

  const std::size_t words = static_cast<std::size_t>(max_width / 64 + 2);
  std::vector<std::vector<std::uint64_t>> masks(palette, std::vector<std::uint64_t>(words, 0));
  std::vector<std::uint32_t> color(max_width + 2, 0);
  std::vector<std::uint32_t> next(max_width + 2, 0);
  auto has = [&](std::uint32_t c, std::uint64_t x) { return (masks[c][x >> 6] >> (x & 63)) & 1u; };
  auto violates = [&](std::uint64_t p, std::uint32_t c) {
    for (auto r : steps) {
      const std::uint64_t reach = (length - 1) * r;
      if (reach >= p) break;
      bool mono = true;
      for (std::uint64_t s = 1; s < length && mono; ++s) mono = has(c, p - s * r);
      if (mono) return true;
    }
    return false;
  };

  std::uint64_t depth = 0;
  next[1] = 0;
  while (true) {
    const std::uint64_t p = depth + 1;
    if (p > max_width) {
      out.status = CvdwResult::Status::Unknown;
      break;
    }
    const std::uint32_t limit = p == 1 ? 1 : palette;
    if (next[p] >= limit) {
      if (depth == 0) {
        out.status = CvdwResult::Status::Found;
        out.value = out.longest_avoiding + 1;
        break;
      }
      masks[color[depth]][depth >> 6] &= ~(std::uint64_t{1} << (depth & 63));
      ++next[depth];
      --depth;
      continue;
    }
    if (++out.nodes > node_budget) {
      out.status = CvdwResult::Status::BudgetExceeded;
      break;
    }
    const std::uint32_t c = next[p];
    if (violates(p, c)) {
      ++next[p];
      continue;
    }
    color[p] = c;
    masks[c][p >> 6] |= std::uint64_t{1} << (p & 63);
    depth = p;
    next[p + 1] = 0;
    if (depth > out.longest_avoiding) {
      out.longest_avoiding = depth;
      out.extremal = Coloring(std::vector<std::uint32_t>(color.begin() + 1, color.begin() + 1 + depth), palette);
    }
  }
  return out;
}

ClosureReport sum_closure_certify(const DigitSpec& spec, std::span<const ClosurePart> parts) {
  if (parts.empty()) throw DomainError("sum closure needs at least one part");
  ClosureReport out;
  out.parts_in_set = true;
  out.scales_disjoint = true;
  Element running = 0;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const auto& part = parts[j];
    if (!contains(spec, part.value)) out.parts_in_set = false;
    const u128 scale = checked_pow(spec.base(), part.scale);
    if (j > 0 && (part.scale <= parts[j - 1].scale || scale <= running)) out.scales_disjoint = false;
    out.elements.push_back(checked_mul(scale, part.value));
    running = checked_add(running, out.elements.back());
  }
  out.certified = true;
  for (std::size_t j = 0; j < out.elements.size() && out.certified; ++j) {
    Element sum = 0;
    for (std::size_t k = j; k < out.elements.size(); ++k) {
      sum = checked_add(sum, out.elements[k]);
      if (sum == 0 || !contains(spec, sum)) {
        out.certified = false;
        out.failing_block = std::make_pair(j, k);
        break;
      }
    }
  }
  return out;
}

Rational density_recurrence_average(const IntSet& set, unsigned ell, const DigitSpec& spec, Index prefix,
                                    Direction /*direction*/) {
  spec.require_zero_digit("density recurrence averages");
  if (ell < 1) throw DomainError("ell must be at least 1");
  if (prefix < 1) throw DomainError("N must be at least 1");
  const std::uint64_t top = set.max_value();
  if (top < 1) throw DomainError("the ambient interval [1, M] is empty");
  // Anchors x in [1, M]; the count of x with x - j k in A for all j equals the count of y with y + j k in A.
  u128 total = 0;
  CantorOdometer odo(spec, 0);
  for (Index n = 0; n < prefix; ++n) {
    const auto offsets = progression_offsets(ell, odo.value(), top);
    if (!offsets) break;  // k_n only grows
    total += kernels::and_popcount(set.words(), *offsets, top + 1);
    if (n + 1 < prefix) odo.advance();
  }
  return Rational(boost::multiprecision::cpp_int(to_string(total))) / (Rational(top) * Rational(prefix));
}

CensusReport step_census(const IntSet& set, unsigned ell, const DigitSpec& spec, Index prefix, Direction direction) {
  spec.require_zero_digit("step census");
  if (ell < 1) throw DomainError("ell must be at least 1");
  if (prefix < 1) throw DomainError("N must be at least 1");
  CensusReport out;
  out.prefix = prefix;
  const std::uint64_t top = set.max_value();
  CantorOdometer odo(spec, 0);
  for (Index n = 0; n < prefix; ++n) {
    const Element k = odo.value();
    const auto offsets = progression_offsets(ell, k, top);
    if (!offsets) break;
    const std::uint64_t count = kernels::and_popcount(set.words(), *offsets, top + 1);
    if (count > 0) {
      std::uint64_t first = 0;
      for (std::uint64_t base = 0; base <= top; base += 64) {
        std::uint64_t acc = ~std::uint64_t{0};
        for (auto off : *offsets) acc &= fetch_bits(set.words(), base + off);
        if (acc) {
          first = base + static_cast<std::uint64_t>(std::countr_zero(acc));
          break;
        }
      }
      ProgressionWitness w{first, k, ell, std::nullopt, Direction::Forward};
      if (direction == Direction::Backward) {
        w.start = first + offsets->back();
        w.direction = Direction::Backward;
      }
      out.members.push_back({n, k, count, w});
    }
    if (n + 1 < prefix) odo.advance();
  }
  out.density = Rational(out.members.size()) / Rational(prefix);
  return out;
}

}  // namespace crl
