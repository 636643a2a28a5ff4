#include "crl/cantor.hpp"

#include <algorithm>
#include <charconv>
#include <nlohmann/json.hpp>

namespace crl {

namespace {

std::uint32_t parse_u32(std::string_view text) {
  std::uint32_t out = 0;
  auto first = text.data();
  auto last = text.data() + text.size();
  while (first != last && *first == ' ') ++first;
  while (last != first && last[-1] == ' ') --last;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || first == last)
    throw DomainError("bad integer in digit spec: '" + std::string(text) + "'");
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

// Lengths and offsets of the bijective numeration used when 0 is not a digit:
// the elements with exactly L base-b digits occupy indices [sum_{l<L} |D|^l, sum_{l<=L} |D|^l).
struct LengthBlock {
  unsigned length;
  u128 offset;  // index of the smallest L-digit element
};

LengthBlock locate_length(std::uint32_t radix, Index n) {
  u128 offset = 0;
  u128 block = radix;
  unsigned length = 1;
  while (static_cast<u128>(n) >= offset + block) {
    offset += block;
    block *= radix;
    ++length;
  }
  return {length, offset};
}

}  // namespace

DigitSpec::DigitSpec(std::uint32_t base, std::vector<std::uint32_t> digits)
    : base_(base), digits_(std::move(digits)) {
  if (base_ < 2) throw DomainError("base must be at least 2");
  if (digits_.size() < 2) throw DomainError("digit set needs at least two digits");
  if (digits_.size() > base_) throw DomainError("more digits than the base allows");
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (digits_[i] >= base_) throw DomainError("digit " + std::to_string(digits_[i]) + " is not below the base");
    if (i > 0 && digits_[i] <= digits_[i - 1]) throw DomainError("digits must be strictly increasing");
  }
  lookup_.assign(base_, -1);
  for (std::size_t i = 0; i < digits_.size(); ++i) lookup_[digits_[i]] = static_cast<int>(i);
}

DigitSpec DigitSpec::parse(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
      return DigitSpec(j.at("base").get<std::uint32_t>(), j.at("digits").get<std::vector<std::uint32_t>>());
    } catch (const nlohmann::json::exception& e) {
      throw DomainError(std::string("bad JSON digit spec: ") + e.what());
    }
  }
  std::optional<std::uint32_t> base;
  std::vector<std::uint32_t> digits;
  bool saw_digits = false;
  while (!text.empty()) {
    auto cut = text.find(';');
    auto field = trim(text.substr(0, cut));
    text = cut == std::string_view::npos ? std::string_view{} : text.substr(cut + 1);
    if (field.empty()) continue;
    auto eq = field.find('=');
    if (eq == std::string_view::npos) throw DomainError("expected key=value in digit spec: '" + std::string(field) + "'");
    auto key = trim(field.substr(0, eq));
    auto value = trim(field.substr(eq + 1));
    if (key == "b") {
      base = parse_u32(value);
    } else if (key == "D") {
      saw_digits = true;
      while (!value.empty()) {
        auto comma = value.find(',');
        digits.push_back(parse_u32(value.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        value = value.substr(comma + 1);
      }
    } else {
      throw DomainError("unknown digit spec key '" + std::string(key) + "'");
    }
  }
  if (!base || !saw_digits) throw DomainError("digit spec needs both b= and D=");
  return DigitSpec(*base, std::move(digits));
}

std::string DigitSpec::to_text() const {
  std::string out = "b=" + std::to_string(base_) + ";D=";
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(digits_[i]);
  }
  return out;
}

void DigitSpec::require_zero_digit(std::string_view operation) const {
  if (!zero_digit())
    throw DomainError(std::string(operation) + " requires 0 to be an admissible digit (spec " + to_text() + ")");
}

u128 checked_pow(std::uint64_t base, unsigned exponent) {
  u128 out = 1;
  for (unsigned e = 0; e < exponent; ++e) out = checked_mul(out, base);
  return out;
}

Element unrank(const DigitSpec& spec, Index n) {
  const auto radix = spec.radix();
  const auto& digits = spec.digits();
  Element value = 0;
  u128 power = 1;
  auto place = [&](std::uint32_t idx, bool more) {
    value = checked_add(value, checked_mul(digits[idx], power));
    if (more) power = checked_mul(power, spec.base());
  };
  if (spec.zero_digit()) {
    while (n != 0) {
      place(static_cast<std::uint32_t>(n % radix), n >= radix);
      n /= radix;
    }
    return value;
  }
  auto [length, offset] = locate_length(radix, n);
  u128 rest = static_cast<u128>(n) - offset;
  for (unsigned c = 0; c < length; ++c) {
    place(static_cast<std::uint32_t>(rest % radix), c + 1 < length);
    rest /= radix;
  }
  return value;
}

std::optional<Index> rank(const DigitSpec& spec, Element m) {
  const auto radix = spec.radix();
  if (!spec.zero_digit() && m == 0) return std::nullopt;
  u128 n = 0;
  u128 weight = 1;
  unsigned length = 0;
  bool weight_overflow = false;
  while (true) {
    int idx = spec.digit_index(static_cast<std::uint32_t>(m % spec.base()));
    if (idx < 0) return std::nullopt;
    if (idx != 0 && weight_overflow) throw RangeError("index of " + to_string(m) + " exceeds 128 bits");
    if (idx != 0) n = checked_add(n, checked_mul(static_cast<u128>(idx), weight));
    ++length;
    m /= spec.base();
    if (m == 0) break;
    if (__builtin_mul_overflow(weight, static_cast<u128>(radix), &weight)) weight_overflow = true;
  }
  if (!spec.zero_digit()) {
    u128 block = radix;
    for (unsigned l = 1; l < length; ++l) {
      n = checked_add(n, block);
      if (l + 1 < length) block = checked_mul(block, radix);
    }
  }
  return narrow_u64(n);
}

bool contains(const DigitSpec& spec, Element m) {
  if (!spec.zero_digit() && m == 0) return false;
  do {
    if (spec.digit_index(static_cast<std::uint32_t>(m % spec.base())) < 0) return false;
    m /= spec.base();
  } while (m != 0);
  return true;
}

std::uint64_t digit_sum(const DigitSpec& spec, Index n) {
  const auto radix = spec.radix();
  const auto& digits = spec.digits();
  std::uint64_t sum = 0;
  if (spec.zero_digit()) {
    for (; n != 0; n /= radix) sum += digits[n % radix];
    return sum;
  }
  auto [length, offset] = locate_length(radix, n);
  u128 rest = static_cast<u128>(n) - offset;
  for (unsigned c = 0; c < length; ++c, rest /= radix) sum += digits[static_cast<std::size_t>(rest % radix)];
  return sum;
}

// ---------------------------------------------------------------------------------------------

CantorOdometer::CantorOdometer(const DigitSpec& spec, Index start) : spec_(&spec), index_(start) {
  const auto radix = spec.radix();
  if (spec.zero_digit()) {
    for (Index n = start; n != 0; n /= radix) positions_.push_back(static_cast<std::uint32_t>(n % radix));
  } else {
    auto [length, offset] = locate_length(radix, start);
    u128 rest = static_cast<u128>(start) - offset;
    for (unsigned c = 0; c < length; ++c, rest /= radix) positions_.push_back(static_cast<std::uint32_t>(rest % radix));
  }
  powers_.push_back(1);
  for (std::size_t c = 1; c < positions_.size(); ++c) powers_.push_back(checked_mul(powers_.back(), spec.base()));
  for (std::size_t c = 0; c < positions_.size(); ++c) {
    value_ = checked_add(value_, checked_mul(spec.digits()[positions_[c]], powers_[c]));
    digit_sum_ += spec.digits()[positions_[c]];
  }
}

void CantorOdometer::grow() {
  if (powers_.size() <= positions_.size())
    powers_.push_back(checked_mul(powers_.back(), spec_->base()));
  positions_.push_back(spec_->zero_digit() ? 1u : 0u);
}

void CantorOdometer::advance() {
  const auto& digits = spec_->digits();
  const auto top = spec_->radix() - 1;
  const Element before = value_;
  unsigned c = 0;
  while (c < positions_.size() && positions_[c] == top) {
    value_ -= static_cast<u128>(digits[top] - digits[0]) * powers_[c];
    digit_sum_ -= digits[top] - digits[0];
    positions_[c] = 0;
    ++c;
  }
  if (c == positions_.size()) {
    if (positions_.size() >= 128) throw RangeError("Cantor element exceeds 128 bits");
    grow();
    value_ += static_cast<u128>(digits[positions_[c]]) * powers_[c];
    digit_sum_ += digits[positions_[c]];
  } else {
    value_ += static_cast<u128>(digits[positions_[c] + 1] - digits[positions_[c]]) * powers_[c];
    digit_sum_ += digits[positions_[c] + 1] - digits[positions_[c]];
    ++positions_[c];
  }
  carry_depth_ = c;
  if (value_ <= before) throw RangeError("Cantor element exceeds 128 bits");
  ++index_;
}

// ---------------------------------------------------------------------------------------------

const DeltaEntry* DeltaStructure::find(Element jump, std::int64_t sum_jump) const {
  auto it = entries.find(DeltaKey{jump, sum_jump});
  return it == entries.end() ? nullptr : &it->second;
}

std::vector<IndexProgression> decompose_progressions(const std::vector<Index>& sorted, std::uint32_t radix,
                                                     Index window) {
  std::vector<IndexProgression> out;
  std::vector<bool> used(sorted.size(), false);
  auto position_of = [&](Index value) -> std::ptrdiff_t {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
    if (it == sorted.end() || *it != value) return -1;
    auto pos = it - sorted.begin();
    return used[static_cast<std::size_t>(pos)] ? -1 : pos;
  };
  for (std::size_t head = 0; head < sorted.size(); ++head) {
    if (used[head]) continue;
    const Index start = sorted[head];
    IndexProgression best{start, 1, 1};
    bool best_reaches_edge = false;
    for (Index step = 1;; step *= radix) {
      Index count = 1;
      Index next = start + step;
      while (next < window && position_of(next) >= 0) {
        ++count;
        next += step;
      }
      const bool reaches_edge = next >= window;
      if (count > best.count || (count == best.count && reaches_edge && !best_reaches_edge)) {
        best = {start, step, count};
        best_reaches_edge = reaches_edge;
      }
      if (start + step >= window || step > window / radix) break;
    }
    for (Index t = 0; t < best.count; ++t) used[static_cast<std::size_t>(position_of(start + t * best.step))] = true;
    out.push_back(best);
  }
  return out;
}

DeltaStructure delta_star(const DigitSpec& spec, Index gap, Index prefix) {
  if (gap < 1) throw DomainError("delta_star needs h >= 1");
  if (prefix < gap) throw DomainError("delta_star needs N >= h");
  DeltaStructure out;
  out.gap = gap;
  out.prefix = prefix;
  const Index window = prefix - gap;
  if (window == 0) return out;
  CantorOdometer lo(spec, 0);
  CantorOdometer hi(spec, gap);
  for (Index n = 0; n < window; ++n) {
    DeltaKey key{hi.value() - lo.value(),
                 static_cast<std::int64_t>(hi.digit_sum()) - static_cast<std::int64_t>(lo.digit_sum())};
    out.entries[key].indices.push_back(n);
    if (n + 1 < window) {
      lo.advance();
      hi.advance();
    }
  }
  for (auto& [key, entry] : out.entries)
    entry.progressions = decompose_progressions(entry.indices, spec.radix(), window);
  return out;
}

bool self_similarity_check(const DigitSpec& spec, unsigned i, Index n, Index j) {
  const u128 block = checked_pow(spec.radix(), i);
  if (static_cast<u128>(j) >= block) throw DomainError("self-similarity check needs j < |D|^i");
  const Index combined = narrow_u64(checked_add(checked_mul(block, n), j));
  const Element lhs = unrank(spec, combined);
  const Element rhs = checked_add(checked_mul(checked_pow(spec.base(), i), unrank(spec, n)), unrank(spec, j));
  return lhs == rhs && digit_sum(spec, combined) == digit_sum(spec, n) + digit_sum(spec, j);
}

}  // namespace crl
