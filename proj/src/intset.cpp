#include "crl/intset.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <string>

namespace crl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw DomainError("bad integer '" + std::string(text) + "' in set expression");
  return out;
}

struct Congruence {
  std::uint64_t modulus;
  std::uint64_t residue;
};

}  // namespace

IntSet::IntSet(std::uint64_t max_value) : max_(max_value) {
  if (max_value > (std::uint64_t{1} << 36)) throw DomainError("set universe too large");
  words_.assign(static_cast<std::size_t>(max_value / 64 + 2), 0);
}

IntSet IntSet::interval(std::uint64_t max_value) {
  IntSet out(max_value);
  for (std::uint64_t y = 1; y <= max_value; ++y) out.insert(y);
  return out;
}

void IntSet::insert(std::uint64_t y) {
  if (y < 1 || y > max_) throw DomainError("set element " + std::to_string(y) + " outside [1, M]");
  words_[y >> 6] |= std::uint64_t{1} << (y & 63);
}

std::uint64_t IntSet::size() const {
  std::uint64_t n = 0;
  for (auto w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

std::vector<std::uint64_t> IntSet::members() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t y = 1; y <= max_; ++y)
    if (contains(y)) out.push_back(y);
  return out;
}

IntSet IntSet::parse(std::string_view text, std::optional<std::uint64_t> bound) {
  text = trim(text);
  const bool expression = text.find_first_of("[Z&") != std::string_view::npos;
  if (!expression) {
    std::vector<std::uint64_t> values;
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',')) ++i;
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != ',') ++j;
      if (j > i) values.push_back(parse_u64(text.substr(i, j - i)));
      i = j;
    }
    std::uint64_t top = bound.value_or(values.empty() ? 0 : *std::max_element(values.begin(), values.end()));
    IntSet out(top);
    for (auto v : values) out.insert(v);
    return out;
  }

  std::uint64_t lo = 1;
  std::optional<std::uint64_t> hi;
  std::vector<Congruence> congruences;
  while (!text.empty()) {
    const auto amp = text.find('&');
    const auto term = trim(text.substr(0, amp));
    text = amp == std::string_view::npos ? std::string_view{} : text.substr(amp + 1);
    if (term.empty()) throw DomainError("empty term in set expression");
    if (term.front() == '[') {
      const auto comma = term.find(',');
      if (term.back() != ']' || comma == std::string_view::npos) throw DomainError("interval must look like [lo,hi]");
      const auto a = parse_u64(term.substr(1, comma - 1));
      const auto b = parse_u64(term.substr(comma + 1, term.size() - comma - 2));
      lo = std::max(lo, a);
      hi = hi ? std::min(*hi, b) : b;
      continue;
    }
    const auto star = term.find('*');
    if (star == std::string_view::npos) throw DomainError("expected q*Z or [lo,hi] in set expression, got '" + std::string(term) + "'");
    const auto modulus = parse_u64(term.substr(0, star));
    auto rest = trim(term.substr(star + 1));
    if (modulus == 0) throw DomainError("q*Z needs q >= 1");
    if (rest.empty() || rest.front() != 'Z') throw DomainError("expected Z after q* in set expression");
    rest = trim(rest.substr(1));
    std::uint64_t residue = 0;
    if (!rest.empty()) {
      if (rest.front() != '+') throw DomainError("expected +r after q*Z");
      residue = parse_u64(rest.substr(1)) % modulus;
    }
    congruences.push_back({modulus, residue});
  }
  if (!hi) throw DomainError("set expression needs an interval [lo,hi] to bound it");
  const std::uint64_t top = bound.value_or(*hi);
  IntSet out(top);
  for (std::uint64_t y = lo; y <= std::min(*hi, top); ++y) {
    bool keep = true;
    for (const auto& c : congruences) keep = keep && y % c.modulus == c.residue;
    if (keep) out.insert(y);
  }
  return out;
}

}  // namespace crl
