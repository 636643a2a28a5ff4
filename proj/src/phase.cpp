#include "crl/phase.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace crl {

namespace {

constexpr double kSqrt2Hi = 1.4142135623730951;
constexpr double kSqrt2Lo = -9.667293313452913e-17;
constexpr double kGoldenHi = 1.618033988749895;
constexpr double kGoldenLo = -5.432115203682506e-17;

// Low `bits` bits of the 256-bit value (hi:lo), scaled by 2^-bits.
double low_bits_scaled(u128 hi, u128 lo, int bits) {
  if (bits < 128) {
    lo &= (static_cast<u128>(1) << bits) - 1;
    return std::ldexp(static_cast<double>(lo), -bits);
  }
  if (bits < 256) {
    if (bits > 128) hi &= (static_cast<u128>(1) << (bits - 128)) - 1;
    else hi = 0;
  }
  return std::ldexp(static_cast<double>(hi), 128 - bits) + std::ldexp(static_cast<double>(lo), -bits);
}

std::int64_t parse_i64(std::string_view text) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw DomainError("bad integer '" + std::string(text) + "'");
  return out;
}

}  // namespace

double frac_product(double a, u128 k) {
  if (a == 0.0 || k == 0) return 0.0;
  if (!std::isfinite(a)) throw DomainError("non-finite frequency");
  int exponent = 0;
  const double mantissa = std::frexp(std::fabs(a), &exponent);
  const auto m = static_cast<std::uint64_t>(std::ldexp(mantissa, 53));
  const int shift = 53 - exponent;  // |a| = m * 2^-shift
  if (shift <= 0) return 0.0;
  // 256-bit product m * k = hi * 2^128 + lo.
  const u128 k_lo = static_cast<std::uint64_t>(k);
  const u128 k_hi = k >> 64;
  const u128 p0 = k_lo * m;
  const u128 p1 = k_hi * m;
  const u128 lo = p0 + (p1 << 64);
  const u128 carry = lo < p0 ? 1 : 0;
  const u128 hi = (p1 >> 64) + carry;
  double r = low_bits_scaled(hi, lo, shift);
  if (r >= 1.0) r = 0.0;
  if (a < 0.0 && r != 0.0) r = 1.0 - r;
  return r;
}

Frequency Frequency::rational(std::int64_t p, std::uint64_t q) {
  if (q == 0) throw DomainError("rational frequency needs q >= 1");
  Frequency f;
  f.rational_ = true;
  const auto qi = static_cast<__int128>(q);
  auto reduced = static_cast<__int128>(p) % qi;
  if (reduced < 0) reduced += qi;
  const auto g = std::gcd(static_cast<std::uint64_t>(reduced), q);
  f.p_ = static_cast<std::int64_t>(static_cast<std::uint64_t>(reduced) / g);
  f.q_ = q / g;
  return f;
}

Frequency Frequency::real(double hi, double lo) {
  if (!std::isfinite(hi) || !std::isfinite(lo)) throw DomainError("non-finite frequency");
  Frequency f;
  f.rational_ = false;
  f.hi_ = hi;
  f.lo_ = lo;
  return f;
}

Frequency Frequency::parse(std::string_view text) {
  if (text == "sqrt2") return real(kSqrt2Hi, kSqrt2Lo);
  if (text == "golden") return real(kGoldenHi, kGoldenLo);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto p = parse_i64(text.substr(0, slash));
    const auto q = parse_i64(text.substr(slash + 1));
    if (q <= 0) throw DomainError("rational frequency needs a positive denominator");
    return rational(p, static_cast<std::uint64_t>(q));
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw DomainError("bad frequency '" + std::string(text) + "' (expected p/q, a decimal, sqrt2 or golden)");
  return real(value);
}

double Frequency::approx() const {
  if (rational_) return static_cast<double>(p_) / static_cast<double>(q_);
  return hi_ + lo_;
}

double Frequency::turns(u128 k) const {
  if (rational_) {
    const u128 r = (static_cast<u128>(static_cast<std::uint64_t>(p_)) * (k % q_)) % q_;
    return static_cast<double>(static_cast<std::uint64_t>(r)) / static_cast<double>(q_);
  }
  double t = frac_product(hi_, k) + frac_product(lo_, k);
  if (t >= 1.0) t -= 1.0;
  return t;
}

Frequency Frequency::scaled(std::int64_t m) const {
  if (!rational_) throw DomainError("scaled() is exact only for rational frequencies");
  const auto q = static_cast<__int128>(q_);
  auto mm = static_cast<__int128>(m) % q;
  return rational(static_cast<std::int64_t>((mm * p_) % q), q_);
}

bool Frequency::is_zero() const {
  if (rational_) return p_ == 0;
  return hi_ + lo_ == 0.0 || (lo_ == 0.0 && hi_ == std::floor(hi_));
}

std::string Frequency::to_text() const {
  if (rational_) return std::to_string(p_) + "/" + std::to_string(q_);
  if (hi_ == kSqrt2Hi && lo_ == kSqrt2Lo) return "sqrt2";
  if (hi_ == kGoldenHi && lo_ == kGoldenLo) return "golden";
  std::ostringstream os;
  os.precision(17);
  os << hi_ + lo_;
  return os.str();
}

}  // namespace crl
