#include "crl/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "crl/kernels.hpp"
#include "crl/parallel.hpp"

namespace crl {

namespace {

constexpr Index kChunk = Index{1} << 14;

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) comp += (sum - t) + x;
    else comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// k_n mod q tracked digit by digit alongside an odometer.
class ResidueWalker {
 public:
  ResidueWalker(const DigitSpec& spec, std::uint64_t modulus, Index start)
      : spec_(spec), odometer_(spec, start), modulus_(modulus) {
    const auto& pos = odometer_.positions();
    for (std::size_t c = 0; c < pos.size(); ++c) {
      contrib_.push_back(term(c, pos[c]));
      residue_ = add(residue_, contrib_.back());
    }
  }

  std::uint64_t residue() const { return residue_; }

  void advance() {
    odometer_.advance();
    const auto& pos = odometer_.positions();
    const unsigned depth = odometer_.carry_depth();
    for (unsigned c = 0; c <= depth; ++c) {
      const std::uint64_t fresh = term(c, pos[c]);
      if (c == contrib_.size()) contrib_.push_back(0);
      residue_ = add(residue_, modulus_ - contrib_[c]);
      residue_ = add(residue_, fresh);
      contrib_[c] = fresh;
    }
  }

 private:
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    const u128 s = static_cast<u128>(a) + b;
    return static_cast<std::uint64_t>(s % modulus_);
  }

  std::uint64_t weight(std::size_t c) {
    if (weights_.empty()) weights_.push_back(1 % modulus_);
    while (weights_.size() <= c)
      weights_.push_back(static_cast<std::uint64_t>(static_cast<u128>(weights_.back()) * spec_.base() % modulus_));
    return weights_[c];
  }

  std::uint64_t term(std::size_t c, std::uint32_t position) {
    return static_cast<std::uint64_t>(static_cast<u128>(spec_.digits()[position]) * weight(c) % modulus_);
  }

  const DigitSpec& spec_;
  CantorOdometer odometer_;
  std::uint64_t modulus_;
  std::uint64_t residue_ = 0;
  std::vector<std::uint64_t> contrib_;
  std::vector<std::uint64_t> weights_;
};

std::size_t chunk_count(Index first, Index last) { return static_cast<std::size_t>((last - first + kChunk - 1) / kChunk); }

// Fills out[i] = frac(alpha * multiplier * k_{first+i}).
void fill_turns(const DigitSpec& spec, const Frequency& alpha, Index first, Index last, u128 multiplier,
                std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(last - first));
  CantorOdometer odo(spec, first);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Element k = odo.value();
    out[i] = alpha.turns(multiplier == 1 ? k : checked_mul(multiplier, k));
    if (i + 1 < out.size()) odo.advance();
  }
}

}  // namespace

Rational ResidueDistribution::frequency(std::uint64_t residue) const {
  return Rational(counts.at(residue)) / Rational(size());
}

double ResidueDistribution::frequency_approx(std::uint64_t residue) const {
  return static_cast<double>(counts.at(residue)) / static_cast<double>(size());
}

ResidueDistribution residue_window(const DigitSpec& spec, std::uint64_t modulus, Index first, Index last) {
  if (modulus < 1) throw DomainError("residue distribution needs q >= 1");
  if (first >= last) throw DomainError("residue distribution needs a non-empty window");
  ResidueDistribution out;
  out.modulus = modulus;
  out.first = first;
  out.last = last;
  if (modulus > (std::uint64_t{1} << 26)) throw DomainError("modulus too large for a dense residue table");
  const std::size_t chunks = chunk_count(first, last);
  std::vector<std::vector<std::uint64_t>> partial(chunks);
  parallel_chunks(chunks, [&](std::size_t c) {
    const Index lo = first + c * kChunk;
    const Index hi = std::min(last, lo + kChunk);
    auto& counts = partial[c];
    counts.assign(modulus, 0);
    ResidueWalker walker(spec, modulus, lo);
    for (Index n = lo; n < hi; ++n) {
      ++counts[walker.residue()];
      if (n + 1 < hi) walker.advance();
    }
  });
  out.counts.assign(modulus, 0);
  for (const auto& counts : partial)
    for (std::uint64_t a = 0; a < modulus; ++a) out.counts[a] += counts[a];
  return out;
}

ResidueDistribution residue_distribution(const DigitSpec& spec, std::uint64_t modulus, Index prefix) {
  return residue_window(spec, modulus, 0, prefix);
}

std::complex<double> residue_fourier(const ResidueDistribution& dist, std::int64_t p) {
  const auto q = dist.modulus;
  const auto base = Frequency::rational(p, q);
  Neumaier re, im;
  for (std::uint64_t a = 0; a < q; ++a) {
    if (dist.counts[a] == 0) continue;
    const double y = base.turns(a);
    const double angle = 2.0 * std::numbers::pi * (y - std::nearbyint(y));
    const double weight = dist.frequency_approx(a);
    re.add(weight * std::cos(angle));
    im.add(weight * std::sin(angle));
  }
  return {re.value(), im.value()};
}

std::complex<double> weyl_partial_sum(const DigitSpec& spec, const Frequency& alpha, Index first, Index last,
                                      u128 multiplier) {
  if (first >= last) return {0.0, 0.0};
  const std::size_t chunks = chunk_count(first, last);
  std::vector<kernels::PhaseSum> partial(chunks);
  parallel_chunks(chunks, [&](std::size_t c) {
    const Index lo = first + c * kChunk;
    const Index hi = std::min(last, lo + kChunk);
    std::vector<double> turns;
    fill_turns(spec, alpha, lo, hi, multiplier, turns);
    partial[c] = kernels::phase_sum(turns);
  });
  Neumaier re, im;
  for (const auto& p : partial) {
    re.add(p.re);
    im.add(p.im);
  }
  return {re.value(), im.value()};
}

std::complex<double> weyl_mean(const DigitSpec& spec, const Frequency& alpha, Index first, Index last,
                               std::int64_t multiplier) {
  if (first >= last) throw DomainError("Weyl mean needs a non-empty window");
  if (multiplier == 0) return {1.0, 0.0};
  const auto magnitude = static_cast<std::uint64_t>(multiplier < 0 ? -static_cast<__int128>(multiplier) : multiplier);
  std::complex<double> sum;
  if (alpha.is_rational()) {
    sum = weyl_partial_sum(spec, alpha.scaled(static_cast<std::int64_t>(magnitude)), first, last, 1);
  } else {
    sum = weyl_partial_sum(spec, alpha, first, last, magnitude);
  }
  sum /= static_cast<double>(last - first);
  return multiplier < 0 ? std::conj(sum) : sum;
}

WeylSumResult weyl_sum(const DigitSpec& spec, const Frequency& alpha, Index prefix) {
  if (prefix < 1) throw DomainError("Weyl sum needs N >= 1");
  WeylSumResult out;
  out.alpha = alpha;
  out.prefix = prefix;
  out.value = weyl_partial_sum(spec, alpha, 0, prefix) / static_cast<double>(prefix);
  out.modulus = std::abs(out.value);
  return out;
}

std::complex<double> spectral_coefficient(const DigitSpec& spec, std::int64_t p, std::uint64_t q, Index prefix) {
  if (q < 1) throw DomainError("spectral coefficient needs q >= 1");
  return weyl_sum(spec, Frequency::rational(p, q), prefix).value;
}

SpectralProfile spectral_profile(const DigitSpec& spec, std::uint64_t max_q, Index prefix) {
  if (max_q < 1) throw DomainError("spectral profile needs q_max >= 1");
  SpectralProfile out;
  out.prefix = prefix;
  for (std::uint64_t q = 1; q <= max_q; ++q) {
    for (std::uint64_t p = 0; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      out.entries.push_back({static_cast<std::int64_t>(p), q,
                             spectral_coefficient(spec, static_cast<std::int64_t>(p), q, prefix)});
    }
  }
  return out;
}

double star_discrepancy(const DigitSpec& spec, const Frequency& alpha, Index prefix) {
  if (prefix < 1) throw DomainError("star discrepancy needs N >= 1");
  std::vector<double> points;
  fill_turns(spec, alpha, 0, prefix, 1, points);
  std::sort(points.begin(), points.end());
  return kernels::sorted_discrepancy(points);
}

std::vector<DecayRow> weyl_decay(const DigitSpec& spec, const Frequency& alpha, const std::vector<Index>& prefixes) {
  std::vector<DecayRow> rows;
  Neumaier re, im;
  Index done = 0;
  for (Index prefix : prefixes) {
    if (prefix < 1 || prefix < done) throw DomainError("decay prefixes must be positive and increasing");
    const auto part = weyl_partial_sum(spec, alpha, done, prefix);
    re.add(part.real());
    im.add(part.imag());
    done = prefix;
    rows.push_back({prefix, std::abs(std::complex<double>(re.value(), im.value())) / static_cast<double>(prefix)});
  }
  return rows;
}

}  // namespace crl
