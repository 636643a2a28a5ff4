#pragma once

// Residue statistics, Weyl sums and discrepancy of the sequence (k_n).

#include <complex>
#include <cstdint>
#include <vector>

#include "crl/cantor.hpp"
#include "crl/phase.hpp"
#include "crl/rational.hpp"

namespace crl {

/// Counts of k_n mod q over the index window [first, last).
struct ResidueDistribution {
  std::uint64_t modulus = 1;
  Index first = 0;
  Index last = 0;
  std::vector<std::uint64_t> counts;

  Index size() const { return last - first; }
  Rational frequency(std::uint64_t residue) const;
  double frequency_approx(std::uint64_t residue) const;
};

/// Exact empirical distribution of k_n mod q for n < N. Requires q >= 1, N >= 1.
ResidueDistribution residue_distribution(const DigitSpec& spec, std::uint64_t modulus, Index prefix);

/// Same over an arbitrary window [first, last), first < last.
ResidueDistribution residue_window(const DigitSpec& spec, std::uint64_t modulus, Index first, Index last);

/// sum_a pi(a) e^{2 pi i p a / q}, the Fourier transform of a residue distribution at p.
std::complex<double> residue_fourier(const ResidueDistribution& dist, std::int64_t p);

struct WeylSumResult {
  Frequency alpha = Frequency::rational(0, 1);
  Index prefix = 0;
  std::complex<double> value;
  double modulus = 0.0;
};

/// E_{n<N} e^{2 pi i alpha k_n}.
WeylSumResult weyl_sum(const DigitSpec& spec, const Frequency& alpha, Index prefix);

/// Unnormalised sum_{first <= n < last} e^{2 pi i alpha * multiplier * k_n}, compensated and
/// reduced in fixed chunk order.
std::complex<double> weyl_partial_sum(const DigitSpec& spec, const Frequency& alpha, Index first, Index last,
                                      u128 multiplier = 1);

/// Mean over [first, last) of e^{2 pi i alpha m k_n}, for any signed integer m.
std::complex<double> weyl_mean(const DigitSpec& spec, const Frequency& alpha, Index first, Index last,
                               std::int64_t multiplier = 1);

/// gamma-hat_{p/q}: the Weyl sum at the rational p/q.
std::complex<double> spectral_coefficient(const DigitSpec& spec, std::int64_t p, std::uint64_t q, Index prefix);

struct SpectralEntry {
  std::int64_t p = 0;
  std::uint64_t q = 1;
  std::complex<double> gamma;
};

struct SpectralProfile {
  Index prefix = 0;
  std::vector<SpectralEntry> entries;
};

/// gamma-hat_r at every reduced r = p/q in [0,1) with q <= max_q, ordered by (q, p).
SpectralProfile spectral_profile(const DigitSpec& spec, std::uint64_t max_q, Index prefix);

/// Star discrepancy of {alpha k_n mod 1 : n < N}.
double star_discrepancy(const DigitSpec& spec, const Frequency& alpha, Index prefix);

struct DecayRow {
  Index prefix = 0;
  double modulus = 0.0;
};

/// |Weyl sum| at each prefix in `prefixes` (must be increasing), sharing one pass over the sequence.
std::vector<DecayRow> weyl_decay(const DigitSpec& spec, const Frequency& alpha, const std::vector<Index>& prefixes);

}  // namespace crl
