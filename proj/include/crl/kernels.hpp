#pragma once

// Data-parallel inner loops. Every kernel has a portable scalar reference and, where the
// build and the CPU allow it, an AVX2+FMA variant picked at runtime. Variants agree exactly
// for integer kernels and to round-off for floating-point ones.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace crl::kernels {

enum class Backend { Scalar, Avx2 };

struct PhaseSum {
  double re = 0.0;
  double im = 0.0;
};

struct Table {
  Backend backend;
  const char* name;
  // Compensated sum of exp(2 pi i x) over phases x given in turns.
  PhaseSum (*phase_sum)(const double* turns, std::size_t n);
  // sum_{j < n - lag} a_{j+lag} * conj(a_j) for a = re + i im.
  PhaseSum (*autocorrelation)(const double* re, const double* im, std::size_t n, std::size_t lag);
  // #{y < nbits : bit (y + offsets[j]) of words is set for every j}; bits past the array read as 0.
  std::uint64_t (*and_popcount)(const std::uint64_t* words, std::size_t nwords, const std::uint64_t* offsets,
                                std::size_t noffsets, std::uint64_t nbits);
  // max_i max(i/n - x_i, x_i - (i-1)/n) over sorted x_1..x_n.
  double (*sorted_discrepancy)(const double* sorted, std::size_t n);
};

const Table& scalar_table();

/// nullptr when the variant is not compiled in or the CPU lacks the instructions.
const Table* avx2_table();

bool available(Backend backend);

/// Best available backend, unless overridden by select() or CRL_KERNEL=scalar|avx2 in the environment.
const Table& active();

/// Throws DomainError when the backend is unavailable.
void select(Backend backend);

Backend parse_backend(std::string_view name);

// Convenience wrappers over active().
PhaseSum phase_sum(std::span<const double> turns);
std::complex<double> autocorrelation(std::span<const double> re, std::span<const double> im, std::size_t lag);
std::uint64_t and_popcount(std::span<const std::uint64_t> words, std::span<const std::uint64_t> offsets,
                           std::uint64_t nbits);
double sorted_discrepancy(std::span<const double> sorted);

}  // namespace crl::kernels
