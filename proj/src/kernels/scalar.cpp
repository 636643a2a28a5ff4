#include <bit>
#include <cmath>
#include <numbers>

#include "crl/kernels.hpp"

namespace crl::kernels {

namespace {

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

PhaseSum phase_sum_scalar(const double* turns, std::size_t n) {
  Neumaier re, im;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = turns[i] - std::nearbyint(turns[i]);
    const double angle = 2.0 * std::numbers::pi * y;
    re.add(std::cos(angle));
    im.add(std::sin(angle));
  }
  return {re.value(), im.value()};
}

PhaseSum autocorrelation_scalar(const double* re, const double* im, std::size_t n, std::size_t lag) {
  PhaseSum out;
  for (std::size_t j = 0; j + lag < n; ++j) {
    out.re += re[j + lag] * re[j] + im[j + lag] * im[j];
    out.im += im[j + lag] * re[j] - re[j + lag] * im[j];
  }
  return out;
}

std::uint64_t fetch(const std::uint64_t* words, std::size_t nwords, std::uint64_t bit) {
  const std::uint64_t q = bit >> 6;
  const unsigned r = static_cast<unsigned>(bit & 63);
  const std::uint64_t lo = q < nwords ? words[q] : 0;
  if (r == 0) return lo;
  const std::uint64_t hi = q + 1 < nwords ? words[q + 1] : 0;
  return (lo >> r) | (hi << (64 - r));
}

std::uint64_t and_popcount_scalar(const std::uint64_t* words, std::size_t nwords, const std::uint64_t* offsets,
                                  std::size_t noffsets, std::uint64_t nbits) {
  std::uint64_t count = 0;
  for (std::uint64_t base = 0; base < nbits; base += 64) {
    std::uint64_t acc = ~std::uint64_t{0};
    for (std::size_t j = 0; j < noffsets && acc; ++j) acc &= fetch(words, nwords, base + offsets[j]);
    if (nbits - base < 64) acc &= (std::uint64_t{1} << (nbits - base)) - 1;
    count += static_cast<std::uint64_t>(std::popcount(acc));
  }
  return count;
}

double sorted_discrepancy_scalar(const double* x, std::size_t n) {
  const double total = static_cast<double>(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double upper = static_cast<double>(i + 1) / total - x[i];
    const double lower = x[i] - static_cast<double>(i) / total;
    worst = std::fmax(worst, std::fmax(upper, lower));
  }
  return worst;
}

}  // namespace

const Table& scalar_table() {
  static const Table table{Backend::Scalar, "scalar", phase_sum_scalar, autocorrelation_scalar,
                           and_popcount_scalar, sorted_discrepancy_scalar};
  return table;
}

}  // namespace crl::kernels
