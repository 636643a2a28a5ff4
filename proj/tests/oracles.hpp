#pragma once

// Reference computations written without the library: plain loops, no odometers, no kernels.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

inline bool digits_ok(std::uint64_t m, unsigned b, const std::vector<unsigned>& D) {
  do {
    if (std::find(D.begin(), D.end(), m % b) == D.end()) return false;
    m /= b;
  } while (m);
  return true;
}

/// Every m < limit whose base-b digits lie in D, ascending.
inline std::vector<std::uint64_t> cantor_below(unsigned b, const std::vector<unsigned>& D, std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; m < limit; ++m)
    if (digits_ok(m, b, D)) out.push_back(m);
  return out;
}

/// The first `count` elements, by filtering with a growing limit.
inline std::vector<std::uint64_t> cantor_first(unsigned b, const std::vector<unsigned>& D, std::size_t count) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; out.size() < count; ++m)
    if (digits_ok(m, b, D)) out.push_back(m);
  return out;
}

inline std::uint64_t digit_sum(std::uint64_t m, unsigned b) {
  std::uint64_t s = 0;
  for (; m; m /= b) s += m % b;
  return s;
}

struct DeltaRow {
  std::uint64_t k;
  std::int64_t s;
  bool operator<(const DeltaRow& o) const { return k != o.k ? k < o.k : s < o.s; }
};

/// Pairwise difference scan: (k_{n+h}-k_n, digit-sum jump) -> indices, for n + h < N.
inline std::map<DeltaRow, std::vector<std::uint64_t>> difference_scan(const std::vector<std::uint64_t>& ks, unsigned b,
                                                                      std::uint64_t h, std::uint64_t N) {
  std::map<DeltaRow, std::vector<std::uint64_t>> out;
  for (std::uint64_t n = 0; n + h < N; ++n) {
    const auto s = static_cast<std::int64_t>(digit_sum(ks[n + h], b)) - static_cast<std::int64_t>(digit_sum(ks[n], b));
    out[{ks[n + h] - ks[n], s}].push_back(n);
  }
  return out;
}

/// frac(alpha k) for the exact binary value of alpha, through rational arithmetic.
inline double frac_exact(double alpha, std::uint64_t k) {
  const Rational x = Rational(alpha) * Rational(k);
  const boost::multiprecision::cpp_int whole = numerator(x) / denominator(x);
  Rational fr = x - Rational(whole);
  if (fr < 0) fr += 1;
  return fr.convert_to<double>();
}

/// E_n e^{2 pi i alpha k_n} by direct summation of exactly reduced phases.
inline std::complex<double> weyl_direct(const std::vector<std::uint64_t>& ks, double alpha) {
  long double re = 0, im = 0;
  for (auto k : ks) {
    const long double x = frac_exact(alpha, k);
    re += std::cos(2 * std::numbers::pi_v<long double> * x);
    im += std::sin(2 * std::numbers::pi_v<long double> * x);
  }
  return {static_cast<double>(re / ks.size()), static_cast<double>(im / ks.size())};
}

/// sum_a pi_q(a) e^{2 pi i p a / q} from integer residue counts.
inline std::complex<double> counting_identity(const std::vector<std::uint64_t>& ks, std::int64_t p, std::uint64_t q) {
  std::vector<std::uint64_t> counts(q, 0);
  for (auto k : ks) ++counts[k % q];
  std::complex<double> out = 0;
  for (std::uint64_t a = 0; a < q; ++a) {
    const auto pa = ((p % static_cast<std::int64_t>(q) + static_cast<std::int64_t>(q)) * static_cast<std::int64_t>(a)) %
                    static_cast<std::int64_t>(q);
    out += std::polar(static_cast<double>(counts[a]) / ks.size(), 2 * std::numbers::pi * pa / q);
  }
  return out;
}

/// Star discrepancy by the O(n^2) definition sup_t |#{x_i < t}/n - t| over t at the points.
inline double star_discrepancy_direct(std::vector<double> xs) {
  const double n = static_cast<double>(xs.size());
  double best = 0;
  for (double t : xs) {
    double below = 0, at_or_below = 0;
    for (double x : xs) {
      below += x < t;
      at_or_below += x <= t;
    }
    best = std::max({best, std::abs(below / n - t), std::abs(at_or_below / n - t)});
  }
  return best;
}

/// Whether the coloring (values at 1..W in c[0..W-1]) has a monochromatic t-AP with step in `steps`.
inline bool has_mono_ap(const std::vector<int>& c, std::uint64_t t, const std::vector<std::uint64_t>& steps) {
  const std::uint64_t W = c.size();
  for (auto r : steps) {
    if (r == 0) continue;
    for (std::uint64_t x = 1; x + (t - 1) * r <= W; ++x) {
      bool mono = true;
      for (std::uint64_t s = 1; s < t && mono; ++s) mono = c[x + s * r - 1] == c[x - 1];
      if (mono) return true;
    }
  }
  return false;
}

/// Whether some L-coloring of [1,W] avoids monochromatic t-APs with steps in K \ {0}; all L^W colorings.
inline bool avoiding_coloring_exists(std::uint64_t W, unsigned L, std::uint64_t t, unsigned b,
                                     const std::vector<unsigned>& D) {
  const auto steps = cantor_below(b, D, W + 1);
  std::vector<int> c(W, 0);
  while (true) {
    if (!has_mono_ap(c, t, steps)) return true;
    std::uint64_t i = 0;
    while (i < W && ++c[i] == static_cast<int>(L)) c[i++] = 0;
    if (i == W) return false;
  }
}

/// Smallest W <= W_max that forces a monochromatic progression, or 0.
inline std::uint64_t cvdw_brute(std::uint64_t t, unsigned L, unsigned b, const std::vector<unsigned>& D,
                                std::uint64_t W_max) {
  for (std::uint64_t W = 1; W <= W_max; ++W)
    if (!avoiding_coloring_exists(W, L, t, b, D)) return W;
  return 0;
}

/// Witness checker: step in K \ {0}, points inside [1,W], common color.
inline bool check_coloring_witness(const std::vector<int>& c, std::uint64_t x, std::uint64_t r, std::uint64_t t,
                                   unsigned b, const std::vector<unsigned>& D) {
  if (r == 0 || !digits_ok(r, b, D) || x < 1) return false;
  if (x + (t - 1) * r > c.size()) return false;
  for (std::uint64_t s = 0; s < t; ++s)
    if (c[x + s * r - 1] != c[x - 1]) return false;
  return true;
}

/// E_{x in [1,M]} E_{n<N} prod_{j<ell} 1_A(x - j k_n), with 1_A = 0 outside [1,M].
inline Rational density_double_sum(const std::set<std::uint64_t>& A, std::uint64_t M, unsigned ell,
                                   const std::vector<std::uint64_t>& ks) {
  std::uint64_t hits = 0;
  for (std::uint64_t x = 1; x <= M; ++x)
    for (auto k : ks) {
      bool all = true;
      for (unsigned j = 0; j < ell && all; ++j) {
        const auto off = static_cast<std::uint64_t>(j) * k;
        all = off < x && x - off <= M && A.count(x - off);
      }
      hits += all;
    }
  return Rational(hits) / (Rational(M) * Rational(ks.size()));
}

/// Indices n with some x, x+k_n, ..., x+(ell-1)k_n all in A.
inline std::vector<std::uint64_t> census_scan(const std::set<std::uint64_t>& A, unsigned ell,
                                              const std::vector<std::uint64_t>& ks) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 0; n < ks.size(); ++n)
    for (auto x : A) {
      bool all = true;
      for (unsigned j = 1; j < ell && all; ++j) all = A.count(x + j * ks[n]);
      if (all) {
        out.push_back(n);
        break;
      }
    }
  return out;
}

/// Exact E over omega of prod_j f(T^{j k} omega) for a cylinder table with half-width w, enumerating
/// the coordinates in the union of the shifted windows.
inline Rational bernoulli_product(const std::vector<Rational>& table, unsigned w, unsigned ell, std::uint64_t k) {
  std::set<std::int64_t> coords;
  for (unsigned j = 0; j < ell; ++j)
    for (std::int64_t c = -static_cast<std::int64_t>(w); c <= static_cast<std::int64_t>(w); ++c)
      coords.insert(static_cast<std::int64_t>(j * k) + c);
  const std::vector<std::int64_t> pos(coords.begin(), coords.end());
  Rational sum = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << pos.size()); ++bits) {
    auto omega = [&](std::int64_t c) {
      const auto i = std::lower_bound(pos.begin(), pos.end(), c) - pos.begin();
      return (bits >> i) & 1;
    };
    Rational prod = 1;
    for (unsigned j = 0; j < ell; ++j) {
      std::uint64_t idx = 0;
      for (unsigned c = 0; c <= 2 * w; ++c)
        idx |= omega(static_cast<std::int64_t>(j * k) - static_cast<std::int64_t>(w) + c) << c;
      prod *= table[idx];
    }
    sum += prod;
  }
  return sum / Rational(std::uint64_t{1} << pos.size());
}

/// (1/m) sum_x prod_j f(x + j k r mod m), averaged over the given k.
inline Rational cyclic_state_sum(const std::vector<Rational>& f, std::uint64_t r, unsigned ell,
                                 const std::vector<std::uint64_t>& ks) {
  const std::uint64_t m = f.size();
  Rational total = 0;
  for (auto k : ks)
    for (std::uint64_t x = 0; x < m; ++x) {
      Rational prod = 1;
      for (unsigned j = 0; j < ell; ++j) prod *= f[(x + (j * (k % m)) % m * r) % m];
      total += prod;
    }
  return total / Rational(m) / Rational(ks.size());
}

}  // namespace oracle
