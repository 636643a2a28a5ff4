// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma; nothing here may run
// before dispatch.cpp has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "crl/kernels.hpp"

namespace crl::kernels {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Taylor coefficients for |theta| <= pi/4; truncation error below 1e-19.
constexpr double kS3 = -1.0 / 6.0;
constexpr double kS5 = 1.0 / 120.0;
constexpr double kS7 = -1.0 / 5040.0;
constexpr double kS9 = 1.0 / 362880.0;
constexpr double kS11 = -1.0 / 39916800.0;
constexpr double kS13 = 1.0 / 6227020800.0;
constexpr double kS15 = -1.0 / 1307674368000.0;
constexpr double kS17 = 1.0 / 355687428096000.0;
constexpr double kC2 = -1.0 / 2.0;
constexpr double kC4 = 1.0 / 24.0;
constexpr double kC6 = -1.0 / 720.0;
constexpr double kC8 = 1.0 / 40320.0;
constexpr double kC10 = -1.0 / 3628800.0;
constexpr double kC12 = 1.0 / 479001600.0;
constexpr double kC14 = -1.0 / 87178291200.0;
constexpr double kC16 = 1.0 / 20922789888000.0;

inline __m256d bcast(double v) { return _mm256_set1_pd(v); }

// cos and sin of 2 pi x for x in turns, by octant reduction and Taylor polynomials.
inline void sincos_turns(__m256d x, __m256d& c_out, __m256d& s_out) {
  const __m256d y = _mm256_sub_pd(x, _mm256_round_pd(x, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(y, bcast(4.0)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d t = _mm256_fnmadd_pd(q, bcast(0.25), y);
  const __m256d theta = _mm256_mul_pd(t, bcast(kTwoPi));
  const __m256d z = _mm256_mul_pd(theta, theta);

  __m256d sp = bcast(kS17);
  sp = _mm256_fmadd_pd(sp, z, bcast(kS15));
  sp = _mm256_fmadd_pd(sp, z, bcast(kS13));
  sp = _mm256_fmadd_pd(sp, z, bcast(kS11));
  sp = _mm256_fmadd_pd(sp, z, bcast(kS9));
  sp = _mm256_fmadd_pd(sp, z, bcast(kS7));
  sp = _mm256_fmadd_pd(sp, z, bcast(kS5));
  sp = _mm256_fmadd_pd(sp, z, bcast(kS3));
  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(sp, z), theta, theta);

  __m256d cp = bcast(kC16);
  cp = _mm256_fmadd_pd(cp, z, bcast(kC14));
  cp = _mm256_fmadd_pd(cp, z, bcast(kC12));
  cp = _mm256_fmadd_pd(cp, z, bcast(kC10));
  cp = _mm256_fmadd_pd(cp, z, bcast(kC8));
  cp = _mm256_fmadd_pd(cp, z, bcast(kC6));
  cp = _mm256_fmadd_pd(cp, z, bcast(kC4));
  cp = _mm256_fmadd_pd(cp, z, bcast(kC2));
  const __m256d c = _mm256_fmadd_pd(cp, z, bcast(1.0));

  // quadrant in {0,1,2,3}
  const __m256d quadrant = _mm256_sub_pd(q, _mm256_mul_pd(bcast(4.0), _mm256_floor_pd(_mm256_mul_pd(q, bcast(0.25)))));
  const __m256d is1 = _mm256_cmp_pd(quadrant, bcast(1.0), _CMP_EQ_OQ);
  const __m256d is2 = _mm256_cmp_pd(quadrant, bcast(2.0), _CMP_EQ_OQ);
  const __m256d is3 = _mm256_cmp_pd(quadrant, bcast(3.0), _CMP_EQ_OQ);
  const __m256d swap = _mm256_or_pd(is1, is3);
  const __m256d sign = bcast(-0.0);
  const __m256d cos_base = _mm256_blendv_pd(c, s, swap);
  const __m256d sin_base = _mm256_blendv_pd(s, c, swap);
  c_out = _mm256_xor_pd(cos_base, _mm256_and_pd(sign, _mm256_or_pd(is1, is2)));
  s_out = _mm256_xor_pd(sin_base, _mm256_and_pd(sign, _mm256_or_pd(is2, is3)));
}

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

PhaseSum phase_sum_avx2(const double* turns, std::size_t n) {
  __m256d re_sum = _mm256_setzero_pd(), re_comp = _mm256_setzero_pd();
  __m256d im_sum = _mm256_setzero_pd(), im_comp = _mm256_setzero_pd();
  auto kahan = [](__m256d& sum, __m256d& comp, __m256d v) {
    const __m256d y = _mm256_sub_pd(v, comp);
    const __m256d t = _mm256_add_pd(sum, y);
    comp = _mm256_sub_pd(_mm256_sub_pd(t, sum), y);
    sum = t;
  };
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d c, s;
    sincos_turns(_mm256_loadu_pd(turns + i), c, s);
    kahan(re_sum, re_comp, c);
    kahan(im_sum, im_comp, s);
  }
  alignas(32) double rs[4], rc[4], is[4], ic[4];
  _mm256_store_pd(rs, re_sum);
  _mm256_store_pd(rc, re_comp);
  _mm256_store_pd(is, im_sum);
  _mm256_store_pd(ic, im_comp);
  Neumaier re, im;
  for (int lane = 0; lane < 4; ++lane) {
    re.add(rs[lane]);
    re.add(-rc[lane]);
    im.add(is[lane]);
    im.add(-ic[lane]);
  }
  if (i < n) {
    alignas(32) double pad[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t rest = n - i;
    for (std::size_t j = 0; j < rest; ++j) pad[j] = turns[i + j];
    __m256d c, s;
    sincos_turns(_mm256_load_pd(pad), c, s);
    alignas(32) double cv[4], sv[4];
    _mm256_store_pd(cv, c);
    _mm256_store_pd(sv, s);
    for (std::size_t j = 0; j < rest; ++j) {
      re.add(cv[j]);
      im.add(sv[j]);
    }
  }
  return {re.value(), im.value()};
}

PhaseSum autocorrelation_avx2(const double* re, const double* im, std::size_t n, std::size_t lag) {
  if (lag >= n) return {};
  const std::size_t count = n - lag;
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d ar = _mm256_loadu_pd(re + j);
    const __m256d ai = _mm256_loadu_pd(im + j);
    const __m256d br = _mm256_loadu_pd(re + j + lag);
    const __m256d bi = _mm256_loadu_pd(im + j + lag);
    acc_re = _mm256_fmadd_pd(br, ar, acc_re);
    acc_re = _mm256_fmadd_pd(bi, ai, acc_re);
    acc_im = _mm256_fmadd_pd(bi, ar, acc_im);
    acc_im = _mm256_fnmadd_pd(br, ai, acc_im);
  }
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, acc_re);
  _mm256_store_pd(m, acc_im);
  PhaseSum out{(r[0] + r[1]) + (r[2] + r[3]), (m[0] + m[1]) + (m[2] + m[3])};
  for (; j < count; ++j) {
    out.re += re[j + lag] * re[j] + im[j + lag] * im[j];
    out.im += im[j + lag] * re[j] - re[j + lag] * im[j];
  }
  return out;
}

inline __m256i popcount_lanes(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  const __m256i counts = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
  return _mm256_sad_epu8(counts, _mm256_setzero_si256());
}

std::uint64_t fetch(const std::uint64_t* words, std::size_t nwords, std::uint64_t bit) {
  const std::uint64_t q = bit >> 6;
  const unsigned r = static_cast<unsigned>(bit & 63);
  const std::uint64_t lo = q < nwords ? words[q] : 0;
  if (r == 0) return lo;
  const std::uint64_t hi = q + 1 < nwords ? words[q + 1] : 0;
  return (lo >> r) | (hi << (64 - r));
}

std::uint64_t and_popcount_avx2(const std::uint64_t* words, std::size_t nwords, const std::uint64_t* offsets,
                                std::size_t noffsets, std::uint64_t nbits) {
  const std::uint64_t full_blocks = nbits / 64;
  std::uint64_t max_word = 0;
  for (std::size_t j = 0; j < noffsets; ++j) max_word = std::max<std::uint64_t>(max_word, offsets[j] >> 6);
  // Vector path covers blocks whose source words [i + off/64, i + off/64 + 4] all exist.
  std::uint64_t vector_end = 0;
  if (nwords >= max_word + 5) vector_end = std::min<std::uint64_t>(full_blocks, nwords - max_word - 4);
  vector_end -= vector_end % 4;

  __m256i total = _mm256_setzero_si256();
  for (std::uint64_t i = 0; i < vector_end; i += 4) {
    __m256i acc = _mm256_set1_epi64x(-1);
    for (std::size_t j = 0; j < noffsets; ++j) {
      const std::uint64_t q = i + (offsets[j] >> 6);
      const unsigned r = static_cast<unsigned>(offsets[j] & 63);
      const __m256i lo = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + q));
      const __m256i hi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + q + 1));
      // shifting left by 64 yields zero, which is what r == 0 needs
      const __m256i shifted = _mm256_or_si256(_mm256_srl_epi64(lo, _mm_cvtsi32_si128(static_cast<int>(r))),
                                              _mm256_sll_epi64(hi, _mm_cvtsi32_si128(static_cast<int>(64 - r))));
      acc = _mm256_and_si256(acc, shifted);
    }
    total = _mm256_add_epi64(total, popcount_lanes(acc));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), total);
  std::uint64_t count = lanes[0] + lanes[1] + lanes[2] + lanes[3];

  for (std::uint64_t base = vector_end * 64; base < nbits; base += 64) {
    std::uint64_t acc = ~std::uint64_t{0};
    for (std::size_t j = 0; j < noffsets && acc; ++j) acc &= fetch(words, nwords, base + offsets[j]);
    if (nbits - base < 64) acc &= (std::uint64_t{1} << (nbits - base)) - 1;
    count += static_cast<std::uint64_t>(std::popcount(acc));
  }
  return count;
}

double sorted_discrepancy_avx2(const double* x, std::size_t n) {
  const __m256d total = _mm256_set1_pd(static_cast<double>(n));
  __m256d index = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  __m256d worst = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d upper = _mm256_sub_pd(_mm256_div_pd(_mm256_add_pd(index, bcast(1.0)), total), xi);
    const __m256d lower = _mm256_sub_pd(xi, _mm256_div_pd(index, total));
    worst = _mm256_max_pd(worst, _mm256_max_pd(upper, lower));
    index = _mm256_add_pd(index, bcast(4.0));
  }
  alignas(32) double w[4];
  _mm256_store_pd(w, worst);
  double out = std::fmax(std::fmax(w[0], w[1]), std::fmax(w[2], w[3]));
  const double tn = static_cast<double>(n);
  for (; i < n; ++i) {
    const double upper = static_cast<double>(i + 1) / tn - x[i];
    const double lower = x[i] - static_cast<double>(i) / tn;
    out = std::fmax(out, std::fmax(upper, lower));
  }
  return out;
}

}  // namespace

const Table& avx2_table_unchecked() {
  static const Table table{Backend::Avx2, "avx2", phase_sum_avx2, autocorrelation_avx2, and_popcount_avx2,
                           sorted_discrepancy_avx2};
  return table;
}

}  // namespace crl::kernels
