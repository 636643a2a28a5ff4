#pragma once

// Ergodic and multiple-recurrence averages along k_n on three measure-preserving systems whose
// averages can be evaluated in closed form:
//
//   CyclicRotation  x -> x + r on Z_m with counting measure       (compact, rational spectrum)
//   TorusRotation   x -> x + alpha on [0,1) with Lebesgue measure (Kronecker)
//   BernoulliShift  the two-sided fair-coin shift                  (weak mixing)
//
// Nothing is sampled. Cyclic averages come from residue counts of k_n mod m, torus averages of
// trigonometric polynomials from Weyl sums coefficient by coefficient, and Bernoulli averages of
// cylinder functions from exact enumeration over the union of shifted coordinate windows.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "crl/cantor.hpp"
#include "crl/phase.hpp"
#include "crl/rational.hpp"

namespace crl {

struct CyclicRotation {
  std::uint64_t modulus = 1;
  std::uint64_t step = 1;
};

struct TorusRotation {
  Frequency alpha = Frequency::rational(0, 1);
};

struct BernoulliShift {};

using System = std::variant<CyclicRotation, TorusRotation, BernoulliShift>;

/// A function on Z_m given by its values.
struct IndicatorVector {
  std::vector<double> values;

  static IndicatorVector of_set(std::uint64_t modulus, const std::vector<std::uint64_t>& members);
};

/// sum_m c_m e^{2 pi i m x}.
struct TrigPolynomial {
  std::map<std::int64_t, std::complex<double>> coeffs;
};

/// f(omega) = table[omega_{-w} + 2 omega_{-w+1} + ... + 2^{2w} omega_w].
struct Cylinder {
  unsigned half_width = 0;
  std::vector<double> table;

  /// 1{omega_0 = 1}.
  static Cylinder coordinate();
};

/// Indicator of the arc [lo, hi) on the circle; recurrence averages on TorusRotation only.
struct ArcIndicator {
  double lo = 0.0;
  double hi = 0.0;
};

using Observable = std::variant<IndicatorVector, TrigPolynomial, Cylinder, ArcIndicator>;

/// The constant function c in the natural representation for `system`.
Observable constant_observable(const System& system, double c);

/// Mean and squared L2 distance from that mean of a Bernoulli average E_n T^{k_n} f.
struct BernoulliProfile {
  Rational mean;
  Rational deviation_sq;
};

using AverageValue = std::variant<IndicatorVector, TrigPolynomial, BernoulliProfile>;

/// E_{n<N} T^{k_n} f. Throws DomainError on a system/observable kind mismatch.
AverageValue ergodic_average(const System& system, const Observable& f, const DigitSpec& spec, Index prefix);

/// sum_r gamma-hat_r P_r f over the rational eigenvalues e^{2 pi i r} of T.
/// CyclicRotation and rational TorusRotation only; an irrational rotation is accepted only for constant f.
AverageValue spectral_prediction(const System& system, const Observable& f, const DigitSpec& spec, Index prefix);

/// E_{M <= n < N} T^{k_n} f. Requires M < N.
AverageValue uniform_window_average(const System& system, const Observable& f, const DigitSpec& spec, Index first,
                                    Index last);

/// Average over n in {start + t |D|^i} below N, evaluated through k_{|D|^i u + j} = b^i k_u + k_j as
/// an ergodic average of T^{b^i} followed by T^{k_j}.
AverageValue progression_average(const System& system, const Observable& f, const DigitSpec& spec, Index start,
                                 unsigned i, Index prefix);

struct RecurrenceValue {
  double value = 0.0;
  std::optional<Rational> exact;  // set for CyclicRotation and BernoulliShift
  Index terms = 0;                // number of n averaged over
};

/// E_n E_X prod_{j<ell} f(T^{j k_n} x) over n < N with k_n >= min_step.
/// f must take values in [0,1]; TorusRotation needs an ArcIndicator.
RecurrenceValue multi_recurrence_average(const System& system, const Observable& f, const DigitSpec& spec,
                                         unsigned ell, Index prefix, Element min_step = 0);

/// (T f)(x) = f(Tx).
Observable apply_map(const System& system, const Observable& f);

/// Pushforward of counting measure on Z_m under x -> x + r (as a weight vector).
std::vector<double> pushforward_uniform(const CyclicRotation& system);

struct VdcResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Both sides of the van der Corput bound
///   |E_{j<=N} a_j|^2 <= E_{h<=H} |E_{j<=N-h} a_{j+h} conj(a_j)| + 1/H + H/N.
/// Throws DomainError if some |a_j| > 1 + 1e-12 or H is outside [1, N].
VdcResult vdc_check(std::span<const std::complex<double>> sequence, std::size_t window);

/// Smallest n with k_n >= value.
Index first_index_at_least(const DigitSpec& spec, Element value);

}  // namespace crl
