#include "crl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "crl/equidist.hpp"
#include "crl/kernels.hpp"

namespace crl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr unsigned kMaxUnionBits = 24;

std::complex<double> unit(double turns) {
  const double y = turns - std::nearbyint(turns);
  const double angle = 2.0 * std::numbers::pi * y;
  return {std::cos(angle), std::sin(angle)};
}

// e^{2 pi i m alpha k}
std::complex<double> torus_phase(const Frequency& alpha, std::int64_t m, Element k) {
  if (m == 0 || k == 0) return {1.0, 0.0};
  if (alpha.is_rational()) return unit(alpha.scaled(m).turns(k));
  const auto magnitude = static_cast<u128>(m < 0 ? -static_cast<__int128>(m) : m);
  const auto z = unit(alpha.turns(checked_mul(magnitude, k)));
  return m < 0 ? std::conj(z) : z;
}

// E_{first <= u < last} e^{2 pi i m alpha scale k_u}
std::complex<double> torus_mean(const DigitSpec& spec, const Frequency& alpha, Index first, Index last,
                                std::int64_t m, u128 scale) {
  if (m == 0) return {1.0, 0.0};
  const double count = static_cast<double>(last - first);
  if (alpha.is_rational()) {
    const auto q = alpha.denominator();
    const auto folded = alpha.scaled(m).scaled(static_cast<std::int64_t>(scale % q));
    return weyl_partial_sum(spec, folded, first, last, 1) / count;
  }
  const auto magnitude = static_cast<u128>(m < 0 ? -static_cast<__int128>(m) : m);
  const auto z = weyl_partial_sum(spec, alpha, first, last, checked_mul(magnitude, scale)) / count;
  return m < 0 ? std::conj(z) : z;
}

const CyclicRotation& as_cyclic(const System& s) { return std::get<CyclicRotation>(s); }

void check_system(const System& system) {
  if (auto* c = std::get_if<CyclicRotation>(&system); c && c->modulus < 1)
    throw DomainError("cyclic rotation needs m >= 1");
}

const IndicatorVector& cyclic_observable(const System& system, const Observable& f) {
  const auto* v = std::get_if<IndicatorVector>(&f);
  if (!v) throw DomainError("cyclic rotation needs a vector observable");
  if (v->values.size() != as_cyclic(system).modulus)
    throw DomainError("vector observable length does not match the cyclic modulus");
  for (double x : v->values)
    if (!std::isfinite(x)) throw DomainError("observable values must be finite");
  return *v;
}

const TrigPolynomial& torus_polynomial(const Observable& f) {
  const auto* p = std::get_if<TrigPolynomial>(&f);
  if (!p) throw DomainError("torus averages need a trigonometric polynomial observable");
  return *p;
}

const Cylinder& bernoulli_cylinder(const Observable& f) {
  const auto* c = std::get_if<Cylinder>(&f);
  if (!c) throw DomainError("Bernoulli shift needs a cylinder observable");
  if (c->half_width > 10) throw DomainError("cylinder half-width above 10 is not supported");
  if (c->table.size() != (std::size_t{1} << (2 * c->half_width + 1)))
    throw DomainError("cylinder table must have 2^(2w+1) entries");
  for (double x : c->table)
    if (!std::isfinite(x)) throw DomainError("observable values must be finite");
  return *c;
}

void require_unit_interval(std::span<const double> values) {
  for (double x : values)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("recurrence averages need f with values in [0,1]");
}

// v(x) = E over the window of f(x + k_n r mod m), from residue counts of k_n mod m.
IndicatorVector cyclic_window(const CyclicRotation& sys, const IndicatorVector& f, const DigitSpec& spec,
                              Index first, Index last) {
  const auto m = sys.modulus;
  const auto dist = residue_window(spec, m, first, last);
  const double count = static_cast<double>(dist.size());
  const auto r = sys.step % m;
  IndicatorVector out;
  out.values.assign(m, 0.0);
  for (std::uint64_t x = 0; x < m; ++x) {
    double acc = 0.0;
    for (std::uint64_t a = 0; a < m; ++a) {
      if (dist.counts[a] == 0) continue;
      const auto y = static_cast<std::uint64_t>((static_cast<u128>(x) + static_cast<u128>(a) * r) % m);
      acc += static_cast<double>(dist.counts[a]) * f.values[y];
    }
    out.values[x] = acc / count;
  }
  return out;
}

TrigPolynomial torus_window(const TorusRotation& sys, const TrigPolynomial& f, const DigitSpec& spec, Index first,
                            Index last) {
  TrigPolynomial out;
  for (const auto& [m, c] : f.coeffs) out.coeffs[m] = c * torus_mean(spec, sys.alpha, first, last, m, 1);
  return out;
}

Rational exact(double x) { return Rational(x); }

Rational cylinder_mean(const Cylinder& f) {
  Rational sum = 0;
  for (double x : f.table) sum += exact(x);
  return sum / Rational(f.table.size());
}

// E[f * (f o sigma^lag)] - (E f)^2 for lag <= 2w.
Rational cylinder_autocovariance(const Cylinder& f, unsigned lag) {
  const unsigned width = 2 * f.half_width + 1;
  const unsigned span = width + lag;
  const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
  Rational sum = 0;
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << span); ++u)
    sum += exact(f.table[u & mask]) * exact(f.table[(u >> lag) & mask]);
  const Rational mean = cylinder_mean(f);
  return sum / Rational(std::uint64_t{1} << span) - mean * mean;
}

// Profile of (1/n) sum_i f o sigma^{s_i} for increasing shifts s_i.
BernoulliProfile bernoulli_profile(const Cylinder& f, const std::vector<Element>& shifts) {
  const unsigned reach = 2 * f.half_width;
  std::vector<std::uint64_t> pairs(reach + 1, 0);
  pairs[0] = shifts.size();
  for (std::size_t a = 0; a < shifts.size(); ++a)
    for (std::size_t b = a + 1; b < shifts.size() && shifts[b] - shifts[a] <= reach; ++b)
      ++pairs[static_cast<std::size_t>(shifts[b] - shifts[a])];
  BernoulliProfile out;
  out.mean = cylinder_mean(f);
  Rational total = 0;
  for (unsigned d = 0; d <= reach; ++d) {
    if (pairs[d] == 0) continue;
    total += Rational(d == 0 ? pairs[d] : 2 * pairs[d]) * cylinder_autocovariance(f, d);
  }
  const Rational n(shifts.size());
  out.deviation_sq = total / (n * n);
  return out;
}

std::vector<Element> element_window(const DigitSpec& spec, Index first, Index last) {
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(last - first));
  CantorOdometer odo(spec, first);
  for (Index n = first; n < last; ++n) {
    out.push_back(odo.value());
    if (n + 1 < last) odo.advance();
  }
  return out;
}

AverageValue window_average(const System& system, const Observable& f, const DigitSpec& spec, Index first,
                            Index last) {
  spec.require_zero_digit("ergodic averages");
  check_system(system);
  if (first >= last) throw DomainError("averaging window is empty");
  return std::visit(overloaded{
                        [&](const CyclicRotation& s) -> AverageValue {
                          return cyclic_window(s, cyclic_observable(system, f), spec, first, last);
                        },
                        [&](const TorusRotation& s) -> AverageValue {
                          return torus_window(s, torus_polynomial(f), spec, first, last);
                        },
                        [&](const BernoulliShift&) -> AverageValue {
                          return bernoulli_profile(bernoulli_cylinder(f), element_window(spec, first, last));
                        },
                    },
                    system);
}

// Arcs on the circle as unions of half-open intervals in [0,1).
using Arcs = std::vector<std::pair<double, double>>;

Arcs arc(double start, double length) {
  if (length >= 1.0) return {{0.0, 1.0}};
  if (length <= 0.0) return {};
  start -= std::floor(start);
  if (start >= 1.0) start = 0.0;
  const double end = start + length;
  if (end <= 1.0) return {{start, end}};
  return {{start, 1.0}, {0.0, end - 1.0}};
}

Arcs intersect(const Arcs& a, const Arcs& b) {
  Arcs out;
  for (const auto& [a0, a1] : a)
    for (const auto& [b0, b1] : b) {
      const double lo = std::max(a0, b0);
      const double hi = std::min(a1, b1);
      if (hi > lo) out.emplace_back(lo, hi);
    }
  return out;
}

double measure(const Arcs& arcs) {
  double total = 0.0;
  for (const auto& [lo, hi] : arcs) total += hi - lo;
  return total;
}

// E_X prod_{j<ell} f(x + j k alpha) for f the indicator of an arc.
double arc_recurrence(const ArcIndicator& f, const Frequency& alpha, unsigned ell, Element k) {
  const double length = f.hi - f.lo;
  Arcs acc = arc(f.lo, length);
  for (unsigned j = 1; j < ell && !acc.empty(); ++j) {
    const double shift = alpha.turns(checked_mul(j, k));
    acc = intersect(acc, arc(f.lo - shift, length));
  }
  return measure(acc);
}

// E_X prod_{j<ell} f(sigma^{j k} omega), exact.
Rational bernoulli_recurrence(const Cylinder& f, unsigned ell, Element k, const Rational& disjoint_value) {
  const unsigned width = 2 * f.half_width + 1;
  if (ell == 1) return cylinder_mean(f);
  if (k >= width) return disjoint_value;
  const unsigned step = static_cast<unsigned>(k);
  const unsigned span = (ell - 1) * step + width;
  if (span > kMaxUnionBits)
    throw DomainError("coordinate union of " + std::to_string(span) + " bits exceeds the limit of 24");
  const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
  Rational sum = 0;
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << span); ++u) {
    Rational product = 1;
    for (unsigned j = 0; j < ell && product != 0; ++j) product *= exact(f.table[(u >> (j * step)) & mask]);
    sum += product;
  }
  return sum / Rational(std::uint64_t{1} << span);
}

}  // namespace

IndicatorVector IndicatorVector::of_set(std::uint64_t modulus, const std::vector<std::uint64_t>& members) {
  IndicatorVector out;
  out.values.assign(modulus, 0.0);
  for (auto x : members) {
    if (x >= modulus) throw DomainError("indicator member outside Z_m");
    out.values[x] = 1.0;
  }
  return out;
}

Cylinder Cylinder::coordinate() { return Cylinder{0, {0.0, 1.0}}; }

Observable constant_observable(const System& system, double c) {
  return std::visit(overloaded{
                        [&](const CyclicRotation& s) -> Observable {
                          return IndicatorVector{std::vector<double>(s.modulus, c)};
                        },
                        [&](const TorusRotation&) -> Observable { return TrigPolynomial{{{0, {c, 0.0}}}}; },
                        [&](const BernoulliShift&) -> Observable { return Cylinder{0, {c, c}}; },
                    },
                    system);
}

AverageValue ergodic_average(const System& system, const Observable& f, const DigitSpec& spec, Index prefix) {
  if (prefix < 1) throw DomainError("ergodic average needs N >= 1");
  return window_average(system, f, spec, 0, prefix);
}

AverageValue uniform_window_average(const System& system, const Observable& f, const DigitSpec& spec, Index first,
                                    Index last) {
  if (first >= last) throw DomainError("uniform window average needs M < N");
  return window_average(system, f, spec, first, last);
}

AverageValue spectral_prediction(const System& system, const Observable& f, const DigitSpec& spec, Index prefix) {
  spec.require_zero_digit("spectral prediction");
  check_system(system);
  if (prefix < 1) throw DomainError("spectral prediction needs N >= 1");
  return std::visit(
      overloaded{
          [&](const CyclicRotation& s) -> AverageValue {
            const auto& g = cyclic_observable(system, f);
            const auto m = s.modulus;
            // f = sum_j fhat(j) e_j with e_j(x) = e^{2 pi i j x / m}; T e_j = e^{2 pi i j r / m} e_j.
            std::vector<std::complex<double>> fhat(m);
            for (std::uint64_t j = 0; j < m; ++j) {
              std::complex<double> acc;
              for (std::uint64_t x = 0; x < m; ++x)
                acc += g.values[x] * std::conj(unit(Frequency::rational(static_cast<std::int64_t>(j), m).turns(x)));
              fhat[j] = acc / static_cast<double>(m);
            }
            std::map<std::pair<std::int64_t, std::uint64_t>, std::complex<double>> gamma;
            std::vector<std::complex<double>> weight(m);
            for (std::uint64_t j = 0; j < m; ++j) {
              const auto r = Frequency::rational(static_cast<std::int64_t>(j), m).scaled(static_cast<std::int64_t>(s.step % m));
              const auto key = std::make_pair(r.numerator(), r.denominator());
              auto it = gamma.find(key);
              if (it == gamma.end())
                it = gamma.emplace(key, spectral_coefficient(spec, key.first, key.second, prefix)).first;
              weight[j] = it->second * fhat[j];
            }
            IndicatorVector out;
            out.values.resize(m);
            for (std::uint64_t x = 0; x < m; ++x) {
              std::complex<double> acc;
              for (std::uint64_t j = 0; j < m; ++j)
                acc += weight[j] * unit(Frequency::rational(static_cast<std::int64_t>(j), m).turns(x));
              out.values[x] = acc.real();
            }
            return out;
          },
          [&](const TorusRotation& s) -> AverageValue {
            const auto& p = torus_polynomial(f);
            TrigPolynomial out;
            for (const auto& [m, c] : p.coeffs) {
              if (m == 0 || c == std::complex<double>{}) {
                out.coeffs[m] = c;
                continue;
              }
              if (!s.alpha.is_rational())
                throw DomainError("spectral prediction on an irrational rotation is defined only for constant f");
              const auto r = s.alpha.scaled(m);
              out.coeffs[m] = c * spectral_coefficient(spec, r.numerator(), r.denominator(), prefix);
            }
            return out;
          },
          [&](const BernoulliShift&) -> AverageValue {
            throw DomainError("spectral prediction needs a cyclic or rational torus rotation");
          },
      },
      system);
}

AverageValue progression_average(const System& system, const Observable& f, const DigitSpec& spec, Index start,
                                 unsigned i, Index prefix) {
  spec.require_zero_digit("progression averages");
  check_system(system);
  const u128 block = checked_pow(spec.radix(), i);
  if (start >= prefix) throw DomainError("progression has no terms below N");
  const Index step = narrow_u64(block);
  const Index offset = start % step;  // j
  const Index first = start / step;   // u0
  const Index last = (prefix - offset + step - 1) / step;
  const Element shift = unrank(spec, offset);          // k_j
  const u128 scale = checked_pow(spec.base(), i);      // b^i
  return std::visit(
      overloaded{
          [&](const CyclicRotation& s) -> AverageValue {
            const auto& g = cyclic_observable(system, f);
            const auto m = s.modulus;
            const CyclicRotation rescaled{m, static_cast<std::uint64_t>((static_cast<u128>(s.step % m) * (scale % m)) % m)};
            const auto inner = cyclic_window(rescaled, g, spec, first, last);
            const auto move = static_cast<std::uint64_t>((static_cast<u128>(s.step % m) * (shift % m)) % m);
            IndicatorVector out;
            out.values.resize(m);
            for (std::uint64_t x = 0; x < m; ++x) out.values[x] = inner.values[(x + move) % m];
            return out;
          },
          [&](const TorusRotation& s) -> AverageValue {
            TrigPolynomial out;
            for (const auto& [m, c] : torus_polynomial(f).coeffs)
              out.coeffs[m] = c * torus_phase(s.alpha, m, shift) * torus_mean(spec, s.alpha, first, last, m, scale);
            return out;
          },
          [&](const BernoulliShift&) -> AverageValue {
            std::vector<Element> shifts;
            CantorOdometer odo(spec, first);
            for (Index u = first; u < last; ++u) {
              shifts.push_back(checked_add(checked_mul(scale, odo.value()), shift));
              if (u + 1 < last) odo.advance();
            }
            return bernoulli_profile(bernoulli_cylinder(f), shifts);
          },
      },
      system);
}

RecurrenceValue multi_recurrence_average(const System& system, const Observable& f, const DigitSpec& spec,
                                         unsigned ell, Index prefix, Element min_step) {
  spec.require_zero_digit("recurrence averages");
  check_system(system);
  if (ell < 1) throw DomainError("recurrence average needs ell >= 1");
  if (prefix < 1) throw DomainError("recurrence average needs N >= 1");
  const Index first = std::min(first_index_at_least(spec, min_step), prefix);
  if (first >= prefix) throw DomainError("no index below N has k_n >= the minimum step");
  RecurrenceValue out;
  out.terms = prefix - first;
  std::visit(
      overloaded{
          [&](const CyclicRotation& s) {
            const auto& g = cyclic_observable(system, f);
            require_unit_interval(g.values);
            const auto m = s.modulus;
            const auto dist = residue_window(spec, m, first, prefix);
            std::vector<Rational> values(m);
            for (std::uint64_t x = 0; x < m; ++x) values[x] = exact(g.values[x]);
            Rational total = 0;
            for (std::uint64_t a = 0; a < m; ++a) {
              if (dist.counts[a] == 0) continue;
              const auto move = static_cast<std::uint64_t>((static_cast<u128>(a) * (s.step % m)) % m);
              Rational state_sum = 0;
              for (std::uint64_t x = 0; x < m; ++x) {
                Rational product = 1;
                for (unsigned j = 0; j < ell && product != 0; ++j)
                  product *= values[static_cast<std::size_t>((static_cast<u128>(x) + static_cast<u128>(j) * move) % m)];
                state_sum += product;
              }
              total += Rational(dist.counts[a]) * state_sum / Rational(m);
            }
            out.exact = total / Rational(out.terms);
          },
          [&](const TorusRotation& s) {
            const auto* arcf = std::get_if<ArcIndicator>(&f);
            if (!arcf) throw DomainError("torus recurrence averages need an arc indicator observable");
            if (!(arcf->lo >= 0.0 && arcf->lo < 1.0 && arcf->hi >= arcf->lo && arcf->hi - arcf->lo <= 1.0))
              throw DomainError("arc must satisfy 0 <= lo < 1 and 0 <= hi - lo <= 1");
            double sum = 0.0, comp = 0.0;
            CantorOdometer odo(spec, first);
            for (Index n = first; n < prefix; ++n) {
              const double v = arc_recurrence(*arcf, s.alpha, ell, odo.value()) - comp;
              const double t = sum + v;
              comp = (t - sum) - v;
              sum = t;
              if (n + 1 < prefix) odo.advance();
            }
            out.value = sum / static_cast<double>(out.terms);
          },
          [&](const BernoulliShift&) {
            const auto& g = bernoulli_cylinder(f);
            require_unit_interval(g.table);
            const Rational mean = cylinder_mean(g);
            Rational disjoint = 1;
            for (unsigned j = 0; j < ell; ++j) disjoint *= mean;
            const unsigned width = 2 * g.half_width + 1;
            std::map<unsigned, std::uint64_t> small;  // k -> count, for k < width
            std::uint64_t large = 0;
            CantorOdometer odo(spec, first);
            for (Index n = first; n < prefix; ++n) {
              const Element k = odo.value();
              if (k < width) ++small[static_cast<unsigned>(k)];
              else ++large;
              if (k >= width && n + 1 < prefix) {
                large += prefix - n - 1;  // k_n is increasing
                break;
              }
              if (n + 1 < prefix) odo.advance();
            }
            Rational total = Rational(large) * disjoint;
            for (const auto& [k, count] : small) total += Rational(count) * bernoulli_recurrence(g, ell, k, disjoint);
            out.exact = total / Rational(out.terms);
          },
      },
      system);
  if (out.exact) out.value = to_double(*out.exact);
  return out;
}

Observable apply_map(const System& system, const Observable& f) {
  check_system(system);
  return std::visit(
      overloaded{
          [&](const CyclicRotation& s) -> Observable {
            const auto& g = cyclic_observable(system, f);
            const auto m = s.modulus;
            IndicatorVector out;
            out.values.resize(m);
            for (std::uint64_t x = 0; x < m; ++x)
              out.values[x] = g.values[static_cast<std::size_t>((static_cast<u128>(x) + s.step % m) % m)];
            return out;
          },
          [&](const TorusRotation& s) -> Observable {
            if (const auto* a = std::get_if<ArcIndicator>(&f)) {
              double lo = a->lo - s.alpha.turns(1);
              lo -= std::floor(lo);
              if (lo >= 1.0) lo = 0.0;
              return ArcIndicator{lo, lo + (a->hi - a->lo)};
            }
            TrigPolynomial out;
            for (const auto& [m, c] : torus_polynomial(f).coeffs) out.coeffs[m] = c * torus_phase(s.alpha, m, 1);
            return out;
          },
          [&](const BernoulliShift&) -> Observable {
            // f o sigma reads omega_{1-w..1+w}: positions 2..2w+2 of a window of half-width w+1.
            const auto& g = bernoulli_cylinder(f);
            const unsigned w = g.half_width;
            const std::uint64_t mask = (std::uint64_t{1} << (2 * w + 1)) - 1;
            Cylinder out{w + 1, std::vector<double>(std::size_t{1} << (2 * w + 3))};
            for (std::uint64_t u = 0; u < out.table.size(); ++u) out.table[u] = g.table[(u >> 2) & mask];
            return out;
          },
      },
      system);
}

std::vector<double> pushforward_uniform(const CyclicRotation& system) {
  if (system.modulus < 1) throw DomainError("cyclic rotation needs m >= 1");
  const auto m = system.modulus;
  std::vector<double> out(m, 0.0);
  const double mass = 1.0 / static_cast<double>(m);
  for (std::uint64_t x = 0; x < m; ++x) out[(x + system.step % m) % m] += mass;
  return out;
}

VdcResult vdc_check(std::span<const std::complex<double>> sequence, std::size_t window) {
  const std::size_t n = sequence.size();
  if (n == 0) throw DomainError("van der Corput check needs a non-empty sequence");
  if (window < 1 || window > n) throw DomainError("van der Corput check needs 1 <= H <= N");
  std::vector<double> re(n), im(n);
  std::complex<double> mean;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(sequence[j]) > 1.0 + 1e-12) throw DomainError("van der Corput check needs |a_j| <= 1");
    re[j] = sequence[j].real();
    im[j] = sequence[j].imag();
    mean += sequence[j];
  }
  mean /= static_cast<double>(n);
  VdcResult out;
  out.lhs = std::norm(mean);
  double correlations = 0.0;
  for (std::size_t h = 1; h <= window; ++h) {
    if (h == n) continue;  // empty inner average
    correlations += std::abs(kernels::autocorrelation(re, im, h)) / static_cast<double>(n - h);
  }
  const double hw = static_cast<double>(window);
  out.rhs = correlations / hw + 1.0 / hw + hw / static_cast<double>(n);
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

Index first_index_at_least(const DigitSpec& spec, Element value) {
  if (value == 0) return 0;
  Index hi = 1;
  while (unrank(spec, hi) < value) {
    if (hi > (UINT64_MAX >> 1)) throw RangeError("index search exceeds 64 bits");
    hi <<= 1;
  }
  Index lo = 0;  // unrank(lo) < value <= unrank(hi) once lo is probed
  if (unrank(spec, 0) >= value) return 0;
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    if (unrank(spec, mid) < value) lo = mid;
    else hi = mid;
  }
  return hi;
}

}  // namespace crl
