#include <doctest.h>

#include <random>

#include "crl/dynamics.hpp"
#include "crl/equidist.hpp"
#include "oracles.hpp"

using namespace crl;

namespace {

const DigitSpec kCantor(3, {0, 2});
const std::vector<DigitSpec> kSpecs = {DigitSpec(3, {0, 2}), DigitSpec(4, {0, 3}), DigitSpec(5, {0, 2, 4}),
                                       DigitSpec(10, {0, 1, 8})};

std::vector<std::uint64_t> ks_range(const DigitSpec& s, Index first, Index last) {
  std::vector<std::uint64_t> out;
  CantorOdometer odo(s, first);
  for (Index n = first; n < last; ++n, odo.advance()) out.push_back(static_cast<std::uint64_t>(odo.value()));
  return out;
}

const std::vector<double>& values(const AverageValue& v) { return std::get<IndicatorVector>(v).values; }

double sup_distance(const AverageValue& a, const AverageValue& b) {
  double d = 0;
  for (std::size_t x = 0; x < values(a).size(); ++x) d = std::max(d, std::abs(values(a)[x] - values(b)[x]));
  return d;
}

// E_{n in ks} f(x + k r) for every x
std::vector<double> cyclic_oracle(const std::vector<double>& f, std::uint64_t r, const std::vector<std::uint64_t>& ks) {
  const std::uint64_t m = f.size();
  std::vector<double> out(m, 0);
  for (std::uint64_t x = 0; x < m; ++x) {
    double sum = 0;
    for (auto k : ks) sum += f[(x + (k % m) * r) % m];
    out[x] = sum / ks.size();
  }
  return out;
}

}  // namespace

TEST_CASE("ergodic_average on a cyclic rotation: examples") {
  const System sys = CyclicRotation{3, 1};
  const auto avg = ergodic_average(sys, IndicatorVector::of_set(3, {0}), kCantor, 1024);
  CHECK(values(avg) == std::vector<double>{0.5, 0.5, 0.0});
  const auto pred = spectral_prediction(sys, IndicatorVector::of_set(3, {0}), kCantor, 1024);
  CHECK(sup_distance(avg, pred) < 1e-6);
}

TEST_CASE("constant observables average to the constant") {
  for (const System& sys : {System{CyclicRotation{5, 2}}, System{TorusRotation{Frequency::parse("sqrt2")}},
                            System{TorusRotation{Frequency::parse("1/3")}}, System{BernoulliShift{}}}) {
    const auto f = constant_observable(sys, 1.0);
    const auto avg = ergodic_average(sys, f, kCantor, 500);
    if (auto* v = std::get_if<IndicatorVector>(&avg)) {
      for (double x : v->values) CHECK(x == 1.0);
    } else if (auto* t = std::get_if<TrigPolynomial>(&avg)) {
      CHECK(t->coeffs.size() == 1);
      CHECK(t->coeffs.at(0) == std::complex<double>(1, 0));
    } else {
      const auto& p = std::get<BernoulliProfile>(avg);
      CHECK(p.mean == 1);
      CHECK(p.deviation_sq == 0);
    }
    if (!std::holds_alternative<BernoulliShift>(sys)) {
      const auto pred = spectral_prediction(sys, f, kCantor, 500);
      if (auto* v = std::get_if<IndicatorVector>(&pred))
        for (double x : v->values) CHECK(x == doctest::Approx(1.0));
    }
    CHECK(multi_recurrence_average(sys, std::holds_alternative<TorusRotation>(sys) ? Observable{ArcIndicator{0, 1}} : f,
                                   kCantor, 3, 200)
              .value == doctest::Approx(1.0));
  }
}

TEST_CASE("torus rotation averages go through Weyl sums") {
  const System sys = TorusRotation{Frequency::parse("sqrt2")};
  TrigPolynomial f;
  f.coeffs[1] = 1;
  const auto avg = std::get<TrigPolynomial>(ergodic_average(sys, f, kCantor, 1 << 16));
  CHECK(std::abs(avg.coeffs.at(1)) < 0.05);
  CHECK(std::abs(avg.coeffs.at(1)) ==
        doctest::Approx(weyl_sum(kCantor, Frequency::parse("sqrt2"), 1 << 16).modulus).epsilon(1e-9));
  CHECK_THROWS_AS(spectral_prediction(sys, f, kCantor, 100), DomainError);

  TrigPolynomial g;
  g.coeffs[-2] = {0.5, 0.25};
  g.coeffs[3] = 2;
  const auto gavg = std::get<TrigPolynomial>(ergodic_average(sys, g, kCantor, 3000));
  const auto ks = ks_range(kCantor, 0, 3000);
  for (const auto& [m, c] : g.coeffs) {
    const auto expected = c * oracle::weyl_direct(ks, std::sqrt(2.0) * m);
    CHECK(std::abs(gavg.coeffs.at(m) - expected) < 1e-6);
  }
}

TEST_CASE("rational torus rotation: alpha = 1/2 fixes e^{2 pi i x}") {
  const System sys = TorusRotation{Frequency::parse("1/2")};
  TrigPolynomial f;
  f.coeffs[1] = 1;
  const auto pred = std::get<TrigPolynomial>(spectral_prediction(sys, f, kCantor, 1000));
  CHECK(std::abs(pred.coeffs.at(1) - std::complex<double>(1, 0)) < 1e-12);
  const auto avg = std::get<TrigPolynomial>(ergodic_average(sys, f, kCantor, 1000));
  CHECK(std::abs(avg.coeffs.at(1) - std::complex<double>(1, 0)) < 1e-12);
}

TEST_CASE("property: ergodic average vs spectral prediction, cyclic m <= 24") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& s : kSpecs) {
    const Index N = static_cast<Index>(checked_pow(s.radix(), 8));
    for (std::uint64_t m = 1; m <= 24; ++m) {
      const System sys = CyclicRotation{m, 1 + rng() % m};
      IndicatorVector f;
      for (std::uint64_t x = 0; x < m; ++x) f.values.push_back(u(rng));
      const auto avg = ergodic_average(sys, f, s, N);
      REQUIRE(sup_distance(avg, spectral_prediction(sys, f, s, N)) < 0.02);
      const auto oracle = cyclic_oracle(f.values, std::get<CyclicRotation>(sys).step, ks_range(s, 0, N));
      for (std::uint64_t x = 0; x < m; ++x) REQUIRE(values(avg)[x] == doctest::Approx(oracle[x]).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: measure preservation and T-equivariance (cyclic)") {
  for (std::uint64_t m = 1; m <= 24; ++m)
    for (std::uint64_t r = 0; r < m; ++r) {
      const CyclicRotation c{m, r};
      CHECK(pushforward_uniform(c) == std::vector<double>(m, 1.0 / static_cast<double>(m)));
      const System sys = c;
      IndicatorVector f;
      for (std::uint64_t x = 0; x < m; ++x) f.values.push_back(static_cast<double>((x * 7 + 3) % 5) / 4.0);
      const auto lhs = ergodic_average(sys, apply_map(sys, f), kCantor, 777);
      const auto rhs = apply_map(sys, std::get<IndicatorVector>(ergodic_average(sys, f, kCantor, 777)));
      REQUIRE(values(lhs) == std::get<IndicatorVector>(rhs).values);
    }
}

TEST_CASE("uniform_window_average") {
  const auto bern = std::get<BernoulliProfile>(
      uniform_window_average(BernoulliShift{}, Cylinder::coordinate(), kCantor, 1 << 8, 1 << 12));
  CHECK(bern.mean == Rational(1, 2));
  CHECK(bern.deviation_sq == Rational(1, 4 * ((1 << 12) - (1 << 8))));
  const System sys = CyclicRotation{3, 1};
  const auto f = IndicatorVector::of_set(3, {0});
  const auto a = uniform_window_average(sys, f, kCantor, 0, 1 << 12);
  const auto b = uniform_window_average(sys, f, kCantor, 1 << 12, 1 << 13);
  CHECK(sup_distance(a, b) < 0.05);
  CHECK(values(b) == cyclic_oracle(f.values, 1, ks_range(kCantor, 1 << 12, 1 << 13)));
  CHECK_THROWS_AS(uniform_window_average(sys, f, kCantor, 5, 5), DomainError);
}

TEST_CASE("progression_average") {
  const System sys = CyclicRotation{3, 1};
  const auto f = IndicatorVector::of_set(3, {0});
  CHECK(values(progression_average(sys, f, kCantor, 0, 0, 1024)) == values(ergodic_average(sys, f, kCantor, 1024)));
  // odd n: low digit 2, so k_n = 2 mod 3 and f(x + k_n) = 1 exactly at x = 1
  const auto odd = progression_average(sys, f, kCantor, 1, 1, 1024);
  CHECK(values(odd) == std::vector<double>{0.0, 1.0, 0.0});
  for (const auto& s : kSpecs)
    for (unsigned i : {0u, 1u, 2u, 3u})
      for (Index start : {Index{0}, Index{1}, Index{5}}) {
        const Index step = static_cast<Index>(checked_pow(s.radix(), i));
        std::vector<std::uint64_t> ks;
        for (Index n = start; n < 2000; n += step) ks.push_back(static_cast<std::uint64_t>(unrank(s, n)));
        const CyclicRotation c{7, 3};
        IndicatorVector g{{0.1, 0.9, 0.3, 0.0, 1.0, 0.5, 0.25}};
        const auto got = values(progression_average(c, g, s, start, i, 2000));
        const auto expected = cyclic_oracle(g.values, 3, ks);
        for (std::size_t x = 0; x < 7; ++x) REQUIRE(got[x] == doctest::Approx(expected[x]).epsilon(1e-12));

        TrigPolynomial t;
        t.coeffs[1] = 1;
        t.coeffs[-3] = {0, 0.5};
        const auto tav = std::get<TrigPolynomial>(
            progression_average(TorusRotation{Frequency::parse("golden")}, t, s, start, i, 2000));
        for (const auto& [m, c0] : t.coeffs)
          REQUIRE(std::abs(tav.coeffs.at(m) - c0 * oracle::weyl_direct(ks, Frequency::parse("golden").approx() * m)) <
                  1e-6);
        const auto bp =
            std::get<BernoulliProfile>(progression_average(BernoulliShift{}, Cylinder::coordinate(), s, start, i, 2000));
        REQUIRE(bp.mean == Rational(1, 2));
      }
}

TEST_CASE("multi_recurrence_average: Bernoulli examples") {
  const auto v = multi_recurrence_average(BernoulliShift{}, Cylinder::coordinate(), kCantor, 3, 1024);
  REQUIRE(v.exact);
  CHECK(*v.exact == Rational(1, 8) * Rational(1023, 1024) + Rational(1, 2) * Rational(1, 1024));
  Cylinder g{1, {0, 0.25, 0.5, 1, 0.75, 0.125, 1, 0.5}};
  Rational mean = 0;
  for (double x : g.table) mean += Rational(x);
  mean /= 8;
  CHECK(*multi_recurrence_average(BernoulliShift{}, g, kCantor, 1, 300).exact == mean);
}

TEST_CASE("property: Bernoulli recurrence matches coordinate enumeration") {
  std::mt19937_64 rng(23);
  for (unsigned w : {0u, 1u}) {
    std::vector<double> table(std::size_t{1} << (2 * w + 1));
    std::vector<oracle::Rational> rtable;
    for (auto& x : table) {
      x = static_cast<double>(rng() % 9) / 8.0;
      rtable.push_back(oracle::Rational(x));
    }
    const Cylinder g{w, table};
    for (const auto& s : kSpecs)
      for (unsigned ell : {1u, 2u, 3u, 4u}) {
        const Index N = 40;
        const auto ks = ks_range(s, 0, N);
        oracle::Rational expected = 0;
        for (auto k : ks) expected += oracle::bernoulli_product(rtable, w, ell, k);
        expected /= N;
        const auto got = multi_recurrence_average(BernoulliShift{}, g, s, ell, N);
        REQUIRE(got.exact);
        REQUIRE(*got.exact == expected);
      }
  }
}

TEST_CASE("property: Bernoulli ergodic profile matches pairwise covariance") {
  const Cylinder g{1, {0, 0.25, 0.5, 1, 0.75, 0.125, 1, 0.5}};
  std::vector<oracle::Rational> rt;
  for (double x : g.table) rt.push_back(oracle::Rational(x));
  for (const auto& s : kSpecs) {
    const Index N = 30;
    const auto ks = ks_range(s, 0, N);
    oracle::Rational mean = 0;
    for (const auto& x : rt) mean += x;
    mean /= rt.size();
    // E|A - mean|^2 = N^-2 sum_{n,n'} (E[g(T^k g) g(T^k')] - mean^2)
    oracle::Rational var = 0;
    for (auto k1 : ks)
      for (auto k2 : ks) {
        const auto lo = std::min(k1, k2), hi = std::max(k1, k2);
        var += (hi - lo <= 2 ? oracle::bernoulli_product(rt, 1, 2, hi - lo) : mean * mean) - mean * mean;
      }
    var /= oracle::Rational(N * N);
    const auto p = std::get<BernoulliProfile>(ergodic_average(BernoulliShift{}, g, s, N));
    CHECK(p.mean == mean);
    CHECK(p.deviation_sq == var);
  }
}

TEST_CASE("multi_recurrence_average: cyclic state sum") {
  const auto v = multi_recurrence_average(CyclicRotation{3, 1}, IndicatorVector::of_set(3, {0}), kCantor, 2, 1024);
  REQUIRE(v.exact);
  CHECK(*v.exact == Rational(1, 6));
  std::mt19937_64 rng(29);
  for (const auto& s : kSpecs)
    for (std::uint64_t m : {1u, 4u, 9u, 13u})
      for (unsigned ell : {1u, 2u, 3u}) {
        IndicatorVector f;
        std::vector<oracle::Rational> rf;
        for (std::uint64_t x = 0; x < m; ++x) {
          f.values.push_back(static_cast<double>(rng() % 5) / 4.0);
          rf.push_back(oracle::Rational(f.values.back()));
        }
        const std::uint64_t r = rng() % m;
        const auto got = multi_recurrence_average(CyclicRotation{m, r}, f, s, ell, 600);
        REQUIRE(*got.exact == oracle::cyclic_state_sum(rf, r, ell, ks_range(s, 0, 600)));
      }
}

TEST_CASE("multi_recurrence_average: torus arcs") {
  for (const char* a : {"1/5", "sqrt2"}) {
    const auto alpha = Frequency::parse(a);
    const ArcIndicator arc{0.1, 0.55};
    const auto got = multi_recurrence_average(TorusRotation{alpha}, arc, kCantor, 3, 200);
    // E_x prod_j 1_arc(x + j k alpha) on a fine grid
    const int grid = 200000;
    double expected = 0;
    for (auto k : ks_range(kCantor, 0, 200)) {
      int hits = 0;
      const double s1 = alpha.turns(k), s2 = alpha.turns(2 * static_cast<u128>(k));
      for (int g = 0; g < grid; ++g) {
        const double x = (g + 0.5) / grid;
        auto in = [&](double y) {
          y -= std::floor(y);
          return y >= arc.lo && y < arc.hi;
        };
        hits += in(x) && in(x + s1) && in(x + s2);
      }
      expected += static_cast<double>(hits) / grid;
    }
    expected /= 200;
    CHECK(got.value == doctest::Approx(expected).epsilon(1e-4));
  }
}

TEST_CASE("multi_recurrence_average errors") {
  CHECK_THROWS_AS(multi_recurrence_average(CyclicRotation{3, 1}, IndicatorVector{{0, 2, 0}}, kCantor, 2, 10),
                  DomainError);
  CHECK_THROWS_AS(multi_recurrence_average(CyclicRotation{3, 1}, IndicatorVector{{0, -0.5, 0}}, kCantor, 2, 10),
                  DomainError);
  CHECK_THROWS_AS(multi_recurrence_average(CyclicRotation{3, 1}, IndicatorVector::of_set(3, {0}), kCantor, 0, 10),
                  DomainError);
  TrigPolynomial t;
  t.coeffs[1] = 1;
  CHECK_THROWS_AS(multi_recurrence_average(TorusRotation{Frequency::parse("sqrt2")}, t, kCantor, 2, 10), DomainError);
  CHECK_THROWS_AS(
      multi_recurrence_average(CyclicRotation{3, 1}, IndicatorVector::of_set(3, {0}), DigitSpec(3, {1, 2}), 2, 10),
      DomainError);
  CHECK_THROWS_AS(multi_recurrence_average(BernoulliShift{}, Cylinder{6, std::vector<double>(1 << 13, 0.5)}, kCantor,
                                           4, 10),
                  DomainError);
}

TEST_CASE("kind mismatches are domain errors") {
  TrigPolynomial t;
  t.coeffs[1] = 1;
  CHECK_THROWS_AS(ergodic_average(CyclicRotation{3, 1}, t, kCantor, 10), DomainError);
  CHECK_THROWS_AS(ergodic_average(CyclicRotation{3, 1}, IndicatorVector{{1, 0}}, kCantor, 10), DomainError);
  CHECK_THROWS_AS(ergodic_average(BernoulliShift{}, IndicatorVector{{1, 0}}, kCantor, 10), DomainError);
  CHECK_THROWS_AS(ergodic_average(TorusRotation{}, Cylinder::coordinate(), kCantor, 10), DomainError);
  CHECK_THROWS_AS(spectral_prediction(BernoulliShift{}, Cylinder::coordinate(), kCantor, 10), DomainError);
  CHECK_THROWS_AS(ergodic_average(CyclicRotation{3, 1}, IndicatorVector::of_set(3, {0}), kCantor, 0), DomainError);
  CHECK_THROWS_AS(ergodic_average(BernoulliShift{}, Cylinder{1, {0, 1}}, kCantor, 10), DomainError);
}

TEST_CASE("vdc_check examples") {
  const std::vector<std::complex<double>> ones(100, 1.0);
  const auto c = vdc_check(ones, 4);
  CHECK(c.lhs == doctest::Approx(1.0));
  CHECK(c.holds);
  CHECK(c.rhs >= 1.0);
  std::vector<std::complex<double>> alt(100);
  for (std::size_t j = 0; j < alt.size(); ++j) alt[j] = (j % 2) ? -1.0 : 1.0;
  const auto a = vdc_check(alt, 2);
  CHECK(a.lhs == doctest::Approx(0.0));
  CHECK(a.holds);
  CHECK_THROWS_AS(vdc_check(ones, 0), DomainError);
  CHECK_THROWS_AS(vdc_check(ones, 101), DomainError);
  std::vector<std::complex<double>> big(10, 1.0);
  big[3] = 1.01;
  CHECK_THROWS_AS(vdc_check(big, 2), DomainError);
}

TEST_CASE("vdc_check against direct evaluation, random sequences") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::complex<double>> a(512);
    for (auto& z : a) z = std::polar(1.0, 2 * std::numbers::pi * u(rng));
    const auto v = vdc_check(a, 16);
    REQUIRE(v.holds);
    if (trial < 20) {
      std::complex<double> mean = 0;
      for (auto z : a) mean += z;
      mean /= 512.0;
      double rhs = 1.0 / 16 + 16.0 / 512;
      for (std::size_t h = 1; h <= 16; ++h) {
        std::complex<double> s = 0;
        for (std::size_t j = 0; j + h < 512; ++j) s += a[j + h] * std::conj(a[j]);
        rhs += std::abs(s / static_cast<double>(512 - h)) / 16;
      }
      REQUIRE(v.lhs == doctest::Approx(std::norm(mean)).epsilon(1e-9));
      REQUIRE(v.rhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("first_index_at_least") {
  CHECK(first_index_at_least(kCantor, 0) == 0);
  CHECK(first_index_at_least(kCantor, 1) == 1);
  CHECK(first_index_at_least(kCantor, 7) == 3);
  CHECK(first_index_at_least(kCantor, 8) == 3);
  CHECK(first_index_at_least(kCantor, 9) == 4);
}
