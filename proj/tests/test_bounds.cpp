#include <cmath>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "tdi/bounds.hpp"
#include "tdi/errors.hpp"

using namespace tdi;
using std::numbers::pi;

namespace {

cplx e_of(double x) { return std::polar(1.0, 2 * pi * (x - std::nearbyint(x))); }

// Second/third derivative by Richardson-extrapolated central differences.
double fd2(const std::function<double(double)>& f, double x, double h) {
  auto d = [&](double s) { return (f(x + s) - 2 * f(x) + f(x - s)) / (s * s); };
  return (4 * d(h / 2) - d(h)) / 3;
}
double fd3(const std::function<double(double)>& f, double x, double h) {
  auto d = [&](double s) {
    return (f(x + 2 * s) - 2 * f(x + s) + 2 * f(x - s) - f(x - 2 * s)) / (2 * s * s * s);
  };
  return (4 * d(h / 2) - d(h)) / 3;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("van der Corput k = 2 against the exact quadratic sum") {
  const double beta = 0.31;
  PhaseFunction f{[=](double x) { return beta * x * x; }, [=](double) { return 2 * beta; }};
  const BoundReport r = vdc_check(f, 0, 1000, 2, 2 * beta);
  // 0.31 n^2 mod 1 depends on n^2 mod 100 only; 1000 = 10 periods.
  cplx period = 0;
  for (int n = 1; n <= 100; ++n) period += e_of(31.0 * ((n * n) % 100) / 100.0);
  CHECK(r.lhs == doctest::Approx(std::abs(10.0 * period)).epsilon(1e-9));
  CHECK(r.rhs == doctest::Approx(1000 * std::sqrt(2 * beta) + 1 / std::sqrt(2 * beta)));
  CHECK(r.ratio == doctest::Approx(r.lhs / r.rhs));
  CHECK(r.ratio < 1.0);
  CHECK(r.verdict == Verdict::holds);
}

TEST_CASE("van der Corput regime checks") {
  PhaseFunction zero{[](double) { return 0.0; }, [](double) { return 0.0; }};
  CHECK_THROWS_AS(vdc_check(zero, 0, 100, 2, 0.0), RegimeError);
  CHECK_THROWS_AS(vdc_check(zero, 0, 100, 2, 1.0), RegimeError);
  PhaseFunction quartic{[](double x) { return 1e-8 * x * x * x * x; },
                        [](double x) { return 1.2e-7 * x * x; }};
  CHECK_THROWS_AS(vdc_check(quartic, 1, 100, 2, 1e-4), RegimeError);
  PhaseFunction quad{[](double x) { return 0.01 * x * x; }, [](double) { return 0.02; }};
  CHECK_THROWS_AS(vdc_check(quad, 0, 100, 2, 5.0), RegimeError);
}

TEST_CASE("van der Corput k = 3 on a cubic") {
  PhaseFunction f{[](double x) { return 1e-6 * x * x * x; }, [](double) { return 6e-6; }};
  const BoundReport r = vdc_check(f, 0, 100, 3, 6e-6);
  long double re = 0, im = 0;
  for (int n = 1; n <= 100; ++n) {
    const long double ph = 2 * std::numbers::pi_v<long double> * 1e-6L * n * n * n;
    re += std::cos(ph);
    im += std::sin(ph);
  }
  CHECK(r.lhs == doctest::Approx(static_cast<double>(std::hypot(re, im))).epsilon(1e-12));
  const double K = 4;
  const double rhs = 100 * std::pow(6e-6, 1 / (2 * K - 2)) +
                     std::pow(100.0, 1 - 2 / K) * std::pow(6e-6, -1 / (2 * K - 2));
  CHECK(r.rhs == doctest::Approx(rhs));
  // Measured constant; the phase is nearly linear on (0, 100] so the sum is
  // long and the bound needs a factor below 10.
  CHECK(r.ratio < r.constant);
  CHECK(r.verdict != Verdict::violated);
}

TEST_CASE("shift inequality on simple inputs") {
  for (long N : {1L, 5L, 40L}) {
    std::vector<cplx> ones(N, cplx(1, 0));
    const BoundReport r = weyl_vdc_check(ones, 1);
    CHECK(r.lhs == doctest::Approx(N * N));
    CHECK(r.rhs == doctest::Approx((1.0 + N) * N));
    CHECK(r.verdict == Verdict::holds);
  }
  std::vector<cplx> zeros(17);
  const BoundReport z = weyl_vdc_check(zeros, 4);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.verdict == Verdict::holds);
  CHECK_THROWS_AS(weyl_vdc_check(zeros, 0), ConstraintError);
}

TEST_CASE("shift inequality on random sequences") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> len(1, 200);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = len(rng);
    std::uniform_int_distribution<long> qd(1, n);
    std::vector<cplx> a(n);
    for (auto& z : a) z = {g(rng), g(rng)};
    const long Q = qd(rng);
    const BoundReport r = weyl_vdc_check(a, Q);
    CHECK(r.lhs <= r.rhs + 1e-9 * std::max(r.lhs, r.rhs));
    CHECK(r.verdict == Verdict::holds);
    // Independent evaluation of the right side over both signs of q.
    std::complex<long double> corr = 0;
    for (long q = -Q; q <= Q; ++q) {
      std::complex<long double> s = 0;
      for (long k = 0; k < n; ++k)
        if (k + q >= 0 && k + q < n)
          s += std::complex<long double>(a[k + q]) * std::conj(std::complex<long double>(a[k]));
      corr += (1.0L - std::abs(q) / static_cast<long double>(Q)) * s;
    }
    const long double rhs = (1.0L + static_cast<long double>(n) / Q) * corr.real();
    CHECK(r.rhs == doctest::Approx(static_cast<double>(rhs)).epsilon(1e-10));
  }
}

TEST_CASE("mean value of S on tiny tables") {
  const PrimeTable one = table_from_primes({101}, 150.0, 1.02);
  const BoundReport r1 = l2_s_integral(one, 2.5);
  CHECK(r1.lhs == doctest::Approx(2 * 2.5 * std::log(101.0) * std::log(101.0)).epsilon(1e-15));
  const PrimeTable two = table_from_primes({101, 103}, 150.0, 1.02);
  std::vector<double> w{std::log(101.0), std::log(103.0)};
  const double closed = l2_closed_form(two, w, 2.5);
  const QuadResult q = l2_quadrature(two, w, 2.5);
  CHECK(std::abs(q.value - closed) / closed < 1e-6);
  CHECK(l2_closed_form_serial(two, w, 2.5) == closed);
}

TEST_CASE("mean value of V on tiny tables") {
  const PrimeTable one = table_from_primes({101}, 150.0, 1.02);
  const CupFunction f = make_cup(0.3, 5);
  CHECK(l2_v_integral(one, f, 2.0, 0).lhs == 0.0);
  const BoundReport r = l2_v_integral(one, f, 2.0, 1);
  const double quad = r.parameters["quadrature"].get<double>();
  CHECK(std::abs(quad - r.lhs) / r.lhs < 1e-6);
  const double g1 = fourier_coeff(f, 1);
  const double frac = one.entries[0].sqrt_frac;
  const double expect = 2 * 2.0 * std::pow(2 * g1 * std::cos(2 * pi * frac) * std::log(101.0), 2);
  CHECK(r.lhs == doctest::Approx(expect).epsilon(1e-13));
  CHECK(r.lhs <= 8 * 2.0 * g1 * g1 * std::pow(std::log(101.0), 2));
}

TEST_CASE("mean values on a real table") {
  const Params p = derive_params(1.02, 1.028, 0.001, N_for_X(800.0, 1.02), 2.0, 0.25);
  const PrimeTable t = build_table(p);
  const BoundReport s = l2_s_integral(t, p.P);
  CHECK(s.parameters["relative_difference"].get<double>() < kL2AgreementTol);
  CHECK(s.rhs == doctest::Approx(p.P * t.X * std::pow(std::log(t.X), 3)));
  const CupFunction f = make_cup(p.Y, p.r);
  const BoundReport v = l2_v_integral(t, f, p.P, default_m_max(f));
  CHECK(v.parameters["relative_difference"].get<double>() < kL2AgreementTol);
  CHECK(v.rhs == doctest::Approx(p.P * t.X * std::pow(std::log(t.X), 5)));
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) w[i] = t.entries[i].logp;
  CHECK(l2_closed_form(t, w, p.P) == l2_closed_form_serial(t, w, p.P));
}

TEST_CASE("Q choice") {
  // P = 1, c = 1: floor(X^(3/8)); 2^16 lands exactly on 64.
  CHECK(q_choice(65536.0, 1.0, 1.0).Q == 64);
  CHECK(q_choice(1e6, 1.0, 1.0).Q == static_cast<long>(std::floor(std::pow(1e6, 0.375))));
  const QChoice q = q_choice(1e6, 1.02, 10.0);
  using big = boost::multiprecision::cpp_bin_float_100;
  const big raw = pow(big(10), big(-3) / 4) * pow(big(1e6), (big(9) - 6 * big(1.02)) / 8);
  CHECK(q.Q == static_cast<long>(floor(raw)));
  CHECK(q.Q == 25);
  CHECK(q.within_envelope);
  CHECK_FALSE(q.degenerate);
  CHECK(q_choice(100.0, 1.02, 1e6).degenerate);
  const Params p = derive_params(1.02, 1.028, 0.001, N_for_X(1e8, 1.02), 2.0, 0.25);
  CHECK(q_choice(p).within_envelope);
}

TEST_CASE("max of V over a symmetric grid") {
  const Params p = derive_params(1.02, 1.028, 0.001, N_for_X(3000.0, 1.02), 2.0, 0.25);
  const PrimeTable t = build_table(p);
  const CupFunction f = make_cup(p.Y, p.r);
  for (int pts : {2, 51, 100}) {
    const BoundReport r = vmax_scan(t, f, p.P, pts);
    const double v0 = std::abs(v_alpha(t, 0.0, f, default_m_max(f)).value);
    CHECK(r.lhs >= v0);
    CHECK(r.parameters["v_at_zero"].get<double>() == doctest::Approx(v0));
    CHECK(r.lhs <= r.parameters["absolute_envelope"].get<double>());
    CHECK(r.rhs == doctest::Approx(vmax_rhs(t.X, t.c, p.P, p.M)));
  }
  CHECK_THROWS_AS(vmax_scan(t, f, p.P, 1), ConstraintError);
}

TEST_CASE("phase derivatives against finite differences") {
  PhaseProbe p;
  p.alpha = 0.013;
  p.m = 3;
  p.d = 3;
  p.q = 2;
  p.c = 1.02;
  p.l_lo = 150;
  p.l_hi = 300;
  for (double l : {160.0, 225.0, 290.0}) {
    const PhaseDerivatives d = phase_derivatives(p, l);
    PhaseProbe only_power = p, only_root = p;
    only_power.m = 0;
    only_root.alpha = 0;
    auto f = [&](const PhaseProbe& q) { return [&q](double x) { return phase_f(q, x); }; };
    auto g = [&](const PhaseProbe& q) { return [&q](double x) { return phase_g(q, x); }; };
    CHECK(d.gamma1 == doctest::Approx(fd2(f(only_power), l, 0.5)).epsilon(1e-4));
    CHECK(-d.gamma2 == doctest::Approx(fd2(f(only_root), l, 0.5)).epsilon(1e-4));
    CHECK(d.f2 == doctest::Approx(fd2(f(p), l, 0.5)).epsilon(1e-4));
    CHECK(d.f3 == doctest::Approx(fd3(f(p), l, 0.5)).epsilon(1e-4));
    CHECK(d.g2 == doctest::Approx(fd2(g(p), l, 0.5)).epsilon(1e-4));
    CHECK(d.g3 == doctest::Approx(fd3(g(p), l, 0.5)).epsilon(1e-4));
    CHECK(d.psi1 == doctest::Approx(fd2(g(only_power), l, 0.5)).epsilon(1e-4));
  }
}

TEST_CASE("regime classification") {
  PhaseProbe p;
  p.m = 4;
  p.d = 5;
  p.c = 1.02;
  p.l_lo = 100;
  p.l_hi = 200;
  p.alpha = 0;
  const RegimeReport zero = phase_regime(p);
  CHECK(zero.at_mid.gamma1 == 0.0);
  CHECK(zero.ratio == 0.0);
  CHECK(zero.regime == "sqrt-dominated");
  p.alpha = 1e-3;
  const double r1 = phase_regime(p).ratio;
  p.alpha = 3e-3;
  CHECK(phase_regime(p).ratio == doctest::Approx(3 * r1).epsilon(1e-12));
  p.alpha = 10.0;
  CHECK(phase_regime(p).regime == "power-dominated");
  p.alpha = 1e-3 / r1;  // ratio 1
  CHECK(phase_regime(p).regime == "comparable-cancelling");
  p.alpha = -p.alpha;
  CHECK(phase_regime(p).regime == "comparable-reinforcing");
}

}  // TEST_SUITE
