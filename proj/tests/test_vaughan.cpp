#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tdi/vaughan.hpp"

using namespace tdi;
using std::numbers::pi;

namespace {

struct Direct {
  cplx mangoldt_sum;
  cplx prime_powers;  // sum over p^k, k >= 2
};

// Lambda-weighted sum with trial-division factorization and long double phases.
Direct direct_sums(double X, double c, double alpha, long m) {
  Direct d{};
  const auto lo = static_cast<std::uint64_t>(std::floor(X / 2));
  const auto hi = static_cast<std::uint64_t>(std::floor(X));
  for (std::uint64_t n = lo + 1; n <= hi; ++n) {
    const double lam = mangoldt(n);
    if (lam == 0.0) continue;
    const long double ph = static_cast<long double>(alpha) * std::pow(static_cast<long double>(n), static_cast<long double>(c)) +
                           m * std::sqrt(static_cast<long double>(n));
    const long double red = ph - std::floor(ph);
    const cplx e = std::polar(1.0, static_cast<double>(2 * pi * red));
    d.mangoldt_sum += lam * e;
    if (std::abs(lam - std::log(static_cast<double>(n))) > 1e-12) d.prime_powers += lam * e;
  }
  return d;
}

}  // namespace

TEST_SUITE("vaughan") {

TEST_CASE("coefficients") {
  const double u = 21.5;
  CHECK(c_coeff(1, u) == 0.0);
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull})
    CHECK(c_coeff(p, u) == doctest::Approx(std::log(static_cast<double>(p))));
  CHECK(a_coeff(1, u) == 1);
  for (std::uint64_t p : {2ull, 3ull, 19ull}) CHECK(a_coeff(p, u) == 0);
}

TEST_CASE("coefficient bounds up to 1e5") {
  const double u = std::cbrt(1e5);
  for (std::uint64_t d = 1; d <= 100'000; ++d) {
    CHECK(std::abs(c_coeff(d, u)) <= std::log(static_cast<double>(d)) + 1e-12);
    CHECK(static_cast<std::uint64_t>(std::abs(a_coeff(d, u))) <= divisor_count(d));
  }
}

TEST_CASE("identity at X = 5000, alpha = 0.3, m = 2") {
  const VaughanPieces v = decompose(5000.0, 1.02, 0.3, 2);
  const Direct d = direct_sums(5000.0, 1.02, 0.3, 2);
  const double scale = std::abs(d.mangoldt_sum);
  CHECK(std::abs(v.combine(v.signs) - d.mangoldt_sum) / scale < 1e-6);
  CHECK(std::abs(v.mangoldt_sum - d.mangoldt_sum) / scale < 1e-9);
  const PrimeTable t = build_table(5000.0, 1.02);
  CHECK(std::abs(v.reconstruct() - u_alpha(t, 0.3, 2)) / std::abs(u_alpha(t, 0.3, 0)) < 1e-9);
}

TEST_CASE("Chebyshev case alpha = 0, m = 0 at X = 1000") {
  const VaughanPieces v = decompose(1000.0, 1.02, 0.0, 0);
  double psi = 0;
  for (std::uint64_t n = 501; n <= 1000; ++n) psi += mangoldt(n);
  CHECK(v.combine(v.signs).real() == doctest::Approx(psi).epsilon(1e-12));
  CHECK(std::abs(v.combine(v.signs).imag()) < 1e-9);
}

TEST_CASE("prime power correction at X = 1e4") {
  const VaughanPieces v = decompose(1e4, 1.02, 0.77, -3);
  const Direct d = direct_sums(1e4, 1.02, 0.77, -3);
  CHECK(std::abs(v.prime_power_corr + d.prime_powers) < 1e-9);
  const PrimeTable t = build_table(1e4, 1.02);
  CHECK(std::abs(u_alpha(t, 0.77, -3) - v.mangoldt_sum - v.prime_power_corr) < 1e-8);
}

TEST_CASE("sign calibration selects the frozen pattern") {
  CHECK(calibrate_vaughan_signs(1000.0, 1.02, 2024) == kVaughanSigns);
  CHECK(calibrate_vaughan_signs(3000.0, 1.05, 7) == kVaughanSigns);
}

TEST_CASE("U2 stays under the crude envelope") {
  const double X = 8000.0;
  const VaughanPieces v = decompose(X, 1.02, 0.4, 1);
  double env = 0;
  for (int d = 2; d <= static_cast<int>(std::cbrt(X)); ++d) env += std::log(d) * (X / (2 * d) + 1);
  CHECK(std::abs(v.u2) <= env);
}

}  // TEST_SUITE
