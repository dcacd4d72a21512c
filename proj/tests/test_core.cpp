#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "tdi/core.hpp"
#include "tdi/errors.hpp"

using namespace tdi;

namespace {

// Plain sieve of Eratosthenes over [0, n].
std::vector<bool> naive_sieve(std::uint64_t n) {
  std::vector<bool> prime(n + 1, true);
  prime[0] = false;
  if (n >= 1) prime[1] = false;
  for (std::uint64_t i = 2; i * i <= n; ++i)
    if (prime[i])
      for (std::uint64_t j = i * i; j <= n; j += i) prime[j] = false;
  return prime;
}

struct Naive {
  double lambda;
  int mu;
  std::uint64_t tau;
};

Naive naive_arith(std::uint64_t n) {
  std::uint64_t tau = 0;
  for (std::uint64_t d = 1; d <= n; ++d)
    if (n % d == 0) ++tau;
  std::vector<std::uint64_t> pf;
  std::uint64_t m = n;
  for (std::uint64_t p = 2; p <= m; ++p)
    while (m % p == 0) {
      pf.push_back(p);
      m /= p;
    }
  Naive out{0.0, 1, tau};
  if (!pf.empty() && pf.front() == pf.back()) out.lambda = std::log(static_cast<double>(pf[0]));
  for (std::size_t i = 1; i < pf.size(); ++i)
    if (pf[i] == pf[i - 1]) out.mu = 0;
  if (out.mu != 0) out.mu = pf.size() % 2 ? -1 : 1;
  return out;
}

const double kN_e20 = 2.0 * std::exp(20.4);

}  // namespace

TEST_SUITE("core") {

TEST_CASE("derived parameters at N = 2 e^20.4") {
  const Params p = derive_params(1.02, 1.028, 0.001, kN_e20, 2.0, 0.25);
  CHECK(p.X == doctest::Approx(std::exp(20.0)).epsilon(1e-13));
  CHECK(p.r == 20);
  CHECK(p.eps == doctest::Approx(0.8521437889662113).epsilon(1e-12));
  CHECK(p.Delta == p.Y / 5.0);
  CHECK(p.M == doctest::Approx(20 / 0.05).epsilon(1e-15));
  CHECK(p.P == doctest::Approx(2.0 / p.eps).epsilon(1e-15));
}

TEST_CASE("formula Y is too large at desk scale") {
  CHECK(formula_Y(std::exp(20.0), 1.028, 0.001) > kYCeiling);
  try {
    derive_params(1.02, 1.028, 0.001, kN_e20);
    FAIL("expected a constraint error");
  } catch (const ConstraintError& e) {
    CHECK(std::string(e.what()).find("Y < 0.45") != std::string::npos);
  }
}

TEST_CASE("Delta tracks any Y") {
  for (double Y : {0.01, 0.1, 0.2, 0.3, 0.44}) {
    const Params p = derive_params(1.02, 1.028, 0.001, 1e6, 2.0, Y);
    CHECK(p.Delta == Y / 5.0);
    CHECK(p.M == p.r / p.Delta);
  }
}

TEST_CASE("constraint violations name the inequality") {
  auto message = [](auto&& fn) {
    try {
      fn();
    } catch (const ConstraintError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message([] { derive_params(1.0, 1.02, 0.001, 1e6, 2, 0.2); }).find("1 < c") !=
        std::string::npos);
  CHECK(message([] { derive_params(1.02, 1.01, 0.001, 1e6, 2, 0.2); }).find("c < tau") !=
        std::string::npos);
  CHECK(message([] { derive_params(1.02, 1.03, 0.001, 1e6, 2, 0.2); }).find("tau < 35/34") !=
        std::string::npos);
  CHECK(message([] { derive_params(1.02, 1.028, 0.0, 1e6, 2, 0.2); }).find("delta > 0") !=
        std::string::npos);
  CHECK(message([] { derive_params(1.02, 1.028, 0.001, 1e6, 0.5, 0.2); }).find("mu > 1/2") !=
        std::string::npos);
  CHECK(message([] { derive_params(1.02, 1.028, 0.001, 10.0, 2, 0.2); }) != "");
  CHECK(message([] { derive_params(1.02, 1.028, 0.001, 1e6, 2, 0.0); }).find("Y > 0") !=
        std::string::npos);
}

TEST_CASE("params round trip through JSON") {
  const Params p = derive_params(1.02, 1.028, 0.001, kN_e20, 2.0, 0.25);
  const auto j = to_json(p);
  CHECK(j.size() == 12);
  const Params q = params_from_json(nlohmann::json::parse(j.dump()));
  CHECK(q.X == p.X);
  CHECK(q.eps == p.eps);
  CHECK(q.P == p.P);
  CHECK(q.r == p.r);

  // Re-derivation of the dependent fields from stored ones.
  CHECK(std::abs(std::pow(p.X, p.c - p.tau) / p.eps - 1) < 1e-14);
  CHECK(std::abs(p.Y / 5.0 / p.Delta - 1) < 1e-14);
  CHECK(std::abs(p.r / p.Delta / p.M - 1) < 1e-14);
  CHECK(std::abs(p.mu / p.eps / p.P - 1) < 1e-14);

  auto extra = nlohmann::json::parse(j.dump());
  extra["bogus"] = 1;
  CHECK_THROWS_AS(params_from_json(extra), ConstraintError);
  auto missing = nlohmann::json::parse(j.dump());
  missing.erase("eps");
  CHECK_THROWS_AS(params_from_json(missing), ConstraintError);
  auto tampered = nlohmann::json::parse(j.dump());
  tampered["P"] = p.P * 1.01;
  CHECK_THROWS_AS(params_from_json(tampered), ConstraintError);
}

TEST_CASE("sieve small ranges") {
  CHECK(sieve_primes(10, 30) == std::vector<std::uint64_t>{11, 13, 17, 19, 23, 29});
  CHECK(sieve_primes(1, 2) == std::vector<std::uint64_t>{2});
  CHECK(sieve_primes(0, 1).empty());
  CHECK_THROWS_AS(sieve_primes(5, 5), ConstraintError);
  CHECK_THROWS_AS(sieve_primes(0, kSieveMax + 1), std::overflow_error);
}

TEST_CASE("sieve count in (5e5, 1e6] matches a plain sieve") {
  const auto naive = naive_sieve(1'000'000);
  std::size_t expect = 0;
  for (std::uint64_t n = 500'001; n <= 1'000'000; ++n) expect += naive[n];
  const auto got = sieve_primes(500'000, 1'000'000);
  CHECK(got.size() == expect);
  CHECK(got.size() == 36960);
}

TEST_CASE("sieve ranges concatenate") {
  const auto naive = naive_sieve(1'000'000);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> dist(0, 1'000'000);
  for (int trial = 0; trial < 20; ++trial) {
    std::uint64_t v[3] = {dist(rng), dist(rng), dist(rng)};
    std::sort(v, v + 3);
    if (v[0] == v[1] || v[1] == v[2]) continue;
    auto left = sieve_primes(v[0], v[1]);
    const auto right = sieve_primes(v[1], v[2]);
    left.insert(left.end(), right.begin(), right.end());
    const auto whole = sieve_primes(v[0], v[2]);
    CHECK(left == whole);
    for (auto p : whole) CHECK(naive[p]);
  }
}

TEST_CASE("arithmetic functions on small inputs") {
  CHECK(mangoldt(8) == doctest::Approx(std::log(2.0)));
  CHECK(mangoldt(12) == 0.0);
  CHECK(mangoldt(13) == doctest::Approx(std::log(13.0)));
  CHECK(mangoldt(1) == 0.0);
  CHECK(mobius(1) == 1);
  CHECK(mobius(12) == 0);
  CHECK(mobius(30) == -1);
  CHECK(divisor_count(1) == 1);
  CHECK(divisor_count(12) == 6);
  CHECK(divisor_count(97) == 2);
}

TEST_CASE("arithmetic functions agree with trial division") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> dist(1, 1'000'000);
  const ArithmeticTable table(1'000'000);
  std::vector<std::uint64_t> ns;
  for (std::uint64_t n = 1; n <= 3000; ++n) ns.push_back(n);
  for (int i = 0; i < 300; ++i) ns.push_back(dist(rng));
  for (auto n : ns) {
    const Naive o = naive_arith(n);
    CHECK(mangoldt(n) == doctest::Approx(o.lambda));
    CHECK(mobius(n) == o.mu);
    CHECK(divisor_count(n) == o.tau);
    const auto k = static_cast<std::uint32_t>(n);
    CHECK(table.mangoldt(k) == doctest::Approx(o.lambda));
    CHECK(table.mobius(k) == o.mu);
    CHECK(table.divisor_count(k) == o.tau);
  }
}

TEST_CASE("distance from sqrt to the nearest integer") {
  CHECK(sqrt_distance(4) == 0.0);
  CHECK(sqrt_distance(2) == doctest::Approx(0.41421356237309504880).epsilon(1e-15));
  CHECK(sqrt_distance(101) == doctest::Approx(0.04987562112089027022).epsilon(1e-14));
  for (std::uint64_t k = 1; k <= 10'000; ++k) CHECK(sqrt_distance(k * k) == 0.0);
  for (std::uint64_t n = 1; n < 100'000; n += 7) {
    const double d = sqrt_distance(n);
    CHECK(d >= 0.0);
    CHECK(d <= 0.5);
  }
  // k^2 + k lies just below a half-integer root; the extended path must agree.
  for (std::uint64_t k : {1000ull, 123456ull, 9999999ull}) {
    const std::uint64_t n = k * k + k;
    CHECK(std::abs(sqrt_distance(n) - static_cast<double>(sqrt_distance_ext(n))) < 1e-15);
  }
  CHECK(sqrt_distance_below(101, 0.05));
  CHECK_FALSE(sqrt_distance_below(101, 0.0498));
}

TEST_CASE("integer powers") {
  for (std::uint64_t n : {1ull, 2ull, 17ull, 1000003ull}) CHECK(power_c(n, 1.0) == n);
  CHECK(power_c(4, 1.5) == 8.0);
  // 3^1.02 = 3.0666462398354311223..., from a 40-digit evaluation.
  CHECK(std::abs(power_c(3, 1.02) / 3.0666462398354311223 - 1) < 4 * 2.2e-16);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> dist(2, 1'000'000'000);
  for (int i = 0; i < 200; ++i) {
    const auto n = dist(rng);
    const double ext = static_cast<double>(power_c_ext(n, 1.0137));
    CHECK(std::abs(power_c(n, 1.0137) / ext - 1) < 4 * 2.2e-16);
  }
  CHECK_THROWS_AS(power_c(1'000'000, 400.0), std::overflow_error);
}

}  // TEST_SUITE
