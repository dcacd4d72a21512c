#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "json.hpp"

namespace tdi {

/// 50 significant digits; used only where a comparison must be adjudicated.
using ext_float = boost::multiprecision::cpp_bin_float_50;

inline constexpr double kTauCeiling = 35.0 / 34.0;
inline constexpr double kYCeiling = 0.45;
inline constexpr double kDefaultMu = 2.0;

/// Derived run constants. Every field after the inputs (c, tau, delta, N,
/// mu) is a function of them, except Y, which may be overridden.
struct Params {
  double c = 0;
  double tau = 0;
  double delta = 0;
  double N = 0;
  double X = 0;      // (N/2)^(1/c)
  double eps = 0;    // X^(c - tau)
  int r = 0;         // floor(log X)
  double Y = 0;      // X^(-(17/48)(35/34 - tau) + delta) unless overridden
  double Delta = 0;  // Y / 5
  double M = 0;      // r / Delta
  double mu = 0;     // support radius of the minorant transform
  double P = 0;      // mu / eps
};

Params derive_params(double c, double tau, double delta, double N,
                     double mu = kDefaultMu,
                     std::optional<double> Y_override = std::nullopt);

/// The theorem's near-square threshold, before any override.
double formula_Y(double X, double tau, double delta);

/// N such that (N/2)^(1/c) = X.
double N_for_X(double X, double c);

nlohmann::ordered_json to_json(const Params& p);
/// Strict inverse of to_json: all twelve fields required, unknown fields
/// rejected, and the derived fields must agree with a re-derivation.
Params params_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Primes and arithmetic functions

inline constexpr std::uint64_t kSieveMax = std::uint64_t{1} << 50;

/// Primes p with lo < p <= hi, increasing. Segmented; memory is
/// O(sqrt(hi) + segment).
std::vector<std::uint64_t> sieve_primes(std::uint64_t lo, std::uint64_t hi);

std::uint64_t isqrt(std::uint64_t n);

double mangoldt(std::uint64_t n);
int mobius(std::uint64_t n);
std::uint64_t divisor_count(std::uint64_t n);

/// Smallest-prime-factor table with bulk arithmetic functions on [1, limit].
class ArithmeticTable {
 public:
  explicit ArithmeticTable(std::uint32_t limit);

  std::uint32_t limit() const { return limit_; }
  std::uint32_t smallest_factor(std::uint32_t n) const { return spf_[n]; }
  int mobius(std::uint32_t n) const { return mu_[n]; }
  double mangoldt(std::uint32_t n) const { return lambda_[n]; }
  std::uint32_t divisor_count(std::uint32_t n) const;

 private:
  std::uint32_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::int8_t> mu_;
  std::vector<double> lambda_;
};

// ---------------------------------------------------------------------------
// Square roots and powers

/// sqrt(n) mod 1, computed as (n - s^2)/(sqrt(n) + s) with s = isqrt(n).
double sqrt_frac(std::uint64_t n);
/// ||sqrt(n)||, the distance from sqrt(n) to the nearest integer.
double sqrt_distance(std::uint64_t n);
ext_float sqrt_distance_ext(std::uint64_t n);
/// ||sqrt(n)|| < Y, re-decided in extended precision within 1e-12 of Y.
bool sqrt_distance_below(std::uint64_t n, double Y);

/// n^c in double precision; throws std::overflow_error if not finite.
double power_c(std::uint64_t n, double c);
ext_float power_c_ext(std::uint64_t n, double c);

}  // namespace tdi
