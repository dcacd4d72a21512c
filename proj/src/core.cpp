#include "tdi/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tdi/errors.hpp"

namespace tdi {

namespace {

[[noreturn]] void violated(const std::string& what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << "constraint violated: " << what << " (got " << value << ")";
  throw ConstraintError(os.str());
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

double formula_Y(double X, double tau, double delta) {
  return std::pow(X, -(17.0 / 48.0) * (kTauCeiling - tau) + delta);
}

double N_for_X(double X, double c) { return 2.0 * std::pow(X, c); }

Params derive_params(double c, double tau, double delta, double N, double mu,
                     std::optional<double> Y_override) {
  if (!(c > 1.0)) violated("1 < c", c);
  if (!(c < tau)) violated("c < tau", tau);
  if (!(tau < kTauCeiling)) violated("tau < 35/34", tau);
  if (!(delta > 0.0)) violated("delta > 0", delta);
  if (!(mu > 0.5)) violated("mu > 1/2", mu);
  if (!(N / 2.0 > std::exp(c))) violated("N/2 > e^c", N);

  Params p;
  p.c = c;
  p.tau = tau;
  p.delta = delta;
  p.N = N;
  p.mu = mu;
  p.X = std::pow(N / 2.0, 1.0 / c);
  if (!(p.X > 8.0)) violated("X > 8", p.X);
  p.eps = std::pow(p.X, c - tau);
  // log X lands a few ulps below an integer when X = e^k is reconstructed
  // from N; treat that as the integer.
  p.r = static_cast<int>(std::floor(std::log(p.X) + 1e-12));
  if (p.r < 1) violated("r = floor(log X) >= 1", p.r);

  p.Y = Y_override ? *Y_override : formula_Y(p.X, tau, delta);
  if (!(p.Y > 0.0)) violated("Y > 0", p.Y);
  if (!(p.Y < kYCeiling)) violated("Y < 0.45", p.Y);
  p.Delta = p.Y / 5.0;
  p.M = p.r / p.Delta;
  p.P = p.mu / p.eps;
  return p;
}

nlohmann::ordered_json to_json(const Params& p) {
  nlohmann::ordered_json j;
  j["c"] = p.c;
  j["tau"] = p.tau;
  j["delta"] = p.delta;
  j["N"] = p.N;
  j["X"] = p.X;
  j["eps"] = p.eps;
  j["r"] = p.r;
  j["Y"] = p.Y;
  j["Delta"] = p.Delta;
  j["M"] = p.M;
  j["mu"] = p.mu;
  j["P"] = p.P;
  return j;
}

Params params_from_json(const nlohmann::json& j) {
  static const char* const kFields[] = {"c", "tau", "delta", "N", "X", "eps",
                                        "r", "Y", "Delta", "M", "mu", "P"};
  if (!j.is_object()) throw ConstraintError("params JSON must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kFields), std::end(kFields), key) == std::end(kFields))
      throw ConstraintError("unknown params field: " + key);
  }
  for (const char* f : kFields) {
    if (!j.contains(f) || !j.at(f).is_number())
      throw ConstraintError(std::string("missing or non-numeric params field: ") + f);
  }
  Params p = derive_params(j.at("c").get<double>(), j.at("tau").get<double>(),
                           j.at("delta").get<double>(), j.at("N").get<double>(),
                           j.at("mu").get<double>(), j.at("Y").get<double>());
  auto check = [&](const char* name, double stored, double derived) {
    if (!close_rel(stored, derived, 1e-14))
      throw ConstraintError(std::string("params field inconsistent with inputs: ") + name);
  };
  check("X", j.at("X").get<double>(), p.X);
  check("eps", j.at("eps").get<double>(), p.eps);
  check("Delta", j.at("Delta").get<double>(), p.Delta);
  check("M", j.at("M").get<double>(), p.M);
  check("P", j.at("P").get<double>(), p.P);
  if (j.at("r").get<double>() != p.r)
    throw ConstraintError("params field inconsistent with inputs: r");
  return p;
}

// ---------------------------------------------------------------------------

std::uint64_t isqrt(std::uint64_t n) {
  auto s = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (static_cast<unsigned __int128>(s) * s > n) --s;
  while (static_cast<unsigned __int128>(s + 1) * (s + 1) <= n) ++s;
  return s;
}

std::vector<std::uint64_t> sieve_primes(std::uint64_t lo, std::uint64_t hi) {
  if (hi > kSieveMax)
    throw std::overflow_error("sieve_primes: hi exceeds supported range 2^50");
  if (!(lo < hi)) throw ConstraintError("sieve_primes: require lo < hi");

  const std::uint64_t root = isqrt(hi);
  std::vector<char> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
  }

  constexpr std::uint64_t kSegment = std::uint64_t{1} << 18;
  std::vector<std::uint64_t> out;
  std::vector<char> seg;
  for (std::uint64_t start = std::max<std::uint64_t>(lo + 1, 2); start <= hi;) {
    const std::uint64_t end = std::min(hi, start + kSegment - 1);
    seg.assign(end - start + 1, 1);
    for (std::uint64_t p : base) {
      if (p * p > end) break;
      std::uint64_t first = std::max(p * p, (start + p - 1) / p * p);
      for (std::uint64_t j = first; j <= end; j += p) seg[j - start] = 0;
    }
    for (std::uint64_t i = 0; i < seg.size(); ++i)
      if (seg[i]) out.push_back(start + i);
    if (end == hi) break;
    start = end + 1;
  }
  return out;
}

namespace {

// Trial-division factorization into (prime, exponent) pairs.
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, int>> f;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    f.emplace_back(p, e);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

}  // namespace

double mangoldt(std::uint64_t n) {
  if (n < 2) return 0.0;
  auto f = factorize(n);
  return f.size() == 1 ? std::log(static_cast<double>(f[0].first)) : 0.0;
}

int mobius(std::uint64_t n) {
  int m = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    m = -m;
  }
  return m;
}

std::uint64_t divisor_count(std::uint64_t n) {
  std::uint64_t d = 1;
  for (auto [p, e] : factorize(n)) d *= static_cast<std::uint64_t>(e + 1);
  return d;
}

ArithmeticTable::ArithmeticTable(std::uint32_t limit)
    : limit_(limit), spf_(limit + 1, 0), mu_(limit + 1, 0), lambda_(limit + 1, 0.0) {
  std::vector<std::uint32_t> primes;
  if (limit >= 1) mu_[1] = 1;
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = i;
      primes.push_back(i);
      mu_[i] = -1;
    }
    for (std::uint32_t p : primes) {
      const std::uint64_t ip = std::uint64_t{i} * p;
      if (p > spf_[i] || ip > limit) break;
      spf_[ip] = p;
      mu_[ip] = (p == spf_[i]) ? 0 : static_cast<std::int8_t>(-mu_[i]);
    }
  }
  for (std::uint32_t p : primes) {
    const double lp = std::log(static_cast<double>(p));
    for (std::uint64_t q = p; q <= limit; q *= p) lambda_[q] = lp;
  }
}

std::uint32_t ArithmeticTable::divisor_count(std::uint32_t n) const {
  std::uint32_t d = 1;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    std::uint32_t e = 0;
    while (n % p == 0) n /= p, ++e;
    d *= e + 1;
  }
  return d;
}

// ---------------------------------------------------------------------------

ext_float sqrt_distance_ext(std::uint64_t n) {
  const ext_float root = boost::multiprecision::sqrt(ext_float(n));
  const ext_float frac = root - ext_float(isqrt(n));
  return frac < 0.5 ? frac : ext_float(1) - frac;
}

double sqrt_frac(std::uint64_t n) {
  const std::uint64_t s = isqrt(n);
  const double num = static_cast<double>(n - s * s);
  const double frac = num / (std::sqrt(static_cast<double>(n)) + static_cast<double>(s));
  if (std::abs(frac - 0.5) < 1e-6) {
    const ext_float root = boost::multiprecision::sqrt(ext_float(n));
    return static_cast<double>(root - ext_float(s));
  }
  return frac;
}

double sqrt_distance(std::uint64_t n) {
  const double f = sqrt_frac(n);
  return std::min(f, 1.0 - f);
}

bool sqrt_distance_below(std::uint64_t n, double Y) {
  const double d = sqrt_distance(n);
  if (std::abs(d - Y) > 1e-12) return d < Y;
  return sqrt_distance_ext(n) < ext_float(Y);
}

double power_c(std::uint64_t n, double c) {
  const double v = std::pow(static_cast<double>(n), c);
  if (!std::isfinite(v)) throw std::overflow_error("power_c: n^c exceeds double range");
  return v;
}

ext_float power_c_ext(std::uint64_t n, double c) {
  return boost::multiprecision::pow(ext_float(n), ext_float(c));
}

}  // namespace tdi
