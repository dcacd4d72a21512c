#include "tdi/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/trigamma.hpp>

#include "tdi/errors.hpp"
#include "tdi/summation.hpp"

namespace tdi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesTailTarget = 1e-9;

// sin(2 pi x) with x reduced mod 1 first.
double sin_2pi(double x) { return std::sin(2.0 * kPi * (x - std::nearbyint(x))); }
double cos_2pi(double x) { return std::cos(2.0 * kPi * (x - std::nearbyint(x))); }

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double half = 0.5 * x;
  return std::sin(2.0 * kPi * (half - std::nearbyint(half))) / (kPi * x);
}

}  // namespace

double irwin_hall_cdf(int n, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= n) return 1.0;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) v[j] = std::clamp(u - j, 0.0, 1.0);
  for (int k = 2; k <= n; ++k) {
    for (int j = 0; j + k <= n; ++j) {
      const double x = u - j;
      if (x <= 0.0)
        v[j] = 0.0;
      else if (x >= k)
        v[j] = 1.0;
      else
        v[j] = (x * v[j] + (k - x) * v[j + 1]) / k;
    }
  }
  return v[0];
}

double cup_tail_bound(double Delta, int r, long m_max) {
  if (m_max <= 0) return std::numeric_limits<double>::infinity();
  const double base = r / (kPi * Delta * static_cast<double>(m_max));
  return 2.0 / (kPi * r) * std::exp(r * std::log(base));
}

CupFunction make_cup(double Y, int r, std::optional<int> M_trunc) {
  if (!(Y > 0.0 && Y < 0.45)) throw ConstraintError("cup function requires 0 < Y < 0.45");
  if (r < 1) throw ConstraintError("cup function requires r >= 1");
  CupFunction f;
  f.Y = Y;
  f.Delta = Y / 5.0;
  f.r = r;
  f.a = Y - f.Delta / 2.0;
  if (M_trunc) {
    if (*M_trunc < 0) throw ConstraintError("M_trunc >= 0");
    f.M_trunc = *M_trunc;
  } else {
    const double guess = r / (kPi * f.Delta) *
                         std::pow(2.0 / (kPi * r * kSeriesTailTarget), 1.0 / r);
    long m = std::max(1L, static_cast<long>(std::ceil(guess)) - 2);
    while (cup_tail_bound(f.Delta, r, m) > kSeriesTailTarget) ++m;
    f.M_trunc = static_cast<int>(m);
  }
  f.tail_bound = cup_tail_bound(f.Delta, r, f.M_trunc);
  return f;
}

double chi_eval(const CupFunction& f, double t) {
  const double u = std::abs(t - std::nearbyint(t));
  if (u <= f.Y - f.Delta) return 1.0;
  if (u >= f.Y) return 0.0;
  // Distribution function of the kernel (sum of r uniforms on
  // [-Delta/(2r), Delta/(2r)]), rescaled onto the Irwin-Hall variable.
  const double h = f.Delta / (2.0 * f.r);
  auto F = [&](double x) { return irwin_hall_cdf(f.r, 0.5 * (x / h + f.r)); };
  // chi = F(u + a) - F(u - a) and F(u - a) = 1 - F(a - u).
  return F(u + f.a) - 1.0 + F(f.a - u);
}

double fourier_coeff(const CupFunction& f, long m) {
  if (m == 0) return 2.0 * f.a;
  const double md = static_cast<double>(m);
  const double core = sin_2pi(md * f.a) / (kPi * md);
  const double s = sinc(md * f.Delta / f.r);
  double kernel = 1.0;
  for (int i = 0; i < f.r; ++i) kernel *= s;
  return core * kernel;
}

double chi_via_series(const CupFunction& f, double t) {
  KahanSum<double> acc;
  acc += 2.0 * f.a;
  for (long m = 1; m <= f.M_trunc; ++m)
    acc += 2.0 * fourier_coeff(f, m) * cos_2pi(static_cast<double>(m) * t);
  return acc.value();
}

// ---------------------------------------------------------------------------

SelbergMinorant make_minorant(double mu, int K_trunc) {
  if (!(mu > 0.5)) throw ConstraintError("mu > 1/2");
  if (K_trunc < 1) throw ConstraintError("K_trunc >= 1");
  return {mu, K_trunc, 2.0 - 1.0 / mu};
}

double beurling(double z) {
  if (z == 0.0) return 1.0;
  const double sz = sin_2pi(0.5 * z) / kPi;
  const double s2 = sz * sz;
  if (z > 0.0) return 1.0 + 2.0 * s2 * (1.0 / z - boost::math::trigamma(1.0 + z));
  const double y = -z;
  const double sy = sinc(y);
  return -1.0 + 2.0 * (sy * sy + s2 * (boost::math::trigamma(1.0 + y) - 1.0 / y));
}

double beurling_series(double z, int K) {
  KahanSum<double> acc;
  for (int n = 0; n <= K; ++n) {
    const double s = sinc(z - n);
    acc += s * s;
  }
  for (int n = 1; n <= K; ++n) {
    const double s = sinc(z + n);
    acc += -s * s;
  }
  const double s0 = sinc(z);
  acc += 2.0 * z * s0 * s0;
  return acc.value();
}

double beurling_series_error(double z, int K) {
  const double az = std::abs(z);
  if (az >= K) return std::numeric_limits<double>::infinity();
  return 2.0 * az / (kPi * kPi * (static_cast<double>(K) * K - az * az));
}

double minorant_eval(const SelbergMinorant& s, double x) {
  return -0.5 * (beurling(s.mu * (-1.0 - x)) + beurling(s.mu * (x - 1.0)));
}

double minorant_eval_series(const SelbergMinorant& s, double x) {
  return -0.5 * (beurling_series(s.mu * (-1.0 - x), s.K_trunc) +
                 beurling_series(s.mu * (x - 1.0), s.K_trunc));
}

double minorant_ft(const SelbergMinorant& s, double t) {
  const double v = t / s.mu;
  if (std::abs(v) >= 1.0) return 0.0;
  if (t == 0.0) return s.integral;
  const double tri = 1.0 - std::abs(v);
  const double cot = cos_2pi(0.5 * v) / sin_2pi(0.5 * v);
  const double odd = tri * cot + std::copysign(1.0 / kPi, v);
  return (odd * sin_2pi(t) - tri * cos_2pi(t)) / s.mu;
}

double minorant_envelope(const SelbergMinorant& s, double x) {
  const double d = std::abs(x) - 1.0;
  if (d <= 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 / (kPi * kPi * s.mu * s.mu * d * d);
}

}  // namespace tdi
