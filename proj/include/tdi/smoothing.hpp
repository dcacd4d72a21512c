#pragma once

#include <optional>

namespace tdi {

/// The 1-periodic cup function: indicator of [-a, a] convolved r times with
/// a uniform box of width Delta/r, periodized. Equal to 1 for ||t|| <= Y - Delta,
/// 0 for ||t|| >= Y, with mean 2a = 9Y/5.
struct CupFunction {
  double Y = 0;
  double Delta = 0;
  int r = 0;
  double a = 0;      // Y - Delta/2
  int M_trunc = 0;   // Fourier truncation used by chi_via_series
  double tail_bound = 0;  // sum over |m| > M_trunc of |g(m)|, certified
};

/// Certified bound on sum_{|m| > m_max} |g(m)|: (2/pi)(r/(pi Delta))^r m_max^-r / r.
double cup_tail_bound(double Delta, int r, long m_max);

/// Builds the cup function. Without an explicit M_trunc, picks the smallest
/// order whose tail bound is at most 1e-9.
CupFunction make_cup(double Y, int r, std::optional<int> M_trunc = std::nullopt);

/// Exact value via the Irwin-Hall cumulative form of the box convolution.
double chi_eval(const CupFunction& f, double t);
double fourier_coeff(const CupFunction& f, long m);
/// 9Y/5 + sum_{0<|m|<=M_trunc} g(m) e(mt).
double chi_via_series(const CupFunction& f, double t);

/// CDF of a sum of n independent uniforms on [0, 1], by the positive-weight
/// recursion F_k(u) = (u F_{k-1}(u) + (k-u) F_{k-1}(u-1)) / k.
double irwin_hall_cdf(int n, double u);

/// Selberg's minorant of the indicator of [-1, 1] whose Fourier transform is
/// supported in [-mu, mu]. Integral 2 - 1/mu.
struct SelbergMinorant {
  double mu = 0;
  int K_trunc = 0;  // truncation of the explicit series path
  double integral = 0;
};

SelbergMinorant make_minorant(double mu, int K_trunc = 4096);

/// Beurling's function B(z) >= sgn(z), summed in closed form via trigamma.
double beurling(double z);
/// The same function from the explicit series truncated at K terms.
double beurling_series(double z, int K);
/// Bound on |beurling_series(z, K) - beurling(z)| for |z| < K.
double beurling_series_error(double z, int K);

double minorant_eval(const SelbergMinorant& s, double x);
/// Evaluates through beurling_series with s.K_trunc terms.
double minorant_eval_series(const SelbergMinorant& s, double x);
double minorant_ft(const SelbergMinorant& s, double t);

/// |A(x)| <= 2 / (pi^2 mu^2 (|x| - 1)^2) for |x| > 1.
double minorant_envelope(const SelbergMinorant& s, double x);

}  // namespace tdi
