#pragma once

#include <functional>
#include <span>
#include <string>

#include "json.hpp"
#include "tdi/core.hpp"
#include "tdi/expsums.hpp"
#include "tdi/quadrature.hpp"
#include "tdi/smoothing.hpp"

namespace tdi {

enum class Verdict { holds, holds_with_constant, violated };
std::string to_string(Verdict v);

/// lhs against rhs with the implicit constant made explicit: holds when
/// ratio <= 1, holds_with_constant when ratio <= constant, else violated.
struct BoundReport {
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
  double constant = 1;
  Verdict verdict = Verdict::holds;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
};

nlohmann::ordered_json to_json(const BoundReport& r);

/// Fills ratio and verdict from lhs, rhs and constant. 0/0 counts as ratio 0.
void settle(BoundReport& r);

// ---------------------------------------------------------------------------
// Van der Corput and the shift inequality

struct PhaseFunction {
  std::function<double(double)> value;
  std::function<double(double)> kth_derivative;
};

/// |sum_{a<n<=b} e(f(n))| against (b-a) lambda^{1/(2K-2)} + (b-a)^{1-2/K}
/// lambda^{-1/(2K-2)}, K = 2^{k-1}. Throws RegimeError when sampled |f^(k)|
/// is zero or varies by more than a factor 10 on [a, b], or is not within a
/// factor 10 of lambda.
BoundReport vdc_check(const PhaseFunction& f, double a, double b, int k, double lambda,
                      double constant = 10.0);

/// |sum a(n)|^2 <= (1 + (hi-lo)/Q) sum_{|q|<=Q} (1 - |q|/Q) sum a(n+q) conj a(n)
/// for a sequence indexed over (lo, hi]; a[0] is the term at n = lo + 1.
BoundReport weyl_vdc_check(std::span<const cplx> a, long Q);

// ---------------------------------------------------------------------------
// Mean values over [-P, P]

/// Closed form of the integral over [-P, P] of |sum_i w_i e(alpha pc_i)|^2:
/// sum_{i,j} w_i w_j sin(2 pi P (pc_i - pc_j)) / (pi (pc_i - pc_j)).
double l2_closed_form(const PrimeTable& t, std::span<const double> w, double P);
double l2_closed_form_serial(const PrimeTable& t, std::span<const double> w, double P);

/// Same integral by adaptive quadrature with panels no wider than
/// 1/(4 (max pc - min pc)).
QuadResult l2_quadrature(const PrimeTable& t, std::span<const double> w, double P);

inline constexpr double kL2AgreementTol = 1e-4;

/// lhs = integral of |S|^2 over [-P, P], rhs = P X log^3 X. With
/// cross_check, the closed form and quadrature must agree to 1e-4 relative
/// or VerificationError is thrown.
BoundReport l2_s_integral(const PrimeTable& t, double P, bool cross_check = true);
/// As l2_s_integral for V with m_max terms; rhs = P X log^5 X.
BoundReport l2_v_integral(const PrimeTable& t, const CupFunction& f, double P, long m_max,
                          bool cross_check = true);

// ---------------------------------------------------------------------------

struct QChoice {
  long Q = 0;
  double raw = 0;  // P^{-3/4} X^{(9-6c)/8}
  bool degenerate = false;        // Q == 0
  bool within_envelope = false;   // Q <= X^{1/2}
  bool adjudicated = false;       // floor decided in extended precision
};

QChoice q_choice(double X, double c, double P);
inline QChoice q_choice(const Params& p) { return q_choice(p.X, p.c, p.P); }

/// The six-term majorant of max |V| with X^eta = 1 and constant 1.
double vmax_rhs(double X, double c, double P, double M);

/// Max |V(alpha)| over a symmetric grid on [-P, P] that contains 0 (an even
/// grid_points is raised by one).
BoundReport vmax_scan(const PrimeTable& t, const CupFunction& f, double P, int grid_points,
                      long m_max = 0);

// ---------------------------------------------------------------------------
// Phase derivatives

/// f(d, l) = alpha (dl)^c + m sqrt(dl) and its differenced form
/// g(l) = f(d + q, l) - f(d, l), probed over l in [l_lo, l_hi].
struct PhaseProbe {
  double alpha = 0;
  long m = 0;
  double d = 1;
  double q = 1;
  double l_lo = 1;
  double l_hi = 2;
  double c = 1;
};

double phase_f(const PhaseProbe& p, double l);
double phase_g(const PhaseProbe& p, double l);

struct PhaseDerivatives {
  double gamma1 = 0;  // d^2 alpha c (c-1) (dl)^{c-2}
  double gamma2 = 0;  // (1/4) m d^2 (dl)^{-3/2}
  double f2 = 0;      // gamma1 - gamma2
  double f3 = 0;      // d^3 alpha c(c-1)(c-2)(dl)^{c-3} + (3/8) d^3 m (dl)^{-5/2}
  double psi1 = 0;    // alpha c (c-1) ((d+q)^c - d^c) l^{c-2}
  double psi2 = 0;    // (m/4) (sqrt(d+q) - sqrt(d)) l^{-3/2}
  double g2 = 0;      // psi1 - psi2 = g''(l)
  double phi1 = 0;    // alpha c (c-1)(c-2) ((d+q)^c - d^c) l^{c-3}
  double phi2 = 0;    // (3m/8) (sqrt(d+q) - sqrt(d)) l^{-5/2}
  double g3 = 0;      // phi1 + phi2 = g'''(l)
};

PhaseDerivatives phase_derivatives(const PhaseProbe& p, double l);

struct RegimeReport {
  PhaseDerivatives at_mid;
  double ratio = 0;         // |gamma1 / gamma2|
  double shifted_ratio = 0; // |psi1 / psi2|
  std::string regime;       // which curvature term dominates f''
  std::string shifted_regime;
};

RegimeReport phase_regime(const PhaseProbe& p);
nlohmann::ordered_json to_json(const RegimeReport& r);

}  // namespace tdi
