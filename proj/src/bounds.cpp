#include "tdi/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "tdi/errors.hpp"
#include "tdi/quadrature.hpp"
#include "tdi/summation.hpp"

namespace tdi {

using std::numbers::pi;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_with_constant: return "holds-with-constant";
    case Verdict::violated: return "violated";
  }
  return "unknown";
}

void settle(BoundReport& r) {
  if (r.rhs == 0.0)
    r.ratio = r.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  else
    r.ratio = r.lhs / r.rhs;
  if (r.ratio <= 1.0)
    r.verdict = Verdict::holds;
  else if (r.ratio <= r.constant)
    r.verdict = Verdict::holds_with_constant;
  else
    r.verdict = Verdict::violated;
}

nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["ratio"] = r.ratio;
  j["constant"] = r.constant;
  j["verdict"] = to_string(r.verdict);
  j["parameters"] = r.parameters;
  return j;
}

BoundReport vdc_check(const PhaseFunction& f, double a, double b, int k, double lambda,
                      double constant) {
  if (k != 2 && k != 3) throw ConstraintError("vdc_check requires k in {2, 3}");
  if (!(b > a)) throw ConstraintError("vdc_check requires a < b");
  if (!(lambda > 0.0)) throw RegimeError("regime check failed: lambda must be positive");

  constexpr int kSamples = 64;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double x = a + (b - a) * i / kSamples;
    const double v = std::abs(f.kth_derivative(x));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo > 0.0) || hi > 10.0 * lo)
    throw RegimeError("regime check failed: sampled |f^(k)| varies by more than a factor 10");
  if (lambda > 10.0 * hi || lambda < lo / 10.0)
    throw RegimeError("regime check failed: lambda not comparable to sampled |f^(k)|");

  KahanSum<cplx> acc;
  const auto n_lo = static_cast<long>(std::floor(a)) + 1;
  const auto n_hi = static_cast<long>(std::floor(b));
  for (long n = n_lo; n <= n_hi; ++n) acc += unit_phase(f.value(static_cast<double>(n)));

  const double K = std::ldexp(1.0, k - 1);
  const double len = b - a;
  const double e = 1.0 / (2.0 * K - 2.0);

  BoundReport r;
  r.lhs = std::abs(acc.value());
  r.rhs = len * std::pow(lambda, e) + std::pow(len, 1.0 - 2.0 / K) * std::pow(lambda, -e);
  r.constant = constant;
  r.parameters = {{"a", a}, {"b", b}, {"k", k}, {"lambda", lambda},
                  {"sampled_min", lo}, {"sampled_max", hi}};
  settle(r);
  return r;
}

BoundReport weyl_vdc_check(std::span<const cplx> a, long Q) {
  if (Q < 1) throw ConstraintError("weyl_vdc_check requires Q >= 1");
  const auto L = static_cast<long>(a.size());

  KahanSum<cplx> total;
  for (const auto& x : a) total += x;

  // Correlations for q and -q are conjugate, so only q >= 0 is summed.
  KahanSum<double> corr;
  for (long q = 0; q <= std::min(Q, L - 1); ++q) {
    KahanSum<cplx> s;
    for (long n = 0; n + q < L; ++n) s += a[n + q] * std::conj(a[n]);
    const double w = 1.0 - static_cast<double>(q) / static_cast<double>(Q);
    corr += (q == 0 ? 1.0 : 2.0) * w * s.value().real();
  }

  BoundReport r;
  r.lhs = std::norm(total.value());
  r.rhs = (1.0 + static_cast<double>(L) / static_cast<double>(Q)) * corr.value();
  r.parameters = {{"length", L}, {"Q", Q}};
  settle(r);
  // Exact inequality: rounding-level excess still counts as holding.
  const double slack = 1e-9 * std::max({r.lhs, std::abs(r.rhs), 1e-300});
  if (r.lhs <= r.rhs + slack) r.verdict = Verdict::holds;
  return r;
}

namespace {

double row_sum(const PrimeTable& t, std::span<const double> w, double P, std::size_t i) {
  // Off-diagonal pairs (i, j), j > i; pc is increasing so the difference
  // is never zero.
  KahanSum<double> row;
  const double pi_ = t.entries[i].pc;
  for (std::size_t j = i + 1; j < t.size(); ++j) {
    if (w[j] == 0.0) continue;
    const double d = t.entries[j].pc - pi_;
    row += w[j] * std::sin(2.0 * pi * P * d) / (pi * d);
  }
  return 2.0 * w[i] * row.value() + 2.0 * P * w[i] * w[i];
}

double closed_form(const PrimeTable& t, std::span<const double> w, double P, bool parallel) {
  if (w.size() != t.size()) throw ConstraintError("weight count must match the table");
  const std::size_t n = t.size();
  std::vector<double> rows(n, 0.0);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::size_t i = 0; i < n; ++i)
    if (w[i] != 0.0) rows[i] = row_sum(t, w, P, i);
  KahanSum<double> acc;
  for (double v : rows) acc += v;
  return acc.value();
}

std::vector<double> log_weights(const PrimeTable& t) {
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) w[i] = t.entries[i].logp;
  return w;
}

BoundReport l2_report(const PrimeTable& t, std::span<const double> w, double P, int log_power,
                      bool cross_check) {
  if (!(P > 0.0)) throw ConstraintError("mean-value integral requires P > 0");
  BoundReport r;
  r.lhs = l2_closed_form(t, w, P);
  const double lx = std::log(t.X);
  r.rhs = P * t.X * std::pow(lx, log_power);
  r.constant = 1.0;
  r.parameters = {{"X", t.X}, {"c", t.c}, {"P", P}, {"primes", t.size()},
                  {"closed_form", r.lhs}};
  if (cross_check) {
    const QuadResult q = l2_quadrature(t, w, P);
    const double scale = std::max(std::abs(r.lhs), 1e-300);
    const double rel = std::abs(q.value - r.lhs) / scale;
    r.parameters["quadrature"] = q.value;
    r.parameters["quadrature_error"] = q.error;
    r.parameters["relative_difference"] = rel;
    if (r.lhs == 0.0 ? std::abs(q.value) > 1e-12 : rel > kL2AgreementTol)
      throw VerificationError("quadrature disagreement: closed form and quadrature differ by " +
                              std::to_string(rel) + " relative");
  }
  settle(r);
  return r;
}

}  // namespace

double l2_closed_form(const PrimeTable& t, std::span<const double> w, double P) {
  return closed_form(t, w, P, true);
}

double l2_closed_form_serial(const PrimeTable& t, std::span<const double> w, double P) {
  return closed_form(t, w, P, false);
}

QuadResult l2_quadrature(const PrimeTable& t, std::span<const double> w, double P) {
  if (t.size() == 0) return {};
  const double F = std::max(t.entries.back().pc - t.entries.front().pc, 1.0);
  auto integrand = [&](double alpha) { return std::norm(weighted_sum(t, w, alpha)); };
  return integrate_gk(integrand, -P, P, 1.0 / (4.0 * F), 1e-9);
}

BoundReport l2_s_integral(const PrimeTable& t, double P, bool cross_check) {
  const auto w = log_weights(t);
  return l2_report(t, w, P, 3, cross_check);
}

BoundReport l2_v_integral(const PrimeTable& t, const CupFunction& f, double P, long m_max,
                          bool cross_check) {
  if (m_max < 0) throw ConstraintError("m_max must be non-negative");
  auto w = v_weights(t, f, m_max);
  for (std::size_t i = 0; i < t.size(); ++i) w[i] *= t.entries[i].logp;
  BoundReport r = l2_report(t, w, P, 5, cross_check);
  r.parameters["m_max"] = m_max;
  return r;
}

QChoice q_choice(double X, double c, double P) {
  if (!(X > 1.0) || !(P > 0.0)) throw ConstraintError("q_choice requires X > 1 and P > 0");
  QChoice out;
  out.raw = std::pow(P, -0.75) * std::pow(X, (9.0 - 6.0 * c) / 8.0);
  double fl = std::floor(out.raw);
  const double frac = out.raw - fl;
  if (frac < 1e-9 * std::max(1.0, out.raw) || 1.0 - frac < 1e-9 * std::max(1.0, out.raw)) {
    const ext_float e = pow(ext_float(P), ext_float(-3) / 4) *
                        pow(ext_float(X), (ext_float(9) - 6 * ext_float(c)) / 8);
    fl = static_cast<double>(floor(e));
    out.adjudicated = true;
  }
  out.Q = static_cast<long>(fl);
  out.degenerate = out.Q == 0;
  out.within_envelope = static_cast<double>(out.Q) <= std::sqrt(X);
  return out;
}

double vmax_rhs(double X, double c, double P, double M) {
  return std::sqrt(M) * std::pow(X, 7.0 / 12.0) + std::pow(M, 1.0 / 6.0) * std::pow(X, 0.75) +
         std::pow(X, 11.0 / 12.0) + std::pow(P, 1.0 / 16.0) * std::pow(X, (2.0 * c + 29.0) / 32.0) +
         std::pow(P, -3.0 / 16.0) * std::pow(M, 0.25) * std::pow(X, (33.0 - 6.0 * c) / 32.0) +
         std::pow(P, -1.0 / 16.0) * std::pow(M, 1.0 / 12.0) * std::pow(X, (31.0 - 2.0 * c) / 32.0);
}

BoundReport vmax_scan(const PrimeTable& t, const CupFunction& f, double P, int grid_points,
                      long m_max) {
  if (grid_points < 2) throw ConstraintError("vmax_scan requires grid_points >= 2");
  if (!(P > 0.0)) throw ConstraintError("vmax_scan requires P > 0");
  const int n = grid_points % 2 == 0 ? grid_points + 1 : grid_points;
  std::vector<double> alphas(n);
  for (int i = 0; i < n; ++i) alphas[i] = -P + 2.0 * P * i / (n - 1);
  alphas[n / 2] = 0.0;

  SumRequest req{SumKind::V, 0, f, m_max};
  const auto vals = grid_eval(t, req, alphas);
  double best = 0.0, at = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = std::abs(vals[i]);
    if (v > best) {
      best = v;
      at = alphas[i];
    }
  }
  const long mm = m_max > 0 ? m_max : default_m_max(f);
  KahanSum<double> gsum;
  for (long m = 1; m <= mm; ++m) gsum += 2.0 * std::abs(fourier_coeff(f, m));
  const double s0 = log_mass(t);

  BoundReport r;
  r.lhs = best;
  const double M = f.r / f.Delta;
  r.rhs = vmax_rhs(t.X, t.c, P, M);
  r.parameters = {{"X", t.X}, {"c", t.c}, {"P", P}, {"M", M}, {"m_max", mm},
                  {"grid_points", n}, {"argmax_alpha", at}, {"v_at_zero", std::abs(vals[n / 2])},
                  {"absolute_envelope", gsum.value() * s0 + s0 * cup_tail_bound(f.Delta, f.r, mm)}};
  settle(r);
  return r;
}

double phase_f(const PhaseProbe& p, double l) {
  const double n = p.d * l;
  return p.alpha * std::pow(n, p.c) + static_cast<double>(p.m) * std::sqrt(n);
}

double phase_g(const PhaseProbe& p, double l) {
  PhaseProbe shifted = p;
  shifted.d = p.d + p.q;
  return phase_f(shifted, l) - phase_f(p, l);
}

PhaseDerivatives phase_derivatives(const PhaseProbe& p, double l) {
  const double c = p.c, a = p.alpha, m = static_cast<double>(p.m), d = p.d;
  const double n = d * l;
  PhaseDerivatives out;
  out.gamma1 = d * d * a * c * (c - 1.0) * std::pow(n, c - 2.0);
  out.gamma2 = 0.25 * m * d * d * std::pow(n, -1.5);
  out.f2 = out.gamma1 - out.gamma2;
  out.f3 = d * d * d * a * c * (c - 1.0) * (c - 2.0) * std::pow(n, c - 3.0) +
           0.375 * d * d * d * m * std::pow(n, -2.5);

  // Integrals over t in [d, d+q] of the l-derivatives of d/dt f(t, l).
  const double dc = std::pow(d + p.q, c) - std::pow(d, c);
  const double dh = std::sqrt(d + p.q) - std::sqrt(d);
  out.psi1 = a * c * (c - 1.0) * dc * std::pow(l, c - 2.0);
  out.psi2 = 0.25 * m * dh * std::pow(l, -1.5);
  out.g2 = out.psi1 - out.psi2;
  out.phi1 = a * c * (c - 1.0) * (c - 2.0) * dc * std::pow(l, c - 3.0);
  out.phi2 = 0.375 * m * dh * std::pow(l, -2.5);
  out.g3 = out.phi1 + out.phi2;
  return out;
}

namespace {

std::string classify(double ratio, double alpha) {
  if (ratio <= 0.5) return "sqrt-dominated";
  if (ratio >= 2.0) return "power-dominated";
  return alpha > 0 ? "comparable-cancelling" : "comparable-reinforcing";
}

double safe_ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(num / den);
}

}  // namespace

RegimeReport phase_regime(const PhaseProbe& p) {
  if (!(p.d > 0) || !(p.l_hi >= p.l_lo) || !(p.l_lo > 0))
    throw ConstraintError("phase probe requires d > 0 and 0 < l_lo <= l_hi");
  RegimeReport r;
  r.at_mid = phase_derivatives(p, 0.5 * (p.l_lo + p.l_hi));
  r.ratio = safe_ratio(r.at_mid.gamma1, r.at_mid.gamma2);
  r.shifted_ratio = safe_ratio(r.at_mid.psi1, r.at_mid.psi2);
  // With m > 0 the two curvature terms have opposite signs when alpha > 0.
  const double sign = p.m >= 0 ? p.alpha : -p.alpha;
  r.regime = classify(r.ratio, sign);
  r.shifted_regime = classify(r.shifted_ratio, sign);
  return r;
}

nlohmann::ordered_json to_json(const RegimeReport& r) {
  const auto& d = r.at_mid;
  return {{"gamma1", d.gamma1}, {"gamma2", d.gamma2}, {"f2", d.f2}, {"f3", d.f3},
          {"psi1", d.psi1},     {"psi2", d.psi2},     {"g2", d.g2}, {"phi1", d.phi1},
          {"phi2", d.phi2},     {"g3", d.g3},         {"ratio", r.ratio},
          {"shifted_ratio", r.shifted_ratio},         {"regime", r.regime},
          {"shifted_regime", r.shifted_regime}};
}

}  // namespace tdi
