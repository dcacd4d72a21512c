#include "tdi/expsums.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tdi/errors.hpp"
#include "tdi/summation.hpp"

namespace tdi {

namespace {

PrimeEntry make_entry(std::uint64_t p, double c) {
  PrimeEntry e;
  e.p = p;
  e.logp = std::log(static_cast<double>(p));
  e.pc = power_c(p, c);
  e.sqrt_frac = sqrt_frac(p);
  e.sqrt_dist = std::min(e.sqrt_frac, 1.0 - e.sqrt_frac);
  return e;
}

std::vector<double> log_weights(const PrimeTable& t) {
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) w[i] = t.entries[i].logp;
  return w;
}

std::vector<double> chi_weights(const PrimeTable& t, const CupFunction& f) {
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    w[i] = chi_eval(f, t.entries[i].sqrt_frac) * t.entries[i].logp;
  return w;
}

std::vector<double> weights_for(const PrimeTable& t, const SumRequest& req) {
  switch (req.kind) {
    case SumKind::S:
    case SumKind::U:
      return log_weights(t);
    case SumKind::H:
      if (!req.cup) throw ConstraintError("H(alpha) requires a cup function");
      return chi_weights(t, *req.cup);
    case SumKind::V: {
      if (!req.cup) throw ConstraintError("V(alpha) requires a cup function");
      const long m_max = req.m_max > 0 ? req.m_max : default_m_max(*req.cup);
      auto w = v_weights(t, *req.cup, m_max);
      for (std::size_t i = 0; i < t.size(); ++i) w[i] *= t.entries[i].logp;
      return w;
    }
  }
  return {};
}

}  // namespace

PrimeTable build_table(double X, double c, std::size_t memory_budget) {
  if (!(X >= 2.0)) throw ConstraintError("build_table requires X >= 2");
  const double approx_count = 1.3 * X / (2.0 * std::log(X)) + 64.0;
  if (approx_count * sizeof(PrimeEntry) > static_cast<double>(memory_budget))
    throw BudgetError("prime table for X exceeds the configured memory budget");
  const auto lo = static_cast<std::uint64_t>(std::floor(X / 2.0));
  const auto hi = static_cast<std::uint64_t>(std::floor(X));
  PrimeTable t;
  t.X = X;
  t.c = c;
  if (lo < hi) {
    const auto primes = sieve_primes(lo, hi);
    t.entries.reserve(primes.size());
    for (auto p : primes) t.entries.push_back(make_entry(p, c));
  }
  return t;
}

PrimeTable build_table(const Params& params, std::size_t memory_budget) {
  return build_table(params.X, params.c, memory_budget);
}

PrimeTable table_from_primes(const std::vector<std::uint64_t>& primes, double X, double c) {
  PrimeTable t;
  t.X = X;
  t.c = c;
  std::uint64_t prev = 0;
  for (auto p : primes) {
    if (!(p > X / 2.0 && static_cast<double>(p) <= X))
      throw ConstraintError("table entries must satisfy X/2 < p <= X");
    if (p <= prev) throw ConstraintError("table entries must be strictly increasing");
    if (mangoldt(p) != std::log(static_cast<double>(p)))
      throw ConstraintError("table entries must be prime");
    t.entries.push_back(make_entry(p, c));
    prev = p;
  }
  return t;
}

PrimeTable restrict_table(const PrimeTable& t,
                          const std::function<bool(const PrimeEntry&)>& keep) {
  PrimeTable out;
  out.X = t.X;
  out.c = t.c;
  for (const auto& e : t.entries)
    if (keep(e)) out.entries.push_back(e);
  return out;
}

void apply_filter(PrimeTable& t, double Y) {
  t.filter_Y = Y;
  t.mask.assign(t.size(), 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& e = t.entries[i];
    t.mask[i] = std::abs(e.sqrt_dist - Y) > 1e-12 ? (e.sqrt_dist < Y)
                                                  : sqrt_distance_below(e.p, Y);
  }
}

PrimeTable filtered_table(const PrimeTable& t, double Y) {
  PrimeTable tmp = t;
  apply_filter(tmp, Y);
  PrimeTable out;
  out.X = t.X;
  out.c = t.c;
  out.filter_Y = Y;
  for (std::size_t i = 0; i < tmp.size(); ++i)
    if (tmp.mask[i]) out.entries.push_back(tmp.entries[i]);
  out.mask.assign(out.size(), 1);
  return out;
}

double log_mass(const PrimeTable& t) {
  return chunked_sum<double>(t.size(), [&](std::size_t i) { return t.entries[i].logp; });
}

cplx weighted_sum(const PrimeTable& t, std::span<const double> w, double alpha, long m,
                  bool parallel) {
  const double md = static_cast<double>(m);
  return chunked_sum<cplx>(
      t.size(),
      [&](std::size_t i) {
        const auto& e = t.entries[i];
        // m * floor(sqrt p) is an integer, so only the fractional part enters.
        const double a = alpha * e.pc - std::nearbyint(alpha * e.pc);
        const double b = md * e.sqrt_frac - std::nearbyint(md * e.sqrt_frac);
        return w[i] * unit_phase(a + b);
      },
      parallel);
}

cplx s_alpha(const PrimeTable& t, double alpha) {
  const auto w = log_weights(t);
  return weighted_sum(t, w, alpha, 0, true);
}

cplx u_alpha(const PrimeTable& t, double alpha, long m) {
  const auto w = log_weights(t);
  return weighted_sum(t, w, alpha, m, true);
}

cplx h_alpha(const PrimeTable& t, double alpha, const CupFunction& f) {
  const auto w = chi_weights(t, f);
  return weighted_sum(t, w, alpha, 0, true);
}

long default_m_max(const CupFunction& f) {
  return static_cast<long>(std::ceil(f.r / f.Delta - 1e-9));
}

std::vector<double> v_weights(const PrimeTable& t, const CupFunction& f, long m_max) {
  std::vector<double> g(static_cast<std::size_t>(std::max(0L, m_max)) + 1);
  for (long m = 1; m <= m_max; ++m) g[m] = fourier_coeff(f, m);
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double frac = t.entries[i].sqrt_frac;
    KahanSum<double> acc;
    for (long m = 1; m <= m_max; ++m) {
      const double x = static_cast<double>(m) * frac;
      acc += 2.0 * g[m] * std::cos(2.0 * std::numbers::pi * (x - std::nearbyint(x)));
    }
    w[i] = acc.value();
  }
  return w;
}

VValue v_alpha(const PrimeTable& t, double alpha, const CupFunction& f, long m_max) {
  if (m_max < 1) throw ConstraintError("v_alpha requires m_max >= 1");
  auto w = v_weights(t, f, m_max);
  for (std::size_t i = 0; i < t.size(); ++i) w[i] *= t.entries[i].logp;
  VValue v;
  v.value = weighted_sum(t, w, alpha, 0, true);
  v.tail_bound = log_mass(t) * cup_tail_bound(f.Delta, f.r, m_max);
  return v;
}

std::vector<cplx> grid_eval(const PrimeTable& t, const SumRequest& req,
                            std::span<const double> alphas) {
  const auto w = weights_for(t, req);
  const long m = req.kind == SumKind::U ? req.m : 0;
  std::vector<cplx> out(alphas.size());
  const auto n = static_cast<std::ptrdiff_t>(alphas.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = weighted_sum(t, w, alphas[i], m, false);
  return out;
}

std::vector<cplx> grid_eval_serial(const PrimeTable& t, const SumRequest& req,
                                   std::span<const double> alphas) {
  const auto w = weights_for(t, req);
  const long m = req.kind == SumKind::U ? req.m : 0;
  std::vector<cplx> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(weighted_sum(t, w, a, m, false));
  return out;
}

}  // namespace tdi
