#include "tdi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "tdi/errors.hpp"
#include "tdi/summation.hpp"

namespace tdi {

using std::numbers::pi;

namespace {

constexpr std::size_t kRowChunk = 8;

struct Chunk {
  std::vector<Triple> triples;
  std::vector<Triple> flags;
  std::uint64_t count = 0;
  KahanSum<double> gamma;
};

TripleReport run_triples(const PrimeTable& t, double N, double eps, double Y,
                         std::uint64_t budget, bool parallel) {
  if (!(eps > 0.0)) throw ConstraintError("constraint violated: eps > 0 (got " +
                                          std::to_string(eps) + ")");
  if (!(Y > 0.0 && Y < kYCeiling))
    throw ConstraintError("constraint violated: Y < 0.45 (got " + std::to_string(Y) + ")");

  const PrimeTable f = filtered_table(t, Y);
  const std::size_t n = f.size();
  TripleReport out;
  out.N = N;
  out.eps = eps;
  out.Y = Y;
  out.filtered_primes = n;
  if (n == 0) {
    out.notices.push_back("no prime passes the Y filter");
    return out;
  }

  std::vector<double> pc(n);
  for (std::size_t i = 0; i < n; ++i) pc[i] = f.entries[i].pc;
  const double band = kAdjudicationBand * std::abs(N);
  const ext_float N_ext(N), eps_ext(eps);
  const double c = f.c;

  const std::size_t chunks = (n + kRowChunk - 1) / kRowChunk;
  std::vector<Chunk> parts(chunks);

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    Chunk& part = parts[ch];
    const std::size_t i_end = std::min(n, (ch + 1) * kRowChunk);
    for (std::size_t i = ch * kRowChunk; i < i_end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double s = pc[i] + pc[j];
        const auto k_lo = std::lower_bound(pc.begin(), pc.end(), N - eps - band - s);
        const auto k_hi = std::upper_bound(k_lo, pc.end(), N + eps + band - s);
        for (auto it = k_lo; it != k_hi; ++it) {
          const auto k = static_cast<std::size_t>(it - pc.begin());
          const double dev = s + pc[k] - N;
          const double margin = eps - std::abs(dev);
          bool hit = margin > 0.0;
          const Triple tr{f.entries[i].p, f.entries[j].p, f.entries[k].p};
          if (std::abs(margin) < band) {
            const ext_float d = power_c_ext(tr[0], c) + power_c_ext(tr[1], c) +
                                power_c_ext(tr[2], c) - N_ext;
            hit = abs(d) < eps_ext;
            part.flags.push_back(tr);
          }
          if (!hit) continue;
          ++part.count;
          part.gamma += f.entries[i].logp * f.entries[j].logp * f.entries[k].logp;
          if (part.triples.size() <= budget) part.triples.push_back(tr);
        }
      }
    }
  }

  KahanSum<double> gamma;
  for (auto& part : parts) {
    out.count += part.count;
    gamma += part.gamma.value();
    out.boundary_flags.insert(out.boundary_flags.end(), part.flags.begin(), part.flags.end());
  }
  out.gamma = gamma.value();
  if (out.count > budget) {
    out.count_only = true;
    out.notices.push_back("triple budget exceeded: " + std::to_string(out.count) + " > " +
                          std::to_string(budget) + ", count-only mode");
  } else {
    out.triples.reserve(out.count);
    for (auto& part : parts)
      out.triples.insert(out.triples.end(), part.triples.begin(), part.triples.end());
  }
  return out;
}

}  // namespace

TripleReport find_triples(const PrimeTable& t, double N, double eps, double Y,
                          std::uint64_t triple_budget) {
  return run_triples(t, N, eps, Y, triple_budget, true);
}

TripleReport find_triples_serial(const PrimeTable& t, double N, double eps, double Y,
                                 std::uint64_t triple_budget) {
  return run_triples(t, N, eps, Y, triple_budget, false);
}

TripleReport find_triples(const PrimeTable& t, const Params& p, std::uint64_t triple_budget) {
  TripleReport r = find_triples(t, p.N, p.eps, p.Y, triple_budget);
  r.params = p;
  return r;
}

std::vector<Triple> brute_force_triples(const PrimeTable& t, double N, double eps, double Y) {
  const PrimeTable f = filtered_table(t, Y);
  const std::size_t n = f.size();
  std::vector<ext_float> pce(n);
  for (std::size_t i = 0; i < n; ++i) pce[i] = power_c_ext(f.entries[i].p, f.c);
  const ext_float N_ext(N), eps_ext(eps);
  // Wide double pre-screen; anything near the edge is decided in extended precision.
  const double screen = eps + 1e-7 * std::abs(N);
  std::vector<Triple> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double dev = f.entries[i].pc + f.entries[j].pc + f.entries[k].pc - N;
        if (std::abs(dev) >= screen) continue;
        if (abs(pce[i] + pce[j] + pce[k] - N_ext) < eps_ext)
          out.push_back({f.entries[i].p, f.entries[j].p, f.entries[k].p});
      }
  return out;
}

double gamma_weight(const TripleReport& r) {
  if (r.count_only) return r.gamma;
  KahanSum<double> acc;
  for (const auto& tr : r.triples)
    acc += std::log(static_cast<double>(tr[0])) * std::log(static_cast<double>(tr[1])) *
           std::log(static_cast<double>(tr[2]));
  return acc.value();
}

UnorderedCounts unordered_counts(const TripleReport& r) {
  std::map<Triple, std::uint64_t> seen;
  for (auto tr : r.triples) {
    std::sort(tr.begin(), tr.end());
    ++seen[tr];
  }
  UnorderedCounts out;
  for (const auto& [tr, times] : seen) {
    std::uint64_t expect = 6;
    if (tr[0] == tr[2]) {
      ++out.all_equal;
      expect = 1;
    } else if (tr[0] == tr[1] || tr[1] == tr[2]) {
      ++out.one_repeat;
      expect = 3;
    } else {
      ++out.all_distinct;
    }
    if (times != expect) out.closed = false;
  }
  return out;
}

namespace {

struct Weighted {
  std::vector<double> pc;
  std::vector<double> w;
};

SmoothedSum smoothed(const Weighted& in, const SelbergMinorant& s, double N, double eps,
                     double window, bool parallel) {
  if (!(eps > 0.0)) throw ConstraintError("constraint violated: eps > 0");
  if (!(window > 1.0)) throw ConstraintError("smoothing window must exceed 1");
  const auto& pc = in.pc;
  const auto& w = in.w;
  const std::size_t n = pc.size();
  SmoothedSum out;
  out.window = window;
  if (n == 0) return out;

  const double reach = std::isinf(window) ? std::numeric_limits<double>::infinity()
                                          : window * eps;
  const std::size_t chunks = (n + kRowChunk - 1) / kRowChunk;
  std::vector<KahanSum<double>> pos(chunks), neg(chunks);
  std::vector<std::uint64_t> terms(chunks, 0);

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    const std::size_t i_end = std::min(n, (ch + 1) * kRowChunk);
    for (std::size_t i = ch * kRowChunk; i < i_end; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double s2 = pc[i] + pc[j];
        const double wij = w[i] * w[j] / eps;
        auto k_lo = pc.begin(), k_hi = pc.end();
        if (!std::isinf(reach)) {
          k_lo = std::lower_bound(pc.begin(), pc.end(), N - reach - s2);
          k_hi = std::upper_bound(k_lo, pc.end(), N + reach - s2);
        }
        for (auto it = k_lo; it != k_hi; ++it) {
          const auto k = static_cast<std::size_t>(it - pc.begin());
          const double x = (s2 + pc[k] - N) / eps;
          const double term = wij * w[k] * minorant_eval(s, x);
          if (term >= 0.0)
            pos[ch] += term;
          else
            neg[ch] += term;
          ++terms[ch];
        }
      }
  }

  KahanSum<double> p, q;
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    p += pos[ch].value();
    q += neg[ch].value();
    out.terms += terms[ch];
  }
  out.positive = p.value();
  out.negative = q.value();
  out.value = out.positive + out.negative;

  if (!std::isinf(window) && n > 1) {
    // Omitted terms: for each pair, the x values left of and right of the
    // window are spaced at least min_gap / eps apart and bounded by the
    // envelope 2 / (pi^2 mu^2 (|x| - 1)^2).
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) min_gap = std::min(min_gap, pc[i] - pc[i - 1]);
    const double dx = min_gap / eps;
    const double r1 = window - 1.0;
    const double per_side =
        2.0 / (pi * pi * s.mu * s.mu) * (1.0 / (r1 * r1) + 1.0 / (r1 * dx));
    KahanSum<double> wsum;
    double wmax = 0.0;
    for (double v : w) {
      wsum += v;
      wmax = std::max(wmax, v);
    }
    out.truncation_bound = wsum.value() * wsum.value() * wmax / eps * 2.0 * per_side;
  }
  return out;
}

Weighted chi_weighted(const PrimeTable& t, const CupFunction& f) {
  Weighted out;
  for (const auto& e : t.entries) {
    const double chi = chi_eval(f, e.sqrt_frac);
    if (chi <= 0.0) continue;
    out.pc.push_back(e.pc);
    out.w.push_back(chi * e.logp);
  }
  return out;
}

Weighted log_weighted(const PrimeTable& t) {
  Weighted out;
  for (const auto& e : t.entries) {
    out.pc.push_back(e.pc);
    out.w.push_back(e.logp);
  }
  return out;
}

}  // namespace

SmoothedSum i1_direct(const PrimeTable& t, const CupFunction& f, const SelbergMinorant& s,
                      double N, double eps, double window) {
  return smoothed(chi_weighted(t, f), s, N, eps, window, true);
}

SmoothedSum i1_direct_serial(const PrimeTable& t, const CupFunction& f,
                             const SelbergMinorant& s, double N, double eps, double window) {
  return smoothed(chi_weighted(t, f), s, N, eps, window, false);
}

SmoothedSum i1_direct(const PrimeTable& t, const CupFunction& f, const SelbergMinorant& s,
                      const Params& p, double window) {
  return i1_direct(t, f, s, p.N, p.eps, window);
}

SmoothedSum i_direct(const PrimeTable& t, const SelbergMinorant& s, double N, double eps,
                     double window) {
  return smoothed(log_weighted(t), s, N, eps, window, true);
}

SmoothedSum i_direct(const PrimeTable& t, const SelbergMinorant& s, const Params& p,
                     double window) {
  return i_direct(t, s, p.N, p.eps, window);
}

QuadResult i_by_quadrature(const PrimeTable& t, const SelbergMinorant& s, double N,
                           double eps) {
  if (t.size() == 0) return {};
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) w[i] = t.entries[i].logp;
  const double P = s.mu / eps;
  const double F = std::max({std::abs(3.0 * t.entries.back().pc - N),
                             std::abs(N - 3.0 * t.entries.front().pc), 1.0});
  auto integrand = [&](double alpha) {
    const cplx S = weighted_sum(t, w, alpha);
    const double ph = N * alpha;
    const cplx z = S * S * S * unit_phase(-(ph - std::nearbyint(ph)));
    return z.real() * minorant_ft(s, eps * alpha);
  };
  return integrate_gk(integrand, -P, P, 1.0 / (4.0 * F), 1e-9);
}

I1Check check_i1_bound(const SmoothedSum& i1, const TripleReport& r) {
  I1Check out;
  out.i1 = i1.value;
  out.bound = r.gamma / r.eps + i1.truncation_bound;
  const double slack = 1e-9 * std::max(std::abs(out.bound), 1.0);
  out.holds = out.i1 <= out.bound + slack;
  if (!out.holds)
    throw VerificationError("I1 <= Gamma / eps + truncation failed: " + std::to_string(out.i1) +
                            " > " + std::to_string(out.bound));
  return out;
}

ScalingStudy scaling_study(const ScalingConfig& cfg, const std::vector<double>& X_grid) {
  if (X_grid.size() < 4) throw ConstraintError("scaling study requires at least 4 grid points");
  ScalingStudy out;
  for (double X : X_grid) {
    const double N = N_for_X(X, cfg.c);
    const Params p =
        derive_params(cfg.c, cfg.tau, cfg.delta, N, cfg.mu,
                      cfg.mode == YMode::fixed ? std::optional<double>(cfg.Y0) : std::nullopt);
    const PrimeTable t = build_table(p, cfg.memory_budget);
    const TripleReport rep = find_triples(t, p, cfg.triple_budget);

    ScalingRow row;
    row.X = p.X;
    row.N = p.N;
    row.eps = p.eps;
    row.Y = p.Y;
    row.gamma = rep.gamma;
    row.count = rep.count;
    row.predictor = p.eps * p.Y * p.Y * p.Y * std::pow(p.X, 3.0 - p.c);
    row.ratio = row.gamma / row.predictor;
    if (cfg.with_i1) {
      const CupFunction f = make_cup(p.Y, p.r);
      const SelbergMinorant s = make_minorant(p.mu);
      const SmoothedSum i1 = i1_direct(t, f, s, p);
      const I1Check chk = check_i1_bound(i1, rep);
      row.i1 = chk.i1;
      row.i1_bound = chk.bound;
    }
    out.rows.push_back(row);
  }

  // Least-squares slope in log-log coordinates.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool positive = true;
  for (const auto& row : out.rows) {
    if (!(row.gamma > 0.0)) positive = false;
    const double lx = std::log(row.X), ly = std::log(row.gamma);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double k = static_cast<double>(out.rows.size());
  out.fitted_slope = positive ? (k * sxy - sx * sy) / (k * sxx - sx * sx)
                              : std::numeric_limits<double>::quiet_NaN();
  const double y_exp =
      cfg.mode == YMode::fixed ? 0.0 : -(17.0 / 48.0) * (kTauCeiling - cfg.tau) + cfg.delta;
  out.analytic_slope = (3.0 - cfg.c) + (cfg.c - cfg.tau) + 3.0 * y_exp;

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& row : out.rows) {
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  out.ratio_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return out;
}

nlohmann::ordered_json to_json(const TripleReport& r) {
  nlohmann::ordered_json j;
  if (r.params) j["params"] = to_json(*r.params);
  j["N"] = r.N;
  j["eps"] = r.eps;
  j["Y"] = r.Y;
  j["filtered_primes"] = r.filtered_primes;
  j["count"] = r.count;
  j["gamma"] = r.gamma;
  j["count_only"] = r.count_only;
  auto flags = nlohmann::ordered_json::array();
  for (const auto& tr : r.boundary_flags) flags.push_back(tr);
  j["boundary_flags"] = flags;
  j["notices"] = r.notices;
  return j;
}

nlohmann::ordered_json to_json(const SmoothedSum& s) {
  return {{"value", s.value},   {"positive", s.positive}, {"negative", s.negative},
          {"truncation_bound", s.truncation_bound},     {"window", s.window},
          {"terms", s.terms}};
}

nlohmann::ordered_json to_json(const ScalingRow& r) {
  return {{"X", r.X},         {"N", r.N},       {"eps", r.eps},
          {"Y", r.Y},         {"gamma", r.gamma}, {"count", r.count},
          {"predictor", r.predictor}, {"ratio", r.ratio}, {"i1", r.i1},
          {"i1_bound", r.i1_bound}};
}

}  // namespace tdi
