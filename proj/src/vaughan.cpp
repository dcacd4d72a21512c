#include "tdi/vaughan.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "tdi/errors.hpp"
#include "tdi/summation.hpp"

namespace tdi {

cplx VaughanPieces::combine(const VaughanSigns& s) const {
  return static_cast<double>(s.u1) * u1 + static_cast<double>(s.u2) * u2 +
         static_cast<double>(s.u3) * u3 + static_cast<double>(s.u4) * u4;
}

double c_coeff(std::uint64_t d, double u) {
  KahanSum<double> acc;
  for (std::uint64_t r = 1; r * r <= d; ++r) {
    if (d % r) continue;
    const std::uint64_t s = d / r;
    if (r <= u && s <= u) acc += mobius(r) * mangoldt(s);
    if (s != r && s <= u && r <= u) acc += mobius(s) * mangoldt(r);
  }
  return acc.value();
}

long a_coeff(std::uint64_t d, double u) {
  long a = 0;
  for (std::uint64_t e = 1; e * e <= d; ++e) {
    if (d % e) continue;
    if (e <= u) a += mobius(e);
    const std::uint64_t f = d / e;
    if (f != e && f <= u) a += mobius(f);
  }
  return a;
}

VaughanPieces decompose(double X, double c, double alpha, long m) {
  if (!(X > 8.0)) throw ConstraintError("Vaughan decomposition requires X > 8");
  const auto lo = static_cast<std::uint64_t>(std::floor(X / 2.0));
  const auto hi = static_cast<std::uint64_t>(std::floor(X));

  // Largest integer u with u^3 <= X; d <= X^(1/3) iff d <= u.
  auto u = static_cast<std::uint64_t>(std::cbrt(X));
  while (static_cast<double>(u + 1) * (u + 1) * (u + 1) <= X) ++u;
  while (u > 0 && static_cast<double>(u) * u * u > X) --u;

  const ArithmeticTable arith(static_cast<std::uint32_t>(hi));

  // e(f(d, l)) depends on n = dl only.
  std::vector<cplx> phase(hi - lo);
  const double md = static_cast<double>(m);
  for (std::uint64_t n = lo + 1; n <= hi; ++n) {
    const double pc = power_c(n, c);
    const double a = alpha * pc - std::nearbyint(alpha * pc);
    const double fr = md * sqrt_frac(n);
    phase[n - lo - 1] = unit_phase(a + (fr - std::nearbyint(fr)));
  }
  auto e_of = [&](std::uint64_t n) { return phase[n - lo - 1]; };

  std::vector<double> cc(u * u + 1, 0.0);
  for (std::uint64_t r = 1; r <= u; ++r) {
    const int mr = arith.mobius(static_cast<std::uint32_t>(r));
    if (mr == 0) continue;
    for (std::uint64_t s = 2; s <= u; ++s) {
      const double ls = arith.mangoldt(static_cast<std::uint32_t>(s));
      if (ls != 0.0) cc[r * s] += mr * ls;
    }
  }

  const std::uint64_t d4_max = hi / (u + 1);
  std::vector<long> aa(d4_max + 1, 0);
  for (std::uint64_t e = 1; e <= u; ++e) {
    const int me = arith.mobius(static_cast<std::uint32_t>(e));
    if (me == 0) continue;
    for (std::uint64_t d = e; d <= d4_max; d += e) aa[d] += me;
  }

  VaughanPieces out;
  out.u_cut = std::cbrt(X);
  out.signs = kVaughanSigns;

#pragma omp parallel sections
  {
#pragma omp section
    {
      KahanSum<cplx> acc;
      for (std::uint64_t d = 1; d <= u; ++d) {
        const int md_ = arith.mobius(static_cast<std::uint32_t>(d));
        if (md_ == 0) continue;
        for (std::uint64_t l = lo / d + 1; l <= hi / d; ++l)
          acc += static_cast<double>(md_) * std::log(static_cast<double>(l)) * e_of(d * l);
      }
      out.u1 = acc.value();
    }
#pragma omp section
    {
      KahanSum<cplx> acc;
      for (std::uint64_t d = 1; d <= u; ++d) {
        if (cc[d] == 0.0) continue;
        for (std::uint64_t l = lo / d + 1; l <= hi / d; ++l) acc += cc[d] * e_of(d * l);
      }
      out.u2 = acc.value();
    }
#pragma omp section
    {
      KahanSum<cplx> acc;
      for (std::uint64_t d = u + 1; d <= u * u; ++d) {
        if (cc[d] == 0.0) continue;
        for (std::uint64_t l = lo / d + 1; l <= hi / d; ++l) acc += cc[d] * e_of(d * l);
      }
      out.u3 = acc.value();
    }
#pragma omp section
    {
      KahanSum<cplx> acc;
      for (std::uint64_t d = u + 1; d <= d4_max; ++d) {
        if (aa[d] == 0) continue;
        const std::uint64_t l_lo = std::max(lo / d + 1, u + 1);
        for (std::uint64_t l = l_lo; l <= hi / d; ++l) {
          const double ll = arith.mangoldt(static_cast<std::uint32_t>(l));
          if (ll != 0.0) acc += static_cast<double>(aa[d]) * ll * e_of(d * l);
        }
      }
      out.u4 = acc.value();
    }
  }

  KahanSum<cplx> lam, corr;
  for (std::uint64_t n = lo + 1; n <= hi; ++n) {
    const double ln = arith.mangoldt(static_cast<std::uint32_t>(n));
    if (ln == 0.0) continue;
    lam += ln * e_of(n);
    if (arith.smallest_factor(static_cast<std::uint32_t>(n)) != n) corr += -ln * e_of(n);
  }
  out.mangoldt_sum = lam.value();
  out.prime_power_corr = corr.value();
  return out;
}

VaughanSigns calibrate_vaughan_signs(double X, double c, unsigned seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha_dist(-2.0, 2.0);
  std::uniform_int_distribution<long> m_dist(-20, 20);
  std::vector<VaughanPieces> runs;
  for (int i = 0; i < trials; ++i) runs.push_back(decompose(X, c, alpha_dist(rng), m_dist(rng)));

  int found = 0;
  VaughanSigns best;
  for (int mask = 0; mask < 16; ++mask) {
    const VaughanSigns s{mask & 1 ? -1 : 1, mask & 2 ? -1 : 1, mask & 4 ? -1 : 1,
                         mask & 8 ? -1 : 1};
    bool ok = true;
    for (const auto& p : runs) {
      const double scale = std::max(1.0, std::abs(p.mangoldt_sum));
      if (std::abs(p.combine(s) - p.mangoldt_sum) > 1e-9 * scale) ok = false;
    }
    if (ok) {
      ++found;
      best = s;
    }
  }
  if (found != 1)
    throw VerificationError("Vaughan sign calibration did not single out one pattern");
  return best;
}

}  // namespace tdi
