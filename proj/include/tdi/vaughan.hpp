#pragma once

#include <cstdint>

#include "tdi/expsums.hpp"

namespace tdi {

/// Coefficients of the four pieces in U = s1 U1 + s2 U2 + s3 U3 + s4 U4 + corr.
struct VaughanSigns {
  int u1 = 1;
  int u2 = -1;
  int u3 = -1;
  int u4 = -1;
  friend bool operator==(const VaughanSigns&, const VaughanSigns&) = default;
};

/// Frozen after calibration (see calibrate_vaughan_signs).
inline constexpr VaughanSigns kVaughanSigns{1, -1, -1, -1};

struct VaughanPieces {
  cplx u1, u2, u3, u4;
  cplx prime_power_corr;  // -sum over p^k in (X/2, X], k >= 2, of log p e(...)
  cplx mangoldt_sum;      // sum over (X/2, X] of Lambda(n) e(alpha n^c + m sqrt n)
  double u_cut = 0;       // X^(1/3)
  VaughanSigns signs;

  /// s1 U1 + s2 U2 + s3 U3 + s4 U4 under the given signs.
  cplx combine(const VaughanSigns& s) const;
  /// combine(signs) + prime_power_corr, which reproduces U(alpha, m).
  cplx reconstruct() const { return combine(signs) + prime_power_corr; }
};

/// c(d) = sum over rs = d, r <= u, s <= u of mu(r) Lambda(s).
double c_coeff(std::uint64_t d, double u);
/// a(d) = sum over e | d, e <= u of mu(e).
long a_coeff(std::uint64_t d, double u);

/// Vaughan's identity with both cuts at u = X^(1/3), computing each double
/// sum over (d, l) as written. Requires X > 8.
VaughanPieces decompose(double X, double c, double alpha, long m);
inline VaughanPieces decompose(const PrimeTable& t, double alpha, long m) {
  return decompose(t.X, t.c, alpha, m);
}

/// Selects the unique sign pattern under which the identity holds exactly
/// for `trials` random (alpha, m) at the given X; throws VerificationError if
/// none or more than one pattern fits.
VaughanSigns calibrate_vaughan_signs(double X, double c, unsigned seed, int trials = 5);

}  // namespace tdi
