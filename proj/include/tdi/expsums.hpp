#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tdi/core.hpp"
#include "tdi/smoothing.hpp"

namespace tdi {

using cplx = std::complex<double>;

struct PrimeEntry {
  std::uint64_t p = 0;
  double logp = 0;
  double pc = 0;         // p^c
  double sqrt_frac = 0;  // sqrt(p) mod 1
  double sqrt_dist = 0;  // ||sqrt(p)||
};

/// Primes in (X/2, X] with the per-prime data every sum needs.
struct PrimeTable {
  double X = 0;
  double c = 0;
  std::vector<PrimeEntry> entries;
  std::optional<double> filter_Y;
  std::vector<char> mask;  // set by apply_filter: ||sqrt p|| < filter_Y

  std::size_t size() const { return entries.size(); }
};

inline constexpr std::size_t kDefaultTableBudget = std::size_t{1} << 30;

PrimeTable build_table(const Params& params, std::size_t memory_budget = kDefaultTableBudget);
PrimeTable build_table(double X, double c, std::size_t memory_budget = kDefaultTableBudget);
/// Table over an explicit prime list; every p must satisfy X/2 < p <= X.
PrimeTable table_from_primes(const std::vector<std::uint64_t>& primes, double X, double c);
/// Sub-table of the entries satisfying `keep`.
PrimeTable restrict_table(const PrimeTable& t, const std::function<bool(const PrimeEntry&)>& keep);
/// Marks entries with ||sqrt p|| < Y (adjudicated near the threshold).
void apply_filter(PrimeTable& t, double Y);
/// The entries that pass the ||sqrt p|| < Y filter.
PrimeTable filtered_table(const PrimeTable& t, double Y);

/// S(0) = sum of log p over the table.
double log_mass(const PrimeTable& t);

cplx s_alpha(const PrimeTable& t, double alpha);
cplx u_alpha(const PrimeTable& t, double alpha, long m);
cplx h_alpha(const PrimeTable& t, double alpha, const CupFunction& f);

struct VValue {
  cplx value;
  double tail_bound = 0;  // S(0) * sum_{|m| > m_max} |g(m)|
};

/// ceil(r / Delta), the truncation matching M.
long default_m_max(const CupFunction& f);
VValue v_alpha(const PrimeTable& t, double alpha, const CupFunction& f, long m_max);

/// Per-prime weight 2 * sum_{m=1}^{m_max} g(m) cos(2 pi m frac(sqrt p)), so that
/// V(alpha) = sum_p weight_p log p e(alpha p^c).
std::vector<double> v_weights(const PrimeTable& t, const CupFunction& f, long m_max);

enum class SumKind { S, U, H, V };

struct SumRequest {
  SumKind kind = SumKind::S;
  long m = 0;                       // U only
  std::optional<CupFunction> cup;   // H and V
  long m_max = 0;                   // V only; 0 selects default_m_max
};

/// Pointwise values over an alpha grid. The OpenMP version distributes grid
/// points over threads and is bit-identical to the serial reference.
std::vector<cplx> grid_eval(const PrimeTable& t, const SumRequest& req,
                            std::span<const double> alphas);
std::vector<cplx> grid_eval_serial(const PrimeTable& t, const SumRequest& req,
                                   std::span<const double> alphas);

/// sum_i w_i e(alpha pc_i + m frac_i) with the deterministic chunked reduction.
cplx weighted_sum(const PrimeTable& t, std::span<const double> weights, double alpha,
                  long m = 0, bool parallel = false);

}  // namespace tdi
