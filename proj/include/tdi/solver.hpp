#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tdi/core.hpp"
#include "tdi/expsums.hpp"
#include "tdi/quadrature.hpp"
#include "tdi/smoothing.hpp"

namespace tdi {

using Triple = std::array<std::uint64_t, 3>;

/// Ordered prime triples with |p1^c + p2^c + p3^c - N| < eps and every
/// ||sqrt p_i|| < Y.
struct TripleReport {
  std::vector<Triple> triples;       // empty in count-only mode
  std::uint64_t count = 0;           // ordered count, always exact
  double gamma = 0;                  // sum of log p1 log p2 log p3
  double N = 0;
  double eps = 0;
  double Y = 0;
  std::size_t filtered_primes = 0;
  bool count_only = false;           // triple budget exceeded
  std::vector<Triple> boundary_flags;  // candidates decided in extended precision
  std::vector<std::string> notices;
  std::optional<Params> params;
};

inline constexpr std::uint64_t kDefaultTripleBudget = 10'000'000;
/// Candidates whose margin to eps is below this fraction of N are re-decided
/// in extended precision.
inline constexpr double kAdjudicationBand = 1e-9;

TripleReport find_triples(const PrimeTable& t, double N, double eps, double Y,
                          std::uint64_t triple_budget = kDefaultTripleBudget);
TripleReport find_triples_serial(const PrimeTable& t, double N, double eps, double Y,
                                 std::uint64_t triple_budget = kDefaultTripleBudget);
/// Uses the Params' N, eps and Y and records the snapshot.
TripleReport find_triples(const PrimeTable& t, const Params& p,
                          std::uint64_t triple_budget = kDefaultTripleBudget);

/// Exhaustive O(n^3) enumeration over the Y-filtered table, decided entirely
/// in extended precision. Test oracle.
std::vector<Triple> brute_force_triples(const PrimeTable& t, double N, double eps, double Y);

/// Log-product sum over the listed triples.
double gamma_weight(const TripleReport& r);

/// Multiset classes of the listed triples.
struct UnorderedCounts {
  std::uint64_t all_distinct = 0;
  std::uint64_t one_repeat = 0;
  std::uint64_t all_equal = 0;
  /// Every class appears with all of its distinct orderings.
  bool closed = true;
  std::uint64_t ordered() const { return 6 * all_distinct + 3 * one_repeat + all_equal; }
};
UnorderedCounts unordered_counts(const TripleReport& r);

// ---------------------------------------------------------------------------
// Smoothed counting integrals

/// sum over triples of w1 w2 w3 eps^-1 A((p1^c + p2^c + p3^c - N) / eps),
/// restricted to |x| <= window * eps. Omitted terms are all <= 0, so the
/// windowed value is an upper bound and value - truncation_bound a lower one.
struct SmoothedSum {
  double value = 0;
  double positive = 0;   // sum of positive terms
  double negative = 0;   // sum of negative terms
  double truncation_bound = 0;
  double window = 0;
  std::uint64_t terms = 0;
};

inline constexpr double kDefaultWindow = 50.0;

/// I1: weights chi(sqrt p) log p.
SmoothedSum i1_direct(const PrimeTable& t, const CupFunction& f, const SelbergMinorant& s,
                      double N, double eps, double window = kDefaultWindow);
SmoothedSum i1_direct_serial(const PrimeTable& t, const CupFunction& f,
                             const SelbergMinorant& s, double N, double eps,
                             double window = kDefaultWindow);
SmoothedSum i1_direct(const PrimeTable& t, const CupFunction& f, const SelbergMinorant& s,
                      const Params& p, double window = kDefaultWindow);

/// I: weights log p (chi = 1). An infinite window sums every triple.
SmoothedSum i_direct(const PrimeTable& t, const SelbergMinorant& s, double N, double eps,
                     double window = kDefaultWindow);
SmoothedSum i_direct(const PrimeTable& t, const SelbergMinorant& s, const Params& p,
                     double window = kDefaultWindow);

/// I as the integral over [-P, P] of Re S(alpha)^3 e(-N alpha) Ahat(eps alpha).
QuadResult i_by_quadrature(const PrimeTable& t, const SelbergMinorant& s, double N,
                           double eps);

struct I1Check {
  double i1 = 0;
  double bound = 0;  // Gamma / eps + truncation bound
  bool holds = false;
};
/// I1 <= Gamma / eps + truncation; throws VerificationError when violated.
I1Check check_i1_bound(const SmoothedSum& i1, const TripleReport& r);

// ---------------------------------------------------------------------------
// Scaling study

enum class YMode { formula, fixed };

struct ScalingRow {
  double X = 0;
  double N = 0;
  double eps = 0;
  double Y = 0;
  double gamma = 0;
  std::uint64_t count = 0;
  double predictor = 0;  // eps Y^3 X^{3-c}
  double ratio = 0;      // gamma / predictor
  double i1 = 0;
  double i1_bound = 0;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double fitted_slope = 0;    // least-squares slope of log gamma against log X
  double analytic_slope = 0;  // slope of log predictor against log X
  double ratio_spread = 0;    // max ratio / min ratio
};

struct ScalingConfig {
  double c = 1.01;
  double tau = 1.02;
  double delta = 0.001;
  double mu = kDefaultMu;
  YMode mode = YMode::fixed;
  double Y0 = 0.25;
  std::uint64_t triple_budget = kDefaultTripleBudget;
  std::size_t memory_budget = kDefaultTableBudget;
  bool with_i1 = true;
};

/// Runs the solver for N = 2 X^c over the X grid (at least 4 points).
ScalingStudy scaling_study(const ScalingConfig& cfg, const std::vector<double>& X_grid);

nlohmann::ordered_json to_json(const TripleReport& r);
nlohmann::ordered_json to_json(const SmoothedSum& s);
nlohmann::ordered_json to_json(const ScalingRow& r);

}  // namespace tdi
