#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "tdi/solver.hpp"

namespace tdi::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConstraint = 2,
  kBudget = 3,
  kVerification = 4,
};

/// Every option the tool understands. Flags override values from --config.
struct RunConfig {
  std::string command;

  double c = 1.02;
  double tau = 1.028;
  double delta = 0.001;
  double mu = kDefaultMu;
  double N = 0;
  double X = 0;
  double Y = 0;
  double eps_override = 0;
  bool has_N = false, has_X = false, has_Y = false, has_eps = false;

  double alpha_min = 0, alpha_max = 0;
  bool has_alpha_range = false;
  int points = 0;  // 0: command default
  long m_max = 0;
  int threads = 0;
  std::string out;
  std::string format = "json";
  std::uint64_t budget_triples = kDefaultTripleBudget;

  // sieve
  std::uint64_t lo = 0, hi = 0;
  // expsum, vaughan-check, regime
  std::string kind = "S";
  double alpha = 0.3;
  long m = 0;
  // bounds
  std::string lemma;
  double beta = 0.31;
  int k = 2;
  double a = 0, b = 1000;
  long Q = 8;
  unsigned seed = 1;
  double d = 2, q = 1, l_lo = 0, l_hi = 0;
  // solve, scaling
  double window = kDefaultWindow;
  std::vector<double> X_grid{2e4, 4e4, 8e4, 1.6e5};
  std::string y_mode = "fixed";
};

/// Parses argv (argv[0] is the program name), runs the command and writes
/// the result to `out`; diagnostics go to `err`. Returns the exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form, independent of locale.
std::string format_number(double v);

}  // namespace tdi::cli
