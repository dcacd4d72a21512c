#pragma once

#include <cstddef>
#include <functional>

namespace tdi {

struct QuadResult {
  double value = 0;
  double error = 0;  // sum of per-panel |K15 - G7| estimates
  std::size_t evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature. [a, b] is first cut into equal
/// panels no wider than max_panel; each panel is bisected until its error
/// estimate is below its share of max(abs_tol, rel_tol * |integral|).
/// Panels are processed in parallel and summed in order, so the result is
/// independent of thread count. f must be safe to call concurrently.
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double max_panel, double rel_tol = 1e-10, double abs_tol = 0.0);

QuadResult integrate_gk_serial(const std::function<double(double)>& f, double a, double b,
                               double max_panel, double rel_tol = 1e-10,
                               double abs_tol = 0.0);

}  // namespace tdi
