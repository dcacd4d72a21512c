#include "tdi/quadrature.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "tdi/summation.hpp"

namespace tdi {

namespace {

// Kronrod 15-point abscissae (positive half) and weights; Gauss 7-point
// weights on the odd Kronrod nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double value;
  double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b, std::size_t& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double rk = fc * kWgk[7];
  double rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double s = f(center - dx) + f(center + dx);
    rk += kWgk[j] * s;
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  evals += 15;
  return {rk * half, std::abs((rk - rg) * half)};
}

Panel adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
            std::size_t& evals) {
  const Panel p = gk15(f, a, b, evals);
  if (p.error <= tol || depth == 0) return p;
  const double mid = 0.5 * (a + b);
  const Panel l = adapt(f, a, mid, 0.5 * tol, depth - 1, evals);
  const Panel r = adapt(f, mid, b, 0.5 * tol, depth - 1, evals);
  return {l.value + r.value, l.error + r.error};
}

QuadResult run(const std::function<double(double)>& f, double a, double b, double max_panel,
               double rel_tol, double abs_tol, bool parallel) {
  if (b == a) return {};
  const auto panels = static_cast<std::size_t>(std::ceil(std::abs(b - a) / max_panel));
  const std::size_t n = std::max<std::size_t>(1, panels);
  const double width = (b - a) / static_cast<double>(n);

  // First pass: fixed panels, used to set the absolute target.
  std::vector<Panel> first(n);
  std::vector<std::size_t> evals(n, 0);
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (std::size_t i = 0; i < n; ++i)
    first[i] = gk15(f, a + i * width, (i + 1 == n) ? b : a + (i + 1) * width, evals[i]);

  KahanSum<double> rough;
  for (const auto& p : first) rough += p.value;
  const double target = std::max(abs_tol, rel_tol * std::abs(rough.value()));
  const double per_panel = target / static_cast<double>(n);

  std::vector<Panel> refined(n);
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (std::size_t i = 0; i < n; ++i) {
    if (first[i].error <= per_panel) {
      refined[i] = first[i];
      continue;
    }
    const double lo = a + i * width;
    const double hi = (i + 1 == n) ? b : a + (i + 1) * width;
    const double mid = 0.5 * (lo + hi);
    const Panel l = adapt(f, lo, mid, 0.5 * per_panel, 30, evals[i]);
    const Panel r = adapt(f, mid, hi, 0.5 * per_panel, 30, evals[i]);
    refined[i] = {l.value + r.value, l.error + r.error};
  }

  KahanSum<double> value, error;
  QuadResult out;
  for (std::size_t i = 0; i < n; ++i) {
    value += refined[i].value;
    error += refined[i].error;
    out.evaluations += evals[i];
  }
  out.value = value.value();
  out.error = error.value();
  return out;
}

}  // namespace

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double max_panel, double rel_tol, double abs_tol) {
  return run(f, a, b, max_panel, rel_tol, abs_tol, true);
}

QuadResult integrate_gk_serial(const std::function<double(double)>& f, double a, double b,
                               double max_panel, double rel_tol, double abs_tol) {
  return run(f, a, b, max_panel, rel_tol, abs_tol, false);
}

}  // namespace tdi
