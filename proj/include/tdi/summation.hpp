#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace tdi {

/// Neumaier's variant of Kahan summation. Order dependent, but the
/// compensation keeps the error independent of the term count.
template <class T>
class KahanSum {
 public:
  KahanSum& operator+=(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      cor_ += (sum_ - t) + x;
    else
      cor_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }
  T value() const { return sum_ + cor_; }

 private:
  T sum_{};
  T cor_{};
};

template <>
class KahanSum<std::complex<double>> {
 public:
  KahanSum& operator+=(std::complex<double> x) {
    re_ += x.real();
    im_ += x.imag();
    return *this;
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum<double> re_;
  KahanSum<double> im_;
};

/// e(x) = exp(2 pi i x), with x reduced mod 1 before the trig call.
inline std::complex<double> unit_phase(double x) {
  const double t = x - std::nearbyint(x);
  const double a = 2.0 * std::numbers::pi * t;
  return {std::cos(a), std::sin(a)};
}

inline constexpr std::size_t kReductionChunk = 4096;

/// Sum term(i) for i in [0, n) in fixed 4096-element chunks. Each chunk is
/// summed with compensation, then chunk totals are combined in chunk order.
/// The result does not depend on `parallel` or on the number of threads.
template <class T, class Term>
T chunked_sum(std::size_t n, Term&& term, bool parallel = false) {
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<T> partial(chunks);
#pragma omp parallel for schedule(static) if (parallel && chunks > 1)
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    KahanSum<T> acc;
    const std::size_t end = std::min(n, (ch + 1) * kReductionChunk);
    for (std::size_t i = ch * kReductionChunk; i < end; ++i) acc += term(i);
    partial[ch] = acc.value();
  }
  KahanSum<T> total;
  for (const T& v : partial) total += v;
  return total.value();
}

}  // namespace tdi
