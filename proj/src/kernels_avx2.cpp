// Built with -mavx2 -mfma -ffp-contract=off; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace actionswitch::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + kLanes), _mm256_loadu_pd(pb + i + kLanes),
                           acc1);
  }
  for (; i + kLanes <= n; i += kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += pa[i] * pb[i];
  return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const double* px = x.data();
  double* py = y.data();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(py + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i)));
  }
  for (; i < n; ++i) py[i] += alpha * px[i];
}

void gemv_acc(ConstMatrixRef w, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < w.rows; ++r) y[r] += dot(w.row(r), x);
}

void gemv_t_acc(ConstMatrixRef w, std::span<const double> y, std::span<double> x) {
  for (std::size_t r = 0; r < w.rows; ++r) axpy(y[r], w.row(r), x);
}

void ger_acc(MatrixRef g, std::span<const double> a, std::span<const double> b) {
  for (std::size_t r = 0; r < g.rows; ++r) axpy(a[r], b, g.row(r));
}

// Same operation order as the scalar reference, no contraction: bitwise equal.
void adam_update(const AdamStep& s, std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v) {
  const std::size_t n = params.size();
  const __m256d b1 = _mm256_set1_pd(s.beta1);
  const __m256d b2 = _mm256_set1_pd(s.beta2);
  const __m256d one_b1 = _mm256_set1_pd(1.0 - s.beta1);
  const __m256d one_b2 = _mm256_set1_pd(1.0 - s.beta2);
  const __m256d bias1 = _mm256_set1_pd(s.bias1);
  const __m256d bias2 = _mm256_set1_pd(s.bias2);
  const __m256d lr = _mm256_set1_pd(s.lr);
  const __m256d eps = _mm256_set1_pd(s.eps);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d g = _mm256_loadu_pd(grads.data() + i);
    __m256d mi = _mm256_loadu_pd(m.data() + i);
    __m256d vi = _mm256_loadu_pd(v.data() + i);
    mi = _mm256_add_pd(_mm256_mul_pd(b1, mi), _mm256_mul_pd(one_b1, g));
    vi = _mm256_add_pd(_mm256_mul_pd(b2, vi), _mm256_mul_pd(one_b2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m.data() + i, mi);
    _mm256_storeu_pd(v.data() + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, bias1);
    const __m256d v_hat = _mm256_div_pd(vi, bias2);
    const __m256d step =
        _mm256_div_pd(_mm256_mul_pd(lr, m_hat), _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
    _mm256_storeu_pd(params.data() + i, _mm256_sub_pd(_mm256_loadu_pd(params.data() + i), step));
  }
  for (; i < n; ++i) {
    const double gi = grads[i];
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * gi;
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * (gi * gi);
    const double m_hat = m[i] / s.bias1;
    const double v_hat = v[i] / s.bias2;
    params[i] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", dot, axpy, gemv_acc, gemv_t_acc, ger_acc, adam_update};
  return table;
}

}  // namespace actionswitch::kernels
