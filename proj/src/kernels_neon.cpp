// AArch64 only. Advanced SIMD is mandatory there, so no runtime probe is needed.
#include <arm_neon.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace actionswitch::kernels {
namespace {

constexpr std::size_t kLanes = 2;

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(pa + i), vld1q_f64(pb + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(pa + i + kLanes), vld1q_f64(pb + i + kLanes));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += pa[i] * pb[i];
  return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f64(y.data() + i, vfmaq_f64(vld1q_f64(y.data() + i), va, vld1q_f64(x.data() + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
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

void adam_update(const AdamStep& s, std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v) {
  const std::size_t n = params.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t g = vld1q_f64(grads.data() + i);
    float64x2_t mi = vaddq_f64(vmulq_n_f64(vld1q_f64(m.data() + i), s.beta1),
                               vmulq_n_f64(g, 1.0 - s.beta1));
    float64x2_t vi = vaddq_f64(vmulq_n_f64(vld1q_f64(v.data() + i), s.beta2),
                               vmulq_n_f64(vmulq_f64(g, g), 1.0 - s.beta2));
    vst1q_f64(m.data() + i, mi);
    vst1q_f64(v.data() + i, vi);
    const float64x2_t m_hat = vdivq_f64(mi, vdupq_n_f64(s.bias1));
    const float64x2_t v_hat = vdivq_f64(vi, vdupq_n_f64(s.bias2));
    const float64x2_t step = vdivq_f64(vmulq_n_f64(m_hat, s.lr),
                                       vaddq_f64(vsqrtq_f64(v_hat), vdupq_n_f64(s.eps)));
    vst1q_f64(params.data() + i, vsubq_f64(vld1q_f64(params.data() + i), step));
  }
  for (; i < n; ++i) {
    const double gi = grads[i];
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * gi;
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * (gi * gi);
    params[i] -= s.lr * (m[i] / s.bias1) / (std::sqrt(v[i] / s.bias2) + s.eps);
  }
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{"neon", dot, axpy, gemv_acc, gemv_t_acc, ger_acc, adam_update};
  return table;
}

}  // namespace actionswitch::kernels
