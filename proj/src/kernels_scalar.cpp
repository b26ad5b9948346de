#include <cmath>

#include "actionswitch/kernels.hpp"
#include "kernels_internal.hpp"

namespace actionswitch::kernels {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
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
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g;
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * (g * g);
    const double m_hat = m[i] / s.bias1;
    const double v_hat = v[i] / s.bias2;
    params[i] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot, axpy, gemv_acc, gemv_t_acc, ger_acc, adam_update};
  return table;
}

}  // namespace actionswitch::kernels
