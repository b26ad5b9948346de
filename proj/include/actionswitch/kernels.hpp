#pragma once

// Dense double-precision inner loops used by the frame scorer and optimizer.
//
// Every routine has a scalar reference implementation. Vector variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled into the library when the toolchain
// supports them and are selected at runtime from CPU features. ASW_KERNELS
// (scalar|avx2|neon|auto) overrides the choice.
//
// Vector variants reassociate sums and contract multiply-adds, so dot/gemv
// results match the reference to rounding (see tests/test_kernels.cpp), not
// bitwise. adam_update uses no contraction and matches bitwise.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "actionswitch/tensor.hpp"

namespace actionswitch::kernels {

struct AdamStep {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double bias1 = 1.0;  // 1 - beta1^t
  double bias2 = 1.0;  // 1 - beta2^t
};

struct KernelTable {
  std::string_view name;
  double (*dot)(std::span<const double> a, std::span<const double> b);
  // y += alpha * x
  void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);
  // y += W x
  void (*gemv_acc)(ConstMatrixRef w, std::span<const double> x, std::span<double> y);
  // x += W^T y
  void (*gemv_t_acc)(ConstMatrixRef w, std::span<const double> y, std::span<double> x);
  // G += a b^T
  void (*ger_acc)(MatrixRef g, std::span<const double> a, std::span<const double> b);
  void (*adam_update)(const AdamStep& step, std::span<double> params,
                      std::span<const double> grads, std::span<double> m,
                      std::span<double> v);
};

const KernelTable& scalar_table();

// Variants compiled in and usable on this CPU, scalar first.
std::vector<const KernelTable*> available_tables();

// nullptr when the variant is not compiled in or not supported by the CPU.
const KernelTable* find_table(std::string_view name);

// Table picked once per process (ASW_KERNELS, else best available).
const KernelTable& active();

}  // namespace actionswitch::kernels
