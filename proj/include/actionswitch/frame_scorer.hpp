#pragma once

// Per-frame state scorer: one gated recurrent cell followed by a linear head.
//
//   z_t  = sigmoid(W_z x_t + U_z h_{t-1} + b_z)
//   c_t  = tanh(W_h x_t + U_h h_{t-1} + b_h)
//   h_t  = (1 - z_t) * h_{t-1} + z_t * c_t
//   y_t  = W_o h_t + b_o              (logits over switch states)
//
// There is no reset gate. backward_sequence is exact reverse-mode BPTT over
// one forward window.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "actionswitch/conservativeness.hpp"
#include "actionswitch/tensor.hpp"

namespace actionswitch {

struct ScorerDims {
  std::size_t feature_dim = 0;  // D
  std::size_t hidden_dim = 0;   // H
  std::size_t num_states = 0;   // S

  bool operator==(const ScorerDims&) const = default;
};

// All weights live in one contiguous buffer in checkpoint order:
// W_z, U_z, b_z, W_h, U_h, b_h, W_o, b_o. Gradients use the same type.
class ScorerParams {
 public:
  ScorerParams() = default;
  explicit ScorerParams(ScorerDims dims);  // zero-filled

  const ScorerDims& dims() const { return dims_; }

  MatrixRef w_z() { return mat(0, dims_.hidden_dim, dims_.feature_dim); }
  MatrixRef u_z() { return mat(1, dims_.hidden_dim, dims_.hidden_dim); }
  std::span<double> b_z() { return vec(2, dims_.hidden_dim); }
  MatrixRef w_h() { return mat(3, dims_.hidden_dim, dims_.feature_dim); }
  MatrixRef u_h() { return mat(4, dims_.hidden_dim, dims_.hidden_dim); }
  std::span<double> b_h() { return vec(5, dims_.hidden_dim); }
  MatrixRef w_o() { return mat(6, dims_.num_states, dims_.hidden_dim); }
  std::span<double> b_o() { return vec(7, dims_.num_states); }

  ConstMatrixRef w_z() const { return const_cast<ScorerParams*>(this)->w_z(); }
  ConstMatrixRef u_z() const { return const_cast<ScorerParams*>(this)->u_z(); }
  std::span<const double> b_z() const { return const_cast<ScorerParams*>(this)->b_z(); }
  ConstMatrixRef w_h() const { return const_cast<ScorerParams*>(this)->w_h(); }
  ConstMatrixRef u_h() const { return const_cast<ScorerParams*>(this)->u_h(); }
  std::span<const double> b_h() const { return const_cast<ScorerParams*>(this)->b_h(); }
  ConstMatrixRef w_o() const { return const_cast<ScorerParams*>(this)->w_o(); }
  std::span<const double> b_o() const { return const_cast<ScorerParams*>(this)->b_o(); }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  bool operator==(const ScorerParams&) const = default;

 private:
  MatrixRef mat(int block, std::size_t rows, std::size_t cols) {
    return {data_.data() + offsets_[block], rows, cols};
  }
  std::span<double> vec(int block, std::size_t n) { return {data_.data() + offsets_[block], n}; }

  ScorerDims dims_;
  std::size_t offsets_[8] = {};
  std::vector<double> data_;
};

using ScorerGrads = ScorerParams;

struct ScorerState {
  std::vector<double> h;

  static ScorerState zeros(std::size_t hidden_dim) { return {std::vector<double>(hidden_dim, 0.0)}; }
};

// Uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)) per matrix; zero biases.
ScorerParams init_params(std::size_t feature_dim, std::size_t hidden_dim, std::size_t num_states,
                         std::uint64_t seed);

// Intermediates of one forward window. Refers to the params it was built
// from; they must outlive the cache and stay unchanged until backward.
struct ForwardCache {
  const ScorerParams* params = nullptr;
  Matrix xs;      // T x D
  Matrix hidden;  // (T + 1) x H, row 0 is the initial state
  Matrix update;  // T x H, z_t
  Matrix cand;    // T x H, c_t

  std::size_t length() const { return xs.rows(); }
  ScorerState final_state() const;
};

struct ForwardResult {
  LogitSequence logits;
  ForwardCache cache;
};

// One frame; `state` is advanced in place. logits_out must have S entries.
void forward_step(const ScorerParams& params, ScorerState& state, std::span<const double> x,
                  std::span<double> logits_out);

// xs is T x D with T >= 1. initial defaults to h_0 = 0.
ForwardResult forward_sequence(const ScorerParams& params, ConstMatrixRef xs);
ForwardResult forward_sequence(const ScorerParams& params, ConstMatrixRef xs,
                               const ScorerState& initial);

// Gradients of sum_t <dlogits_t, logits_t> w.r.t. every parameter; the initial
// hidden state is treated as a constant.
ScorerGrads backward_sequence(const ForwardCache& cache, const Matrix& dlogits);

// "ASWP" checkpoint, little-endian.
void save_checkpoint(const std::filesystem::path& path, const ScorerParams& params);
ScorerParams load_checkpoint(const std::filesystem::path& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace actionswitch
