#include "actionswitch/frame_scorer.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "actionswitch/errors.hpp"
#include "actionswitch/kernels.hpp"
#include "binary_io.hpp"

namespace actionswitch {

ScorerParams::ScorerParams(ScorerDims dims) : dims_(dims) {
  const std::size_t D = dims.feature_dim, H = dims.hidden_dim, S = dims.num_states;
  const std::size_t sizes[8] = {H * D, H * H, H, H * D, H * H, H, S * H, S};
  std::size_t off = 0;
  for (int b = 0; b < 8; ++b) {
    offsets_[b] = off;
    off += sizes[b];
  }
  data_.assign(off, 0.0);
}

ScorerParams init_params(std::size_t feature_dim, std::size_t hidden_dim, std::size_t num_states,
                         std::uint64_t seed) {
  if (feature_dim == 0 || hidden_dim == 0 || num_states == 0) {
    throw DomainError("scorer dimensions must be >= 1");
  }
  ScorerParams p({feature_dim, hidden_dim, num_states});
  std::mt19937_64 rng(seed);
  auto fill = [&rng](MatrixRef m) {
    const double a = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
    std::uniform_real_distribution<double> dist(-a, a);
    for (double& w : m.flat()) w = dist(rng);
  };
  fill(p.w_z());
  fill(p.u_z());
  fill(p.w_h());
  fill(p.u_h());
  fill(p.w_o());
  return p;
}

ScorerState ForwardCache::final_state() const {
  const auto last = hidden.row(hidden.rows() - 1);
  return {std::vector<double>(last.begin(), last.end())};
}

namespace {

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

// Shared by the streaming and batch paths so both produce identical values.
void cell_step(const ScorerParams& p, const kernels::KernelTable& k, std::span<const double> x,
               std::span<const double> h_prev, std::span<double> z, std::span<double> c,
               std::span<double> h_next, std::span<double> logits) {
  const auto bz = p.b_z();
  const auto bh = p.b_h();
  std::copy(bz.begin(), bz.end(), z.begin());
  std::copy(bh.begin(), bh.end(), c.begin());
  k.gemv_acc(p.w_z(), x, z);
  k.gemv_acc(p.u_z(), h_prev, z);
  k.gemv_acc(p.w_h(), x, c);
  k.gemv_acc(p.u_h(), h_prev, c);
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = sigmoid(z[i]);
    c[i] = std::tanh(c[i]);
    h_next[i] = (1.0 - z[i]) * h_prev[i] + z[i] * c[i];
  }
  const auto bo = p.b_o();
  std::copy(bo.begin(), bo.end(), logits.begin());
  k.gemv_acc(p.w_o(), h_next, logits);
}

void check_dims(const ScorerParams& p, std::size_t feature_dim) {
  if (feature_dim != p.dims().feature_dim) {
    throw DomainError("feature dim " + std::to_string(feature_dim) + " != scorer input dim " +
                      std::to_string(p.dims().feature_dim));
  }
}

}  // namespace

void forward_step(const ScorerParams& params, ScorerState& state, std::span<const double> x,
                  std::span<double> logits_out) {
  const auto& d = params.dims();
  check_dims(params, x.size());
  if (state.h.size() != d.hidden_dim) throw DomainError("hidden state size mismatch");
  if (logits_out.size() != d.num_states) throw DomainError("logit buffer size mismatch");
  std::vector<double> z(d.hidden_dim), c(d.hidden_dim), h_next(d.hidden_dim);
  cell_step(params, kernels::active(), x, state.h, z, c, h_next, logits_out);
  state.h.swap(h_next);
}

ForwardResult forward_sequence(const ScorerParams& params, ConstMatrixRef xs) {
  return forward_sequence(params, xs, ScorerState::zeros(params.dims().hidden_dim));
}

ForwardResult forward_sequence(const ScorerParams& params, ConstMatrixRef xs,
                               const ScorerState& initial) {
  const auto& d = params.dims();
  if (xs.rows == 0) throw DomainError("empty feature sequence");
  check_dims(params, xs.cols);
  if (initial.h.size() != d.hidden_dim) throw DomainError("initial state size mismatch");

  const std::size_t T = xs.rows;
  ForwardResult out;
  out.logits = Matrix(T, d.num_states);
  ForwardCache& cache = out.cache;
  cache.params = &params;
  cache.xs = Matrix(T, d.feature_dim);
  std::copy(xs.data, xs.data + xs.size(), cache.xs.values().begin());
  cache.hidden = Matrix(T + 1, d.hidden_dim);
  cache.update = Matrix(T, d.hidden_dim);
  cache.cand = Matrix(T, d.hidden_dim);
  std::copy(initial.h.begin(), initial.h.end(), cache.hidden.row(0).begin());

  const auto& k = kernels::active();
  for (std::size_t t = 0; t < T; ++t) {
    cell_step(params, k, cache.xs.row(t), cache.hidden.row(t), cache.update.row(t),
              cache.cand.row(t), cache.hidden.row(t + 1), out.logits.row(t));
  }
  return out;
}

ScorerGrads backward_sequence(const ForwardCache& cache, const Matrix& dlogits) {
  if (cache.params == nullptr) throw DomainError("forward cache has no parameters");
  const ScorerParams& p = *cache.params;
  const auto& d = p.dims();
  const std::size_t T = cache.length();
  if (dlogits.rows() != T || dlogits.cols() != d.num_states) {
    throw DomainError("dlogits shape " + std::to_string(dlogits.rows()) + "x" +
                      std::to_string(dlogits.cols()) + " does not match forward window " +
                      std::to_string(T) + "x" + std::to_string(d.num_states));
  }

  const auto& k = kernels::active();
  ScorerGrads g(d);
  const std::size_t H = d.hidden_dim;
  std::vector<double> dh(H, 0.0);       // dL/dh_t, accumulated
  std::vector<double> dh_prev(H, 0.0);  // dL/dh_{t-1} from step t
  std::vector<double> da_z(H), da_c(H);

  for (std::size_t t = T; t-- > 0;) {
    const auto dl = dlogits.row(t);
    const auto h_t = cache.hidden.row(t + 1);
    const auto h_prev = cache.hidden.row(t);
    const auto z = cache.update.row(t);
    const auto c = cache.cand.row(t);
    const auto x = cache.xs.row(t);

    k.ger_acc(g.w_o(), dl, h_t);
    k.axpy(1.0, dl, g.b_o());
    k.gemv_t_acc(p.w_o(), dl, dh);

    for (std::size_t i = 0; i < H; ++i) {
      const double dz = dh[i] * (c[i] - h_prev[i]);
      const double dc = dh[i] * z[i];
      da_z[i] = dz * z[i] * (1.0 - z[i]);
      da_c[i] = dc * (1.0 - c[i] * c[i]);
      dh_prev[i] = dh[i] * (1.0 - z[i]);
    }
    k.ger_acc(g.w_z(), da_z, x);
    k.ger_acc(g.u_z(), da_z, h_prev);
    k.axpy(1.0, da_z, g.b_z());
    k.ger_acc(g.w_h(), da_c, x);
    k.ger_acc(g.u_h(), da_c, h_prev);
    k.axpy(1.0, da_c, g.b_h());
    k.gemv_t_acc(p.u_z(), da_z, dh_prev);
    k.gemv_t_acc(p.u_h(), da_c, dh_prev);
    dh.swap(dh_prev);
  }
  return g;
}

void save_checkpoint(const std::filesystem::path& path, const ScorerParams& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  binary::put_magic(os, "ASWP");
  binary::put_le<std::uint32_t>(os, kCheckpointVersion);
  const auto& d = params.dims();
  binary::put_le(os, static_cast<std::uint32_t>(d.feature_dim));
  binary::put_le(os, static_cast<std::uint32_t>(d.hidden_dim));
  binary::put_le(os, static_cast<std::uint32_t>(d.num_states));
  for (double w : params.flat()) binary::put_f64(os, w);
  if (!os) throw FormatError("write failed for " + path.string());
}

ScorerParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  binary::expect_magic(is, "ASWP");
  const auto version = binary::get_le<std::uint32_t>(is, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  ScorerDims d;
  d.feature_dim = binary::get_le<std::uint32_t>(is, "D");
  d.hidden_dim = binary::get_le<std::uint32_t>(is, "H");
  d.num_states = binary::get_le<std::uint32_t>(is, "S");
  if (d.feature_dim == 0 || d.hidden_dim == 0 || d.num_states == 0) {
    throw FormatError("checkpoint has a zero dimension");
  }
  ScorerParams p(d);
  for (double& w : p.flat()) {
    w = binary::get_f64(is, "weights");
    if (!std::isfinite(w)) throw FormatError("non-finite weight in checkpoint");
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after checkpoint weights");
  }
  return p;
}

}  // namespace actionswitch
