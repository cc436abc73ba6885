// Copyright 2026 The codezip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "codezip/neuralzip/vocab.hpp"

namespace codezip::neuralzip {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class GateMode {
  /// p_gen = sigmoid(W_gen . [h*, s] + b_gen)
  kLearned,
  /// p_gen fixed to 1: no copy path.
  kGenerateOnly,
  /// p_gen fixed to 0: copy only.
  kCopyOnly,
};

std::string_view gate_mode_name(GateMode mode);
GateMode parse_gate_mode(std::string_view name);

struct ModelConfig {
  int d_model = 64;
  int d_ff = 128;
  int n_layers = 1;
  EncodeOptions lengths;
  GateMode gate = GateMode::kLearned;

  bool operator==(const ModelConfig& o) const {
    return d_model == o.d_model && d_ff == o.d_ff && n_layers == o.n_layers && gate == o.gate &&
           lengths.max_src == o.lengths.max_src && lengths.max_tgt == o.lengths.max_tgt;
  }
};

template <typename T>
struct NormParams {
  Mat<T> g, b;
};
template <typename T>
struct AttnParams {
  Mat<T> wq, wk, wv, wo;
};
template <typename T>
struct FfnParams {
  Mat<T> w1, b1, w2, b2;
};
template <typename T>
struct EncoderLayer {
  NormParams<T> ln1;
  AttnParams<T> attn;
  NormParams<T> ln2;
  FfnParams<T> ffn;
};
template <typename T>
struct DecoderLayer {
  NormParams<T> ln1;
  AttnParams<T> self;
  NormParams<T> ln2;
  AttnParams<T> cross;
  NormParams<T> ln3;
  FfnParams<T> ffn;
};

/// All trainable tensors. Row vectors are stored as 1 x n matrices;
/// projections act on row activations (y = x W).
template <typename T>
struct CopyModelParams {
  Mat<T> embed;   // V x d
  Mat<T> head_w;  // V x d
  Mat<T> head_b;  // 1 x V
  Mat<T> gen_w;   // 1 x 2d, applied to [h*, s]
  Mat<T> gen_b;   // 1 x 1
  std::vector<EncoderLayer<T>> enc;
  NormParams<T> enc_ln;
  std::vector<DecoderLayer<T>> dec;
  NormParams<T> dec_ln;

  /// All-zero tensors (gradient buffers).
  static CopyModelParams zeros(const ModelConfig& cfg, std::size_t vocab);
  /// Unit norm gains, zero biases, scaled normal weights.
  static CopyModelParams random(const ModelConfig& cfg, std::size_t vocab, std::uint64_t seed);

  /// Calls f(name, tensor, decays) for every tensor in a fixed order.
  template <typename F>
  void visit(F&& f);
  template <typename F>
  void visit(F&& f) const {
    const_cast<CopyModelParams*>(this)->visit([&](const std::string& n, Mat<T>& m, bool d) { f(n, m, d); });
  }

  std::size_t parameter_count() const;
  template <typename U>
  CopyModelParams<U> cast() const;
};

/// Inverted dropout on embeddings and residual branches during training.
struct Dropout {
  double rate = 0.0;
  std::mt19937_64* rng = nullptr;

  bool active() const { return rate > 0.0 && rng != nullptr; }
};

/// Distribution at one decoding step.
struct StepDistribution {
  double p_gen = 1.0;
  /// Over the base vocabulary.
  std::vector<double> p_vocab;
  /// Extended id -> summed attention over the source positions holding it.
  std::map<int, double> p_copy;
  /// Over the extended vocabulary (V + out-of-vocab source slots).
  std::vector<double> p_final;
};

/// Single-head pre-norm transformer encoder-decoder with a pointer-generator
/// head. The last decoder layer's cross-attention row is both the context
/// weighting for h* and the copy distribution; it only covers source
/// content positions.
template <typename T>
class CopyModel {
 public:
  CopyModel(ModelConfig config, Vocab vocab, CopyModelParams<T> params);
  static CopyModel random(ModelConfig config, Vocab vocab, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ModelConfig& config() { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const CopyModelParams<T>& params() const { return params_; }
  CopyModelParams<T>& params() { return params_; }

  /// Teacher-forced step distributions for every target position.
  std::vector<StepDistribution> distributions(const EncodedSample& sample) const;

  /// Sum over target tokens of -log(max(p_final(y), 1e-12)).
  T loss_sum(const EncodedSample& sample) const;

  /// Adds scale * d(loss_sum)/d(params) into `grads`; returns loss_sum.
  T accumulate_grads(const EncodedSample& sample, T scale, CopyModelParams<T>& grads,
                     const Dropout& dropout = {}) const;

  /// Greedy argmax decoding until <EOS> or max_len tokens. Copy slots map
  /// back to the literal source token; reserved markers are never emitted.
  std::vector<std::string> decode(Task task, double tau, const std::vector<std::string>& src,
                                  std::size_t max_len) const;
  std::vector<int> decode_ids(const EncodedSample& sample, std::size_t max_len) const;

 private:
  struct Forward;
  void encode_forward(const EncodedSample& sample, Forward& f, const Dropout& dropout = {}) const;
  void decode_forward(const std::vector<int>& dec_in, Forward& f, const Dropout& dropout = {}) const;
  void head_forward(const EncodedSample& sample, Forward& f) const;

  ModelConfig config_;
  Vocab vocab_;
  CopyModelParams<T> params_;
  Mat<T> positions_;
};

/// Mean token loss over the batch and its gradient.
template <typename T>
std::pair<T, CopyModelParams<T>> loss_and_grads(const CopyModel<T>& model, const std::vector<EncodedSample>& batch,
                                                const Dropout& dropout = {});

template <typename T>
template <typename F>
void CopyModelParams<T>::visit(F&& f) {
  auto norm = [&](const std::string& p, NormParams<T>& n) {
    f(p + ".g", n.g, false);
    f(p + ".b", n.b, false);
  };
  auto attn = [&](const std::string& p, AttnParams<T>& a) {
    f(p + ".wq", a.wq, true);
    f(p + ".wk", a.wk, true);
    f(p + ".wv", a.wv, true);
    f(p + ".wo", a.wo, true);
  };
  auto ffn = [&](const std::string& p, FfnParams<T>& m) {
    f(p + ".w1", m.w1, true);
    f(p + ".b1", m.b1, false);
    f(p + ".w2", m.w2, true);
    f(p + ".b2", m.b2, false);
  };
  f("embed", embed, true);
  f("head.w", head_w, true);
  f("head.b", head_b, false);
  f("gen.w", gen_w, true);
  f("gen.b", gen_b, false);
  for (std::size_t i = 0; i < enc.size(); ++i) {
    const auto p = "enc." + std::to_string(i);
    norm(p + ".ln1", enc[i].ln1);
    attn(p + ".attn", enc[i].attn);
    norm(p + ".ln2", enc[i].ln2);
    ffn(p + ".ffn", enc[i].ffn);
  }
  norm("enc.ln", enc_ln);
  for (std::size_t i = 0; i < dec.size(); ++i) {
    const auto p = "dec." + std::to_string(i);
    norm(p + ".ln1", dec[i].ln1);
    attn(p + ".self", dec[i].self);
    norm(p + ".ln2", dec[i].ln2);
    attn(p + ".cross", dec[i].cross);
    norm(p + ".ln3", dec[i].ln3);
    ffn(p + ".ffn", dec[i].ffn);
  }
  norm("dec.ln", dec_ln);
}

template <typename T>
template <typename U>
CopyModelParams<U> CopyModelParams<T>::cast() const {
  CopyModelParams<U> out;
  std::vector<const Mat<T>*> src;
  visit([&](const std::string&, const Mat<T>& m, bool) { src.push_back(&m); });
  out.enc.resize(enc.size());
  out.dec.resize(dec.size());
  std::size_t i = 0;
  out.visit([&](const std::string&, Mat<U>& m, bool) { m = src[i++]->template cast<U>(); });
  return out;
}

extern template struct CopyModelParams<float>;
extern template struct CopyModelParams<double>;
extern template class CopyModel<float>;
extern template class CopyModel<double>;

}  // namespace codezip::neuralzip
