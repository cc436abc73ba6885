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

#include "codezip/neuralzip/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "codezip/error.hpp"

namespace codezip::neuralzip {

std::string_view gate_mode_name(GateMode mode) {
  switch (mode) {
    case GateMode::kLearned:
      return "learned";
    case GateMode::kGenerateOnly:
      return "generate-only";
    case GateMode::kCopyOnly:
      return "copy-only";
  }
  return "learned";
}

GateMode parse_gate_mode(std::string_view name) {
  if (name == "learned") return GateMode::kLearned;
  if (name == "generate-only" || name == "no-copy") return GateMode::kGenerateOnly;
  if (name == "copy-only") return GateMode::kCopyOnly;
  throw InvalidArgument("unknown gate mode '" + std::string(name) + "'");
}

namespace {

constexpr double kLogFloor = 1e-12;
constexpr double kNormEps = 1e-5;

template <typename T>
using Col = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
struct NormCache {
  Mat<T> xhat;
  Col<T> rstd;
};

template <typename T>
Mat<T> norm_forward(const Mat<T>& x, const NormParams<T>& p, NormCache<T>& c) {
  const Col<T> mean = x.rowwise().mean();
  Mat<T> xc = x.colwise() - mean;
  const Col<T> var = xc.array().square().rowwise().mean().matrix();
  c.rstd = (var.array() + T(kNormEps)).rsqrt().matrix();
  c.xhat = (xc.array().colwise() * c.rstd.array()).matrix();
  Mat<T> y = (c.xhat.array().rowwise() * p.g.row(0).array()).matrix();
  y.rowwise() += p.b.row(0);
  return y;
}

template <typename T>
void norm_backward(const Mat<T>& dy, const NormParams<T>& p, const NormCache<T>& c, NormParams<T>& g, Mat<T>& dx) {
  g.g.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  g.b.row(0) += dy.colwise().sum();
  const Mat<T> dxhat = (dy.array().rowwise() * p.g.row(0).array()).matrix();
  const Col<T> m1 = dxhat.rowwise().mean();
  const Col<T> m2 = (dxhat.array() * c.xhat.array()).rowwise().mean().matrix();
  Mat<T> t = dxhat.colwise() - m1;
  t -= (c.xhat.array().colwise() * m2.array()).matrix();
  dx += (t.array().colwise() * c.rstd.array()).matrix();
}

template <typename T>
struct AttnCache {
  Mat<T> xq, xkv, q, k, v, a, c;
};

enum class MaskKind { kNone, kCausal, kColumns };

/// Row softmax of `s` restricted to allowed entries; rows with nothing
/// allowed are all zero.
template <typename T>
Mat<T> masked_softmax(const Mat<T>& s, MaskKind kind, const std::vector<char>* columns) {
  Mat<T> a = Mat<T>::Zero(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    auto ok = [&](Eigen::Index c) {
      if (kind == MaskKind::kCausal) return c <= r;
      if (kind == MaskKind::kColumns) return (*columns)[static_cast<std::size_t>(c)] != 0;
      return true;
    };
    T mx = -std::numeric_limits<T>::infinity();
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (ok(c)) mx = std::max(mx, s(r, c));
    }
    if (mx == -std::numeric_limits<T>::infinity()) continue;
    T sum = 0;
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (ok(c)) sum += a(r, c) = std::exp(s(r, c) - mx);
    }
    a.row(r) /= sum;
  }
  return a;
}

template <typename T>
Mat<T> attn_forward(const Mat<T>& xq, const Mat<T>& xkv, const AttnParams<T>& p, MaskKind kind,
                    const std::vector<char>* columns, AttnCache<T>& c) {
  c.xq = xq;
  c.xkv = xkv;
  c.q = xq * p.wq;
  c.k = xkv * p.wk;
  c.v = xkv * p.wv;
  const T scale = T(1) / std::sqrt(static_cast<T>(p.wq.cols()));
  c.a = masked_softmax<T>((c.q * c.k.transpose()) * scale, kind, columns);
  c.c = c.a * c.v;
  return c.c * p.wo;
}

/// `da_extra` adds outside gradient on the attention weights.
template <typename T>
void attn_backward(const Mat<T>& dout, const Mat<T>* da_extra, const AttnParams<T>& p, const AttnCache<T>& c,
                   AttnParams<T>& g, Mat<T>& dxq, Mat<T>& dxkv) {
  const T scale = T(1) / std::sqrt(static_cast<T>(p.wq.cols()));
  g.wo.noalias() += c.c.transpose() * dout;
  const Mat<T> dc = dout * p.wo.transpose();
  Mat<T> da = dc * c.v.transpose();
  if (da_extra) da += *da_extra;
  const Mat<T> dv = c.a.transpose() * dc;
  const Col<T> rs = (da.array() * c.a.array()).rowwise().sum().matrix();
  const Mat<T> ds = (c.a.array() * (da.colwise() - rs).array()).matrix() * scale;
  const Mat<T> dq = ds * c.k;
  const Mat<T> dk = ds.transpose() * c.q;
  g.wq.noalias() += c.xq.transpose() * dq;
  g.wk.noalias() += c.xkv.transpose() * dk;
  g.wv.noalias() += c.xkv.transpose() * dv;
  const Mat<T> gq = dq * p.wq.transpose();
  const Mat<T> gkv = dk * p.wk.transpose() + dv * p.wv.transpose();
  dxq += gq;
  dxkv += gkv;
}

template <typename T>
struct FfnCache {
  Mat<T> x, z1;
};

template <typename T>
Mat<T> ffn_forward(const Mat<T>& x, const FfnParams<T>& p, FfnCache<T>& c) {
  c.x = x;
  c.z1 = x * p.w1;
  c.z1.rowwise() += p.b1.row(0);
  Mat<T> y = c.z1.cwiseMax(T(0)) * p.w2;
  y.rowwise() += p.b2.row(0);
  return y;
}

template <typename T>
void ffn_backward(const Mat<T>& dy, const FfnParams<T>& p, const FfnCache<T>& c, FfnParams<T>& g, Mat<T>& dx) {
  const Mat<T> r = c.z1.cwiseMax(T(0));
  g.w2.noalias() += r.transpose() * dy;
  g.b2.row(0) += dy.colwise().sum();
  Mat<T> dz = dy * p.w2.transpose();
  dz = (dz.array() * (c.z1.array() > T(0)).template cast<T>()).matrix();
  g.w1.noalias() += c.x.transpose() * dz;
  g.b1.row(0) += dz.colwise().sum();
  dx += dz * p.w1.transpose();
}

template <typename T>
Mat<T> sinusoid(std::size_t rows, int d) {
  Mat<T> p(static_cast<Eigen::Index>(rows), d);
  for (std::size_t i = 0; i < rows; ++i) {
    for (int k = 0; k < d; ++k) {
      const double angle = static_cast<double>(i) / std::pow(10000.0, static_cast<double>(k - k % 2) / d);
      p(static_cast<Eigen::Index>(i), k) = static_cast<T>(k % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return p;
}

/// Empty when dropout is off; otherwise entries are 0 or 1 / (1 - rate).
template <typename T>
Mat<T> dropout_mask(Eigen::Index rows, Eigen::Index cols, const Dropout& dropout) {
  if (!dropout.active()) return {};
  std::bernoulli_distribution keep(1.0 - dropout.rate);
  const T scale = static_cast<T>(1.0 / (1.0 - dropout.rate));
  Mat<T> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = keep(*dropout.rng) ? scale : T(0);
  return m;
}

template <typename T>
Mat<T> masked(Mat<T> x, const Mat<T>& mask) {
  if (mask.size() != 0) x.array() *= mask.array();
  return x;
}

template <typename T>
void check_config(const ModelConfig& cfg) {
  if (cfg.d_model < 2 || cfg.d_ff < 1 || cfg.n_layers < 1) throw InvalidArgument("model dimensions must be positive");
}

}  // namespace

template <typename T>
CopyModelParams<T> CopyModelParams<T>::zeros(const ModelConfig& cfg, std::size_t vocab) {
  check_config<T>(cfg);
  const auto d = cfg.d_model, f = cfg.d_ff;
  const auto v = static_cast<Eigen::Index>(vocab);
  auto z = [](Eigen::Index r, Eigen::Index c) { return Mat<T>::Zero(r, c); };
  auto norm = [&] { return NormParams<T>{z(1, d), z(1, d)}; };
  auto attn = [&] { return AttnParams<T>{z(d, d), z(d, d), z(d, d), z(d, d)}; };
  auto ffn = [&] { return FfnParams<T>{z(d, f), z(1, f), z(f, d), z(1, d)}; };
  CopyModelParams p;
  p.embed = z(v, d);
  p.head_w = z(v, d);
  p.head_b = z(1, v);
  p.gen_w = z(1, 2 * d);
  p.gen_b = z(1, 1);
  for (int i = 0; i < cfg.n_layers; ++i) {
    p.enc.push_back({norm(), attn(), norm(), ffn()});
    p.dec.push_back({norm(), attn(), norm(), attn(), norm(), ffn()});
  }
  p.enc_ln = norm();
  p.dec_ln = norm();
  return p;
}

template <typename T>
CopyModelParams<T> CopyModelParams<T>::random(const ModelConfig& cfg, std::size_t vocab, std::uint64_t seed) {
  auto p = zeros(cfg, vocab);
  p.visit([](const std::string& name, Mat<T>& m, bool) {
    if (name.ends_with(".g")) m.setOnes();
  });
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double residual = 1.0 / std::sqrt(2.0 * cfg.n_layers);
  p.visit([&](const std::string& name, Mat<T>& m, bool decays) {
    if (!decays) return;
    double std = 1.0 / std::sqrt(static_cast<double>(m.rows()));
    if (name == "embed") std = 1.0;
    if (name == "head.w") std = 1.0 / std::sqrt(static_cast<double>(m.cols()));
    if (name == "gen.w") std = 0.1 / std::sqrt(static_cast<double>(m.cols()));
    if (name.ends_with(".wo") || name.ends_with(".w2")) std *= residual;
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(std * normal(rng));
  });
  return p;
}

template <typename T>
std::size_t CopyModelParams<T>::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Mat<T>& m, bool) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

template <typename T>
struct CopyModel<T>::Forward {
  struct EncCache {
    NormCache<T> ln1;
    AttnCache<T> attn;
    NormCache<T> ln2;
    FfnCache<T> ffn;
    Mat<T> attn_mask, ffn_mask;
  };
  struct DecCache {
    NormCache<T> ln1;
    AttnCache<T> self;
    NormCache<T> ln2;
    AttnCache<T> cross;
    NormCache<T> ln3;
    FfnCache<T> ffn;
    Mat<T> self_mask, cross_mask, ffn_mask;
  };
  Mat<T> enc_mask, dec_mask;
  std::vector<char> content;
  bool copy = true;
  std::vector<EncCache> enc;
  NormCache<T> enc_ln;
  Mat<T> h;
  std::vector<int> dec_in;
  std::vector<DecCache> dec;
  NormCache<T> dec_ln;
  Mat<T> s;
  Mat<T> pv;
  Mat<T> hstar;
  std::vector<T> gate;
};

template <typename T>
CopyModel<T>::CopyModel(ModelConfig config, Vocab vocab, CopyModelParams<T> params)
    : config_(config), vocab_(std::move(vocab)), params_(std::move(params)) {
  check_config<T>(config_);
  const auto d = config_.d_model;
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  if (params_.embed.rows() != v || params_.embed.cols() != d || params_.head_w.rows() != v ||
      static_cast<int>(params_.enc.size()) != config_.n_layers ||
      static_cast<int>(params_.dec.size()) != config_.n_layers) {
    throw CheckpointMismatch("parameter shapes do not match the model configuration");
  }
  positions_ = sinusoid<T>(std::max(config_.lengths.max_src, config_.lengths.max_tgt) + 1, d);
}

template <typename T>
CopyModel<T> CopyModel<T>::random(ModelConfig config, Vocab vocab, std::uint64_t seed) {
  auto params = CopyModelParams<T>::random(config, vocab.size(), seed);
  return CopyModel(config, std::move(vocab), std::move(params));
}

template <typename T>
void CopyModel<T>::encode_forward(const EncodedSample& sample, Forward& f, const Dropout& dropout) const {
  const auto n = static_cast<Eigen::Index>(sample.input.size());
  if (n == 0 || sample.input.size() >= static_cast<std::size_t>(positions_.rows())) {
    throw InvalidArgument("input length outside the configured range");
  }
  if (sample.vocab_size != vocab_.size()) throw InvalidArgument("sample was encoded with another vocabulary");
  f.content.assign(sample.input.size(), 0);
  f.copy = false;
  for (std::size_t i = 0; i < sample.input.size(); ++i) {
    if (sample.input_ext[i] >= 0) f.content[i] = 1, f.copy = true;
  }
  Mat<T> x(n, config_.d_model);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = params_.embed.row(sample.input[static_cast<std::size_t>(i)]) + positions_.row(i);
  }
  const auto d = config_.d_model;
  f.enc_mask = dropout_mask<T>(n, d, dropout);
  x = masked(std::move(x), f.enc_mask);
  f.enc.resize(params_.enc.size());
  for (std::size_t l = 0; l < params_.enc.size(); ++l) {
    const auto& p = params_.enc[l];
    auto& c = f.enc[l];
    c.attn_mask = dropout_mask<T>(n, d, dropout);
    c.ffn_mask = dropout_mask<T>(n, d, dropout);
    const Mat<T> a = norm_forward(x, p.ln1, c.ln1);
    x += masked(attn_forward<T>(a, a, p.attn, MaskKind::kNone, nullptr, c.attn), c.attn_mask);
    const Mat<T> b = norm_forward(x, p.ln2, c.ln2);
    x += masked(ffn_forward(b, p.ffn, c.ffn), c.ffn_mask);
  }
  f.h = norm_forward(x, params_.enc_ln, f.enc_ln);
}

template <typename T>
void CopyModel<T>::decode_forward(const std::vector<int>& dec_in, Forward& f, const Dropout& dropout) const {
  const auto t = static_cast<Eigen::Index>(dec_in.size());
  if (t == 0 || t >= positions_.rows()) throw InvalidArgument("target length outside the configured range");
  f.dec_in = dec_in;
  Mat<T> y(t, config_.d_model);
  for (Eigen::Index i = 0; i < t; ++i) y.row(i) = params_.embed.row(dec_in[static_cast<std::size_t>(i)]) + positions_.row(i);
  const auto d = config_.d_model;
  f.dec_mask = dropout_mask<T>(t, d, dropout);
  y = masked(std::move(y), f.dec_mask);
  f.dec.resize(params_.dec.size());
  for (std::size_t l = 0; l < params_.dec.size(); ++l) {
    const auto& p = params_.dec[l];
    auto& c = f.dec[l];
    c.self_mask = dropout_mask<T>(t, d, dropout);
    c.cross_mask = dropout_mask<T>(t, d, dropout);
    c.ffn_mask = dropout_mask<T>(t, d, dropout);
    const Mat<T> a = norm_forward(y, p.ln1, c.ln1);
    y += masked(attn_forward<T>(a, a, p.self, MaskKind::kCausal, nullptr, c.self), c.self_mask);
    const Mat<T> b = norm_forward(y, p.ln2, c.ln2);
    y += masked(attn_forward<T>(b, f.h, p.cross, MaskKind::kColumns, &f.content, c.cross), c.cross_mask);
    const Mat<T> e = norm_forward(y, p.ln3, c.ln3);
    y += masked(ffn_forward(e, p.ffn, c.ffn), c.ffn_mask);
  }
  f.s = norm_forward(y, params_.dec_ln, f.dec_ln);
}

template <typename T>
void CopyModel<T>::head_forward(const EncodedSample&, Forward& f) const {
  const auto t = f.s.rows();
  const auto d = config_.d_model;
  Mat<T> logits = f.s * params_.head_w.transpose();
  logits.rowwise() += params_.head_b.row(0);
  f.pv = masked_softmax<T>(logits, MaskKind::kNone, nullptr);
  const auto& a = f.dec.back().cross.a;
  f.hstar = a * f.h;
  f.gate.assign(static_cast<std::size_t>(t), T(1));
  const bool learned = config_.gate == GateMode::kLearned && f.copy;
  for (Eigen::Index i = 0; i < t; ++i) {
    if (learned) {
      const T z = params_.gen_w.leftCols(d).row(0).dot(f.hstar.row(i)) +
                  params_.gen_w.rightCols(d).row(0).dot(f.s.row(i)) + params_.gen_b(0, 0);
      f.gate[static_cast<std::size_t>(i)] = T(1) / (T(1) + std::exp(-z));
    } else if (config_.gate == GateMode::kCopyOnly && f.copy) {
      f.gate[static_cast<std::size_t>(i)] = T(0);
    }
  }
}

template <typename T>
std::vector<StepDistribution> CopyModel<T>::distributions(const EncodedSample& sample) const {
  Forward f;
  encode_forward(sample, f);
  decode_forward(sample.decoder_input(), f);
  head_forward(sample, f);
  const auto& a = f.dec.back().cross.a;
  const std::size_t v = vocab_.size();
  std::vector<StepDistribution> out;
  for (Eigen::Index t = 0; t < f.s.rows(); ++t) {
    StepDistribution d;
    const double g = static_cast<double>(f.gate[static_cast<std::size_t>(t)]);
    d.p_gen = g;
    d.p_vocab.resize(v);
    for (std::size_t j = 0; j < v; ++j) d.p_vocab[j] = static_cast<double>(f.pv(t, static_cast<Eigen::Index>(j)));
    for (std::size_t i = 0; i < sample.input.size(); ++i) {
      if (f.content[i]) d.p_copy[sample.input_ext[i]] += static_cast<double>(a(t, static_cast<Eigen::Index>(i)));
    }
    d.p_final.assign(sample.extended_size(), 0.0);
    for (std::size_t j = 0; j < v; ++j) d.p_final[j] = g * d.p_vocab[j];
    for (const auto& [id, mass] : d.p_copy) d.p_final[static_cast<std::size_t>(id)] += (1.0 - g) * mass;
    out.push_back(std::move(d));
  }
  return out;
}

template <typename T>
T CopyModel<T>::loss_sum(const EncodedSample& sample) const {
  Forward f;
  encode_forward(sample, f);
  decode_forward(sample.decoder_input(), f);
  head_forward(sample, f);
  const auto& a = f.dec.back().cross.a;
  T loss = 0;
  for (std::size_t t = 0; t < sample.target.size(); ++t) {
    const int y = sample.target[t];
    const auto ti = static_cast<Eigen::Index>(t);
    const T pv = y < static_cast<int>(vocab_.size()) ? f.pv(ti, y) : T(0);
    T pc = 0;
    for (std::size_t i = 0; i < sample.input.size(); ++i) {
      if (f.content[i] && sample.input_ext[i] == y) pc += a(ti, static_cast<Eigen::Index>(i));
    }
    const T g = f.gate[t];
    loss -= std::log(std::max(g * pv + (T(1) - g) * pc, T(kLogFloor)));
  }
  return loss;
}

template <typename T>
T CopyModel<T>::accumulate_grads(const EncodedSample& sample, T scale, CopyModelParams<T>& grads,
                                  const Dropout& dropout) const {
  Forward f;
  encode_forward(sample, f, dropout);
  decode_forward(sample.decoder_input(), f, dropout);
  head_forward(sample, f);
  const auto steps = f.s.rows();
  const auto m = f.h.rows();
  const auto d = config_.d_model;
  const int v = static_cast<int>(vocab_.size());
  const auto& a = f.dec.back().cross.a;
  const bool learned = config_.gate == GateMode::kLearned && f.copy;

  Mat<T> dlogits = Mat<T>::Zero(steps, v);
  Mat<T> da = Mat<T>::Zero(steps, m);
  Mat<T> ds = Mat<T>::Zero(steps, d);
  Mat<T> dhstar = Mat<T>::Zero(steps, d);
  T loss = 0;
  for (Eigen::Index t = 0; t < steps; ++t) {
    const int y = sample.target[static_cast<std::size_t>(t)];
    const T pv = y < v ? f.pv(t, y) : T(0);
    T pc = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (f.content[static_cast<std::size_t>(i)] && sample.input_ext[static_cast<std::size_t>(i)] == y) pc += a(t, i);
    }
    const T g = f.gate[static_cast<std::size_t>(t)];
    const T p = g * pv + (T(1) - g) * pc;
    if (p <= T(kLogFloor)) {
      loss -= std::log(T(kLogFloor));
      continue;
    }
    loss -= std::log(p);
    const T dp = -scale / p;
    if (y < v && g != T(0)) {
      const T dpv = dp * g * pv;
      dlogits.row(t) = -dpv * f.pv.row(t);
      dlogits(t, y) += dpv;
    }
    if (g != T(1)) {
      for (Eigen::Index i = 0; i < m; ++i) {
        if (f.content[static_cast<std::size_t>(i)] && sample.input_ext[static_cast<std::size_t>(i)] == y) {
          da(t, i) += dp * (T(1) - g);
        }
      }
    }
    if (learned) {
      const T dz = dp * (pv - pc) * g * (T(1) - g);
      grads.gen_w.leftCols(d).row(0) += dz * f.hstar.row(t);
      grads.gen_w.rightCols(d).row(0) += dz * f.s.row(t);
      grads.gen_b(0, 0) += dz;
      dhstar.row(t) += dz * params_.gen_w.leftCols(d).row(0);
      ds.row(t) += dz * params_.gen_w.rightCols(d).row(0);
    }
  }
  grads.head_w.noalias() += dlogits.transpose() * f.s;
  grads.head_b.row(0) += dlogits.colwise().sum();
  ds.noalias() += dlogits * params_.head_w;

  Mat<T> dh = Mat<T>::Zero(m, d);
  if (learned) {
    da.noalias() += dhstar * f.h.transpose();
    dh.noalias() += a.transpose() * dhstar;
  }

  // Decoder.
  Mat<T> dy = Mat<T>::Zero(steps, d);
  norm_backward(ds, params_.dec_ln, f.dec_ln, grads.dec_ln, dy);
  for (std::size_t l = params_.dec.size(); l-- > 0;) {
    const auto& p = params_.dec[l];
    auto& g = grads.dec[l];
    const auto& c = f.dec[l];
    Mat<T> dn = Mat<T>::Zero(steps, d);
    ffn_backward(masked(dy, c.ffn_mask), p.ffn, c.ffn, g.ffn, dn);
    norm_backward(dn, p.ln3, c.ln3, g.ln3, dy);
    dn.setZero();
    attn_backward(masked(dy, c.cross_mask), l + 1 == params_.dec.size() ? &da : nullptr, p.cross, c.cross, g.cross,
                  dn, dh);
    norm_backward(dn, p.ln2, c.ln2, g.ln2, dy);
    dn.setZero();
    attn_backward<T>(masked(dy, c.self_mask), nullptr, p.self, c.self, g.self, dn, dn);
    norm_backward(dn, p.ln1, c.ln1, g.ln1, dy);
  }
  dy = masked(std::move(dy), f.dec_mask);
  for (Eigen::Index i = 0; i < steps; ++i) grads.embed.row(f.dec_in[static_cast<std::size_t>(i)]) += dy.row(i);

  // Encoder.
  Mat<T> dx = Mat<T>::Zero(m, d);
  norm_backward(dh, params_.enc_ln, f.enc_ln, grads.enc_ln, dx);
  for (std::size_t l = params_.enc.size(); l-- > 0;) {
    const auto& p = params_.enc[l];
    auto& g = grads.enc[l];
    const auto& c = f.enc[l];
    Mat<T> dn = Mat<T>::Zero(m, d);
    ffn_backward(masked(dx, c.ffn_mask), p.ffn, c.ffn, g.ffn, dn);
    norm_backward(dn, p.ln2, c.ln2, g.ln2, dx);
    dn.setZero();
    attn_backward<T>(masked(dx, c.attn_mask), nullptr, p.attn, c.attn, g.attn, dn, dn);
    norm_backward(dn, p.ln1, c.ln1, g.ln1, dx);
  }
  dx = masked(std::move(dx), f.enc_mask);
  for (Eigen::Index i = 0; i < m; ++i) grads.embed.row(sample.input[static_cast<std::size_t>(i)]) += dx.row(i);
  return loss;
}

template <typename T>
std::vector<int> CopyModel<T>::decode_ids(const EncodedSample& sample, std::size_t max_len) const {
  Forward f;
  encode_forward(sample, f);
  const std::size_t v = vocab_.size();
  const std::size_t limit = std::min(max_len, static_cast<std::size_t>(positions_.rows()) - 2);
  std::vector<int> dec_in{kBos};
  std::vector<int> out;
  std::vector<double> p(sample.extended_size());
  while (out.size() < limit) {
    decode_forward(dec_in, f);
    head_forward(sample, f);
    const auto t = f.s.rows() - 1;
    const double g = static_cast<double>(f.gate.back());
    const auto& a = f.dec.back().cross.a;
    for (std::size_t j = 0; j < v; ++j) p[j] = g * static_cast<double>(f.pv(t, static_cast<Eigen::Index>(j)));
    for (std::size_t j = v; j < p.size(); ++j) p[j] = 0.0;
    for (std::size_t i = 0; i < sample.input.size(); ++i) {
      if (f.content[i]) p[static_cast<std::size_t>(sample.input_ext[i])] += (1.0 - g) * a(t, static_cast<Eigen::Index>(i));
    }
    int best = kEos;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const int id = static_cast<int>(j);
      if (vocab_.is_special(id) && id != kEos && id != kUnk) continue;
      if (p[j] > p[static_cast<std::size_t>(best)]) best = id;
    }
    if (best == kEos) break;
    out.push_back(best);
    dec_in.push_back(best < static_cast<int>(v) ? best : kUnk);
  }
  return out;
}

template <typename T>
std::vector<std::string> CopyModel<T>::decode(Task task, double tau, const std::vector<std::string>& src,
                                              std::size_t max_len) const {
  const auto sample = encode(vocab_, task, tau, src, nullptr, config_.lengths);
  std::vector<std::string> out;
  for (int id : decode_ids(sample, max_len)) out.push_back(ext_token(vocab_, sample, id));
  return out;
}

template <typename T>
std::pair<T, CopyModelParams<T>> loss_and_grads(const CopyModel<T>& model, const std::vector<EncodedSample>& batch,
                                                const Dropout& dropout) {
  auto grads = CopyModelParams<T>::zeros(model.config(), model.vocab().size());
  std::size_t tokens = 0;
  for (const auto& s : batch) tokens += s.target.size();
  if (tokens == 0) throw InvalidArgument("loss_and_grads: empty batch");
  const T scale = T(1) / static_cast<T>(tokens);
  T loss = 0;
  for (const auto& s : batch) loss += model.accumulate_grads(s, scale, grads, dropout);
  loss *= scale;
  if (!std::isfinite(static_cast<double>(loss))) throw NumericError("loss is not finite");
  return {loss, std::move(grads)};
}

template struct CopyModelParams<float>;
template struct CopyModelParams<double>;
template class CopyModel<float>;
template class CopyModel<double>;
template std::pair<float, CopyModelParams<float>> loss_and_grads(const CopyModel<float>&,
                                                                 const std::vector<EncodedSample>&, const Dropout&);
template std::pair<double, CopyModelParams<double>> loss_and_grads(const CopyModel<double>&,
                                                                   const std::vector<EncodedSample>&, const Dropout&);

}  // namespace codezip::neuralzip
