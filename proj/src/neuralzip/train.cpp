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

#include "codezip/neuralzip/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "codezip/error.hpp"
#include "json.hpp"

namespace codezip::neuralzip {

using nlohmann::json;

double scheduled_lr(const TrainConfig& config, std::size_t step, std::size_t total_steps) {
  const double s = static_cast<double>(step);
  if (config.warmup > 0 && step <= config.warmup) return config.lr * s / static_cast<double>(config.warmup);
  if (total_steps <= config.warmup) return config.lr;
  const double left = static_cast<double>(total_steps - std::min(step, total_steps));
  return config.lr * std::max(left, 0.0) / static_cast<double>(total_steps - config.warmup);
}

template <typename T>
TrainLog train(CopyModel<T>& model, const std::vector<EncodedSample>& data, const TrainConfig& config,
               const std::function<void(std::size_t, double)>& on_epoch) {
  if (data.empty()) throw InvalidArgument("train: empty dataset");
  if (config.batch == 0) throw InvalidArgument("train: batch size must be positive");
  std::ofstream log_file;
  if (!config.log_path.empty()) {
    log_file.open(config.log_path, std::ios::trunc);
    if (!log_file) throw IoError("cannot write training log '" + config.log_path + "'");
    log_file << "step,loss,lr\n";
  }

  struct Slot {
    Mat<T>* value;
    Mat<T> m, v;
    bool decays;
  };
  std::vector<Slot> slots;
  model.params().visit([&](const std::string&, Mat<T>& w, bool decays) {
    slots.push_back({&w, Mat<T>::Zero(w.rows(), w.cols()), Mat<T>::Zero(w.rows(), w.cols()), decays});
  });

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(config.seed);
  std::mt19937_64 drop_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  const Dropout dropout{config.dropout, &drop_rng};
  const std::size_t per_epoch = (data.size() + config.batch - 1) / config.batch;
  const std::size_t total = per_epoch * config.epochs;
  TrainLog log;
  double first_loss = -1.0;
  std::size_t step = 0;
  std::vector<EncodedSample> batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double epoch_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      batch.clear();
      for (std::size_t j = start; j < std::min(order.size(), start + config.batch); ++j) batch.push_back(data[order[j]]);
      auto [loss_t, grads] = loss_and_grads(model, batch, dropout);
      const double loss = static_cast<double>(loss_t);
      if (!std::isfinite(loss)) throw NumericError("non-finite loss at step " + std::to_string(step + 1));
      if (first_loss < 0) first_loss = loss;
      if (loss > config.divergence_factor * first_loss) {
        throw NumericError("training diverged at step " + std::to_string(step + 1) + ": loss " +
                           std::to_string(loss) + " exceeds " + std::to_string(config.divergence_factor) +
                           "x the initial " + std::to_string(first_loss));
      }
      ++step;
      const double lr = scheduled_lr(config, step, total);
      std::vector<Mat<T>*> g;
      grads.visit([&](const std::string&, Mat<T>& m, bool) { g.push_back(&m); });
      double norm2 = 0.0;
      for (auto* m : g) norm2 += static_cast<double>(m->squaredNorm());
      const double norm = std::sqrt(norm2);
      const T clip = static_cast<T>(config.clip > 0 && norm > config.clip ? config.clip / norm : 1.0);
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      const T b1 = static_cast<T>(config.beta1), b2 = static_cast<T>(config.beta2);
      for (std::size_t k = 0; k < slots.size(); ++k) {
        auto& s = slots[k];
        const Mat<T> gk = *g[k] * clip;
        s.m = b1 * s.m + (T(1) - b1) * gk;
        s.v = b2 * s.v + (T(1) - b2) * gk.cwiseProduct(gk);
        if (s.decays && config.weight_decay > 0) *s.value *= static_cast<T>(1.0 - lr * config.weight_decay);
        const auto mhat = s.m.array() / static_cast<T>(c1);
        const auto vhat = s.v.array() / static_cast<T>(c2);
        s.value->array() -= static_cast<T>(lr) * mhat / (vhat.sqrt() + static_cast<T>(config.eps));
        if (!s.value->allFinite()) throw NumericError("non-finite parameter after step " + std::to_string(step));
      }
      log.steps.push_back({step, loss, lr});
      if (log_file) log_file << step << ',' << loss << ',' << lr << '\n';
      epoch_sum += loss;
    }
    log.epoch_loss.push_back(epoch_sum / static_cast<double>(per_epoch));
    if (on_epoch) on_epoch(epoch, log.epoch_loss.back());
  }
  return log;
}

template <typename T>
double teacher_forced_accuracy(const CopyModel<T>& model, const std::vector<EncodedSample>& data) {
  std::size_t hit = 0, total = 0;
  for (const auto& s : data) {
    const auto steps = model.distributions(s);
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const auto& p = steps[t].p_final;
      const auto best = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
      hit += best == s.target[t];
      ++total;
    }
  }
  return total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

namespace {

json config_json(const ModelConfig& c) {
  return {{"d_model", c.d_model},
          {"d_ff", c.d_ff},
          {"n_layers", c.n_layers},
          {"max_src", c.lengths.max_src},
          {"max_tgt", c.lengths.max_tgt},
          {"gate", std::string(gate_mode_name(c.gate))}};
}

}  // namespace

void save_checkpoint(const CopyModel<float>& model, const std::string& path) {
  json root;
  root["format"] = "codezip-neuralzip";
  root["version"] = 1;
  root["config"] = config_json(model.config());
  root["vocab"] = model.vocab().tokens();
  root["tensors"] = json::array();
  model.params().visit([&](const std::string& name, const Mat<float>& m, bool) {
    std::vector<float> data(m.data(), m.data() + m.size());
    root["tensors"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"data", data}});
  });
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out << root.dump();
  if (!out) throw IoError("write failed for checkpoint '" + path + "'");
}

CopyModel<float> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw CheckpointMismatch("checkpoint '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    if (root.at("format") != "codezip-neuralzip") throw CheckpointMismatch("not a codezip checkpoint");
    if (root.at("version") != 1) throw CheckpointMismatch("unsupported checkpoint version");
    const auto& c = root.at("config");
    ModelConfig cfg;
    cfg.d_model = c.at("d_model").get<int>();
    cfg.d_ff = c.at("d_ff").get<int>();
    cfg.n_layers = c.at("n_layers").get<int>();
    cfg.lengths.max_src = c.at("max_src").get<std::size_t>();
    cfg.lengths.max_tgt = c.at("max_tgt").get<std::size_t>();
    cfg.gate = parse_gate_mode(c.at("gate").get<std::string>());
    Vocab vocab = Vocab::from_tokens(root.at("vocab").get<std::vector<std::string>>());
    auto params = CopyModelParams<float>::zeros(cfg, vocab.size());
    const auto& tensors = root.at("tensors");
    std::size_t k = 0;
    params.visit([&](const std::string& name, Mat<float>& m, bool) {
      if (k >= tensors.size()) throw CheckpointMismatch("checkpoint is missing tensor '" + name + "'");
      const auto& t = tensors[k++];
      if (t.at("name") != name) {
        throw CheckpointMismatch("expected tensor '" + name + "', found '" + t.at("name").get<std::string>() + "'");
      }
      if (t.at("rows").get<long>() != m.rows() || t.at("cols").get<long>() != m.cols()) {
        throw CheckpointMismatch("tensor '" + name + "' has shape " + std::to_string(t.at("rows").get<long>()) + "x" +
                                 std::to_string(t.at("cols").get<long>()) + ", expected " + std::to_string(m.rows()) +
                                 "x" + std::to_string(m.cols()));
      }
      const auto& data = t.at("data");
      if (data.size() != static_cast<std::size_t>(m.size())) {
        throw CheckpointMismatch("tensor '" + name + "' has the wrong number of values");
      }
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = data[static_cast<std::size_t>(i)].get<float>();
      if (!m.allFinite()) throw CheckpointMismatch("tensor '" + name + "' holds non-finite values");
    });
    if (k != tensors.size()) throw CheckpointMismatch("checkpoint has unexpected extra tensors");
    return CopyModel<float>(cfg, std::move(vocab), std::move(params));
  } catch (const json::exception& e) {
    throw CheckpointMismatch("malformed checkpoint '" + path + "': " + e.what());
  } catch (const FormatError& e) {
    throw CheckpointMismatch(std::string("checkpoint vocabulary: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CheckpointMismatch(std::string("checkpoint config: ") + e.what());
  }
}

OverlapScore token_f1(const std::vector<std::vector<std::string>>& preds,
                      const std::vector<std::vector<std::string>>& golds) {
  if (preds.size() != golds.size()) throw InvalidArgument("token_f1: size mismatch");
  double overlap = 0, n_pred = 0, n_gold = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    std::map<std::string, long> counts;
    for (const auto& t : golds[i]) ++counts[t];
    for (const auto& t : preds[i]) {
      auto it = counts.find(t);
      if (it != counts.end() && it->second > 0) --it->second, ++overlap;
    }
    n_pred += static_cast<double>(preds[i].size());
    n_gold += static_cast<double>(golds[i].size());
  }
  OverlapScore s;
  s.precision = n_pred > 0 ? overlap / n_pred : (n_gold == 0 ? 1.0 : 0.0);
  s.recall = n_gold > 0 ? overlap / n_gold : 1.0;
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

namespace {

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman: size mismatch");
  if (x.size() < 2) return 0.0;
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

template <typename T>
CompressionEval evaluate_model(const CopyModel<T>& model, const std::vector<CompressionSample>& samples) {
  CompressionEval ev;
  std::vector<std::vector<std::string>> golds;
  std::vector<double> requested;
  double in_source = 0, emitted = 0;
  for (const auto& s : samples) {
    auto out = model.decode(s.task, s.tau, s.src, s.src.size() + 2);
    const double achieved = s.src.empty() ? 0.0 : 1.0 - static_cast<double>(out.size()) / static_cast<double>(s.src.size());
    for (const auto& t : out) in_source += std::find(s.src.begin(), s.src.end(), t) != s.src.end();
    emitted += static_cast<double>(out.size());
    ev.achieved.push_back(achieved);
    requested.push_back(s.tau);
    golds.push_back(s.tgt);
    ev.outputs.push_back(std::move(out));
  }
  ev.overlap = token_f1(ev.outputs, golds);
  ev.spearman = spearman(requested, ev.achieved);
  ev.extractive = emitted > 0 ? in_source / emitted : 1.0;
  return ev;
}

template TrainLog train(CopyModel<float>&, const std::vector<EncodedSample>&, const TrainConfig&,
                        const std::function<void(std::size_t, double)>&);
template TrainLog train(CopyModel<double>&, const std::vector<EncodedSample>&, const TrainConfig&,
                        const std::function<void(std::size_t, double)>&);
template double teacher_forced_accuracy(const CopyModel<float>&, const std::vector<EncodedSample>&);
template double teacher_forced_accuracy(const CopyModel<double>&, const std::vector<EncodedSample>&);
template CompressionEval evaluate_model(const CopyModel<float>&, const std::vector<CompressionSample>&);
template CompressionEval evaluate_model(const CopyModel<double>&, const std::vector<CompressionSample>&);

}  // namespace codezip::neuralzip
