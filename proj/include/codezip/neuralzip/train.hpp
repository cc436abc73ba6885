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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "codezip/dataset.hpp"
#include "codezip/neuralzip/model.hpp"

namespace codezip::neuralzip {

struct TrainConfig {
  double lr = 5e-5;
  std::size_t batch = 16;
  std::size_t warmup = 1000;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Decoupled weight decay on weight matrices; biases and norm gains are exempt.
  double weight_decay = 0.01;
  /// Dropout rate on embeddings and residual branches.
  double dropout = 0.0;
  /// Global gradient norm cap; 0 disables clipping.
  double clip = 1.0;
  /// Abort when a batch loss exceeds the first batch loss by this factor.
  double divergence_factor = 10.0;
  /// Optional CSV with columns step,loss,lr.
  std::string log_path;
};

struct StepRecord {
  std::size_t step = 0;
  double loss = 0.0;
  double lr = 0.0;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  /// Mean batch loss of each epoch.
  std::vector<double> epoch_loss;
};

/// Learning rate at 1-based `step`: linear warmup to lr, then linear decay
/// to zero at total_steps.
double scheduled_lr(const TrainConfig& config, std::size_t step, std::size_t total_steps);

/// AdamW over shuffled mini-batches; deterministic given the seed. Throws
/// InvalidArgument on empty data and NumericError on a non-finite loss or
/// divergence. `on_epoch` (optional) sees the epoch index and its mean loss.
template <typename T>
TrainLog train(CopyModel<T>& model, const std::vector<EncodedSample>& data, const TrainConfig& config,
               const std::function<void(std::size_t, double)>& on_epoch = {});

/// Share of target positions where argmax p_final equals the target.
template <typename T>
double teacher_forced_accuracy(const CopyModel<T>& model, const std::vector<EncodedSample>& data);

/// Versioned JSON: config, vocabulary, and a shape table with row-major data.
void save_checkpoint(const CopyModel<float>& model, const std::string& path);
/// Throws IoError for unreadable files and CheckpointMismatch when the shape
/// table, config or vocabulary disagree.
CopyModel<float> load_checkpoint(const std::string& path);

/// Micro-averaged multiset token overlap.
struct OverlapScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
OverlapScore token_f1(const std::vector<std::vector<std::string>>& preds,
                      const std::vector<std::vector<std::string>>& golds);

/// Spearman correlation with tie-averaged ranks; 0 when either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct CompressionEval {
  OverlapScore overlap;
  /// Between requested tau and achieved 1 - |output| / |source| over all samples.
  double spearman = 0.0;
  /// Share of decoded tokens that occur in their source.
  double extractive = 0.0;
  std::vector<std::vector<std::string>> outputs;
  std::vector<double> achieved;
};

template <typename T>
CompressionEval evaluate_model(const CopyModel<T>& model, const std::vector<CompressionSample>& samples);

}  // namespace codezip::neuralzip
