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

#include "codezip/compressor.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <thread>

namespace codezip {

std::vector<std::string> CompressionResult::kept_tokens(const TokenStream& stream) const {
  std::vector<std::string> out;
  out.reserve(kept_indices.size());
  for (auto i : kept_indices) out.push_back(stream.countable_at(i).text);
  return out;
}

std::size_t removal_count(double tau_code, std::size_t length) {
  const double raw = std::floor(tau_code * static_cast<double>(length) + 1e-9);
  return std::min(length, static_cast<std::size_t>(std::max(0.0, raw)));
}

RemovalKey removal_key(const TypedStream& typed, const PriorityTable& table, std::size_t index) {
  return RemovalKey{table.rank(typed.labels[index]), typed.tf_of(index), index};
}

CompressionResult compress(const CompressionRequest& req) {
  if (!(req.tau_code >= 0.0 && req.tau_code <= 1.0)) {
    throw InvalidArgument("tau_code must lie in [0, 1], got " + std::to_string(req.tau_code));
  }
  const std::size_t length = req.typed.length();
  if (length == 0 && req.tau_code > 0.0) {
    throw InvalidArgument("cannot compress an empty token stream at tau > 0");
  }

  auto later = [](const std::pair<RemovalKey, std::size_t>& a, const std::pair<RemovalKey, std::size_t>& b) {
    return b.first.pops_before(a.first);
  };
  std::priority_queue<std::pair<RemovalKey, std::size_t>, std::vector<std::pair<RemovalKey, std::size_t>>,
                      decltype(later)>
      queue(later);
  for (std::size_t i = 0; i < length; ++i) queue.emplace(removal_key(req.typed, req.table, i), i);

  CompressionResult result;
  const std::size_t target = removal_count(req.tau_code, length);
  std::vector<bool> removed(length, false);
  while (result.removal_order.size() < target) {
    const auto idx = queue.top().second;
    queue.pop();
    removed[idx] = true;
    result.removal_order.push_back(idx);
  }
  std::vector<std::size_t> kept_stream_indices;
  for (std::size_t i = 0; i < length; ++i) {
    if (removed[i]) {
      result.removed_indices.push_back(i);
    } else {
      result.kept_indices.push_back(i);
      kept_stream_indices.push_back(req.typed.stream.countable()[i]);
    }
  }
  result.achieved_tau = length == 0 ? 0.0 : static_cast<double>(target) / static_cast<double>(length);
  result.text = detokenize(req.typed.stream, kept_stream_indices);
  return result;
}

namespace {

std::string describe(const std::vector<std::pair<std::size_t, std::string>>& failures) {
  std::string msg = "compress_batch: " + std::to_string(failures.size()) + " item(s) failed";
  for (const auto& [i, what] : failures) msg += "; [" + std::to_string(i) + "] " + what;
  return msg;
}

}  // namespace

BatchError::BatchError(std::vector<std::pair<std::size_t, std::string>> failures)
    : Error(describe(failures)), failures_(std::move(failures)) {}

std::vector<CompressionResult> compress_batch(const std::vector<CompressionRequest>& reqs, unsigned threads) {
  std::vector<CompressionResult> out(reqs.size());
  std::vector<std::string> errors(reqs.size());
  std::vector<char> failed(reqs.size(), 0);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, reqs.size())));

  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < reqs.size(); i += step) {
      try {
        out[i] = compress(reqs[i]);
      } catch (const std::exception& e) {
        failed[i] = 1;
        errors[i] = e.what();
      }
    }
  };
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }

  std::vector<std::pair<std::size_t, std::string>> failures;
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    if (failed[i]) failures.emplace_back(i, errors[i]);
  }
  if (!failures.empty()) throw BatchError(std::move(failures));
  return out;
}

CompressionResult compress_source(std::string_view source, double tau_code, const PriorityTable& table,
                                  const OracleOptions& options) {
  auto stream = lex(source);
  if (options.strict_parse && !stream.parsable()) {
    throw UnparsableInput("strict parse: input is not parsable code");
  }
  return compress(CompressionRequest{classify(stream, table), tau_code, table});
}

}  // namespace codezip
