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

#include "codezip/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "codezip/compressor.hpp"
#include "codezip/error.hpp"
#include "codezip/prompt/template.hpp"
#include "json.hpp"

namespace codezip {

using nlohmann::json;

std::optional<std::size_t> ratio_index(double tau) {
  for (std::size_t i = 0; i < kRatioGrid.size(); ++i) {
    if (std::abs(kRatioGrid[i] - tau) < 1e-9) return i;
  }
  return std::nullopt;
}

bool is_subsequence(const std::vector<std::string>& sub, const std::vector<std::string>& seq) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < seq.size() && j < sub.size(); ++i) {
    if (seq[i] == sub[j]) ++j;
  }
  return j == sub.size();
}

std::vector<CodeExample> code_examples(const std::vector<prompt::KbEntry>& rows, Task task) {
  const auto tmpl = prompt::TaskTemplate::for_task(task);
  std::vector<CodeExample> out;
  for (const auto& row : rows) {
    for (std::size_t s = 0; s < tmpl.sections.size(); ++s) {
      if (!tmpl.sections[s].compressible) continue;
      const bool answer = s + 1 == tmpl.sections.size();
      if (!answer && s >= row.code.size()) continue;
      out.push_back({row.id + "#" + std::to_string(s), row.id, answer ? row.answer : row.code[s]});
    }
  }
  return out;
}

std::string sample_id(Task task, std::string_view example_id, double tau) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  feed(task_tag(task));
  feed("|");
  feed(example_id);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx-%d", static_cast<unsigned long long>(h),
                static_cast<int>(std::lround(tau * 10)));
  return buf;
}

std::string_view sample_group(std::string_view id) { return id.substr(0, id.rfind('-')); }

std::string DatasetManifest::serialize() const {
  std::ostringstream out;
  out << "# codezip dataset manifest\nversion=1\n"
      << "task=" << task_tag(task) << "\n"
      << "seed=" << seed << "\n"
      << "ratios=0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9\n"
      << "split=80/10/10\n"
      << "input_examples=" << input_examples << "\n"
      << "skipped_unparsable=" << skipped_unparsable << "\n"
      << "train.examples=" << train.examples << "\ntrain.samples=" << train.samples << "\n"
      << "val.examples=" << val.examples << "\nval.samples=" << val.samples << "\n"
      << "test.examples=" << test.examples << "\ntest.samples=" << test.samples << "\n";
  return out.str();
}

DatasetManifest DatasetManifest::parse(std::string_view text) {
  DatasetManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("manifest: expected key=value in '" + line + "'");
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    auto num = [&] { return static_cast<std::size_t>(std::stoull(value)); };
    if (key == "version" || key == "ratios" || key == "split") {
      continue;
    } else if (key == "task") {
      m.task = require_task(value);
    } else if (key == "seed") {
      m.seed = std::stoull(value);
    } else if (key == "input_examples") {
      m.input_examples = num();
    } else if (key == "skipped_unparsable") {
      m.skipped_unparsable = num();
    } else if (key == "train.examples") {
      m.train.examples = num();
    } else if (key == "train.samples") {
      m.train.samples = num();
    } else if (key == "val.examples") {
      m.val.examples = num();
    } else if (key == "val.samples") {
      m.val.samples = num();
    } else if (key == "test.examples") {
      m.test.examples = num();
    } else if (key == "test.samples") {
      m.test.samples = num();
    } else {
      throw FormatError("manifest: unknown key '" + key + "'");
    }
  }
  return m;
}

Dataset build_samples(const std::vector<CodeExample>& examples, Task task, const PriorityTable& table,
                      std::uint64_t seed) {
  if (examples.empty()) throw InvalidArgument("build_dataset: empty corpus");
  Dataset ds;
  ds.manifest.task = task;
  ds.manifest.seed = seed;
  ds.manifest.input_examples = examples.size();

  std::vector<const CodeExample*> parsable;
  std::vector<CompressionRequest> reqs;
  for (const auto& ex : examples) {
    auto stream = lex(ex.code);
    if (!stream.parsable() || stream.length() == 0) {
      ++ds.manifest.skipped_unparsable;
      continue;
    }
    parsable.push_back(&ex);
    auto typed = classify(stream, table);
    for (double tau : kRatioGrid) reqs.push_back({typed, tau, table});
  }
  if (parsable.empty()) throw InvalidArgument("build_dataset: no parsable examples in corpus");
  const auto results = compress_batch(reqs);

  // Groups in first-appearance order, then a seeded Fisher-Yates shuffle.
  std::vector<std::string> groups;
  std::unordered_map<std::string, std::size_t> group_index;
  for (const auto* ex : parsable) {
    if (group_index.emplace(ex->group, groups.size()).second) groups.push_back(ex->group);
  }
  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  const std::size_t n_train = groups.size() * 8 / 10;
  const std::size_t n_val = groups.size() / 10;
  std::vector<int> split_of(groups.size());
  for (std::size_t r = 0; r < order.size(); ++r) split_of[order[r]] = r < n_train ? 0 : r < n_train + n_val ? 1 : 2;

  for (std::size_t e = 0; e < parsable.size(); ++e) {
    const auto* ex = parsable[e];
    const int split = split_of[group_index.at(ex->group)];
    auto& out = split == 0 ? ds.train : split == 1 ? ds.val : ds.test;
    auto& counts = split == 0 ? ds.manifest.train : split == 1 ? ds.manifest.val : ds.manifest.test;
    ++counts.examples;
    const auto& typed = reqs[e * kRatioGrid.size()].typed;
    const auto src = typed.stream.countable_texts();
    for (std::size_t r = 0; r < kRatioGrid.size(); ++r) {
      const auto& res = results[e * kRatioGrid.size() + r];
      out.push_back({sample_id(task, ex->id, kRatioGrid[r]), task, kRatioGrid[r], src,
                     res.kept_tokens(typed.stream)});
      ++counts.samples;
    }
  }
  return ds;
}

std::string sample_json(const CompressionSample& sample) {
  json row = json::object();
  row["id"] = sample.id;
  row["task"] = std::string(task_tag(sample.task));
  row["tau"] = sample.tau;
  row["src"] = sample.src;
  row["tgt"] = sample.tgt;
  return row.dump();
}

CompressionSample parse_sample(std::string_view line, std::size_t line_no) {
  auto fail = [&](const std::string& field, const std::string& what) {
    return FormatError("dataset line " + std::to_string(line_no) + ", field '" + field + "': " + what);
  };
  json row;
  try {
    row = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError("dataset line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
  }
  if (!row.is_object()) throw FormatError("dataset line " + std::to_string(line_no) + ": expected an object");
  for (const auto& [key, _] : row.items()) {
    if (key != "id" && key != "task" && key != "tau" && key != "src" && key != "tgt") {
      throw fail(key, "unknown field");
    }
  }
  CompressionSample s;
  if (!row.contains("id") || !row["id"].is_string()) throw fail("id", "must be a string");
  s.id = row["id"].get<std::string>();
  if (!row.contains("task") || !row["task"].is_string()) throw fail("task", "must be a string");
  auto task = parse_task(row["task"].get<std::string>());
  if (!task) throw fail("task", "unknown task tag");
  s.task = *task;
  if (!row.contains("tau") || !row["tau"].is_number()) throw fail("tau", "must be a number");
  s.tau = row["tau"].get<double>();
  if (!ratio_index(s.tau)) throw fail("tau", "not on the 0.1..0.9 grid");
  for (const char* key : {"src", "tgt"}) {
    if (!row.contains(key) || !row[key].is_array()) throw fail(key, "must be an array of strings");
    auto& dst = std::string_view(key) == "src" ? s.src : s.tgt;
    for (const auto& t : row[key]) {
      if (!t.is_string()) throw fail(key, "must be an array of strings");
      dst.push_back(t.get<std::string>());
    }
  }
  if (!is_subsequence(s.tgt, s.src)) throw fail("tgt", "not an in-order subsequence of src");
  if (s.src.size() - s.tgt.size() != removal_count(s.tau, s.src.size())) {
    throw fail("tgt", "length does not match floor(tau * |src|) removals");
  }
  return s;
}

DatasetReader::DatasetReader(const std::string& path) : in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot read dataset '" + path + "'");
}

std::optional<CompressionSample> DatasetReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return parse_sample(line, line_no_);
  }
  return std::nullopt;
}

std::vector<CompressionSample> load_dataset(const std::string& path) {
  DatasetReader reader(path);
  std::vector<CompressionSample> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

void write_samples(const std::string& path, const std::vector<CompressionSample>& samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& s : samples) out << sample_json(s) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

DatasetManifest build_dataset(const std::vector<CodeExample>& examples, Task task, const PriorityTable& table,
                              std::uint64_t seed, const std::string& out_dir) {
  auto ds = build_samples(examples, task, table, seed);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  const std::filesystem::path dir(out_dir);
  write_samples((dir / "train.jsonl").string(), ds.train);
  write_samples((dir / "val.jsonl").string(), ds.val);
  write_samples((dir / "test.jsonl").string(), ds.test);
  std::ofstream m(dir / "manifest.txt", std::ios::binary | std::ios::trunc);
  if (!m) throw IoError("cannot write manifest in '" + out_dir + "'");
  m << ds.manifest.serialize();
  return ds.manifest;
}

}  // namespace codezip
