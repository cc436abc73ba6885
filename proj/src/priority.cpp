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

#include "codezip/priority.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "codezip/error.hpp"

namespace codezip {

double relative_degradation(const AblationRecord& record) {
  if (!(record.metric_full > 0.0)) {
    throw InvalidArgument("ablation record for " + std::string(type_label_name(record.type_removed)) +
                          ": metric_full must be > 0");
  }
  const double d = (record.metric_full - record.metric_ablated) / record.metric_full;
  return std::max(kDegradationFloor, d);
}

double compute_priority(const AblationRecord& record) {
  if (!(record.tau_code_t >= 0.0 && record.tau_code_t <= 1.0)) {
    throw InvalidArgument("ablation record: tau_code_T must lie in [0, 1]");
  }
  return record.tau_code_t / relative_degradation(record);
}

PriorityTable::PriorityTable(Task task, std::array<double, kNumRankedTypes> priorities)
    : task_(task), priorities_(priorities) {
  for (std::size_t i = 0; i < kNumRankedTypes; ++i) {
    if (!std::isfinite(priorities_[i]) || priorities_[i] < 0.0) {
      throw InvalidArgument("priority for " + std::string(type_label_name(kRankedTypes[i])) +
                            " must be finite and nonnegative");
    }
  }
  std::array<std::size_t, kNumRankedTypes> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return priorities_[a] > priorities_[b]; });
  for (std::size_t r = 0; r < kNumRankedTypes; ++r) ranks_[order[r]] = static_cast<int>(r) + 1;
}

double PriorityTable::priority(TypeLabel t) const {
  if (t == TypeLabel::kOutOfType) return 0.0;
  return priorities_[index_of(t)];
}

int PriorityTable::rank(TypeLabel t) const {
  if (t == TypeLabel::kOutOfType) return kOutOfTypeRank;
  return ranks_[index_of(t)];
}

std::array<TypeLabel, kNumRankedTypes> PriorityTable::removal_order() const {
  std::array<TypeLabel, kNumRankedTypes> out{};
  for (std::size_t i = 0; i < kNumRankedTypes; ++i) out[ranks_[i] - 1] = kRankedTypes[i];
  return out;
}

PriorityTable PriorityTable::default_for(Task task) {
  // Order: Symbol, Signature, Invocation, Identifier, Structure.
  switch (task) {
    case Task::kAssertion:
      // Invocation > Symbol > Identifier > Signature > Structure
      return PriorityTable(task, {4.0, 1.0, 8.0, 2.0, 0.5});
    case Task::kBugs2Fix:
      // Identifier > Invocation > Symbol > Signature > Structure
      return PriorityTable(task, {2.0, 1.0, 4.0, 8.0, 0.5});
    case Task::kSuggestion:
      // Symbol > Invocation > Identifier > Signature > Structure
      return PriorityTable(task, {8.0, 1.0, 4.0, 2.0, 0.5});
  }
  return PriorityTable(task, {4.0, 1.0, 8.0, 2.0, 0.5});
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string PriorityTable::serialize() const {
  std::string out = "# codezip priority table\nversion=1\ntask=";
  out += task_tag(task_);
  out += '\n';
  for (std::size_t i = 0; i < kNumRankedTypes; ++i) {
    out += "type.";
    out += type_label_name(kRankedTypes[i]);
    out += ".priority=" + format_double(priorities_[i]) + "\n";
  }
  return out;
}

PriorityTable PriorityTable::parse(std::string_view text) {
  std::optional<Task> task;
  std::array<std::optional<double>, kNumRankedTypes> values;
  bool have_version = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError("priority table line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected key=value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "version") {
      if (value != "1") throw fail("unsupported version '" + std::string(value) + "'");
      have_version = true;
    } else if (key == "task") {
      task = parse_task(value);
      if (!task) throw fail("unknown task '" + std::string(value) + "'");
    } else if (key.starts_with("type.") && key.ends_with(".priority")) {
      auto name = key.substr(5, key.size() - 5 - 9);
      auto label = parse_type_label(name);
      if (!label || *label == TypeLabel::kOutOfType) throw fail("unknown type '" + std::string(name) + "'");
      auto& slot = values[index_of(*label)];
      if (slot) throw fail("duplicate type '" + std::string(name) + "'");
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw fail("bad number '" + std::string(value) + "'");
      }
      slot = v;
    } else {
      throw fail("unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_version) throw FormatError("priority table: missing version");
  if (!task) throw FormatError("priority table: missing task");
  std::array<double, kNumRankedTypes> priorities{};
  for (std::size_t i = 0; i < kNumRankedTypes; ++i) {
    if (!values[i]) {
      throw FormatError("priority table: missing type '" + std::string(type_label_name(kRankedTypes[i])) + "'");
    }
    priorities[i] = *values[i];
  }
  try {
    return PriorityTable(*task, priorities);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("priority table: ") + e.what());
  }
}

PriorityTable PriorityTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read priority table '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void PriorityTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write priority table '" + path + "'");
  out << serialize();
  if (!out) throw IoError("write failed for '" + path + "'");
}

PriorityTable build_table(std::span<const AblationRecord> records) {
  if (records.empty()) throw InvalidArgument("build_table: no ablation records");
  const Task task = records.front().task;
  std::array<std::optional<double>, kNumRankedTypes> values;
  for (const auto& r : records) {
    if (r.task != task) throw InvalidArgument("build_table: records mix tasks");
    if (r.type_removed == TypeLabel::kOutOfType) {
      throw InvalidArgument("build_table: OutOfType cannot be ablated");
    }
    auto& slot = values[index_of(r.type_removed)];
    if (slot) {
      throw InvalidArgument("build_table: duplicate record for type " +
                            std::string(type_label_name(r.type_removed)));
    }
    slot = compute_priority(r);
  }
  std::array<double, kNumRankedTypes> priorities{};
  for (std::size_t i = 0; i < kNumRankedTypes; ++i) {
    if (!values[i]) {
      throw InvalidArgument("build_table: missing record for type " +
                            std::string(type_label_name(kRankedTypes[i])));
    }
    priorities[i] = *values[i];
  }
  return PriorityTable(task, priorities);
}

}  // namespace codezip
