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

#include "codezip/ablation.hpp"

#include <fstream>

#include "codezip/error.hpp"
#include "codezip/lexer.hpp"
#include "codezip/typer.hpp"
#include "json.hpp"

namespace codezip {

using nlohmann::json;

prompt::ShotRewrite strip_type(const std::string& code, TypeLabel type, const PriorityTable& labeling) {
  const auto typed = classify_source(code, labeling);
  const auto& stream = typed.stream;
  std::vector<std::size_t> kept;
  std::size_t removed = 0;
  for (std::size_t c = 0; c < stream.length(); ++c) {
    if (typed.labels[c] == type) {
      ++removed;
    } else {
      kept.push_back(stream.countable()[c]);
    }
  }
  return {detokenize(stream, kept), stream.length(), removed};
}

namespace {

void persist(const std::string& path, const AblationRecord& record) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot write ablation records to '" + path + "'");
  out << ablation_record_json(record) << '\n';
}

void raise_failures(const std::vector<prompt::QueryFailure>& failures, std::string_view stage) {
  std::string msg = std::to_string(failures.size()) + " LM call(s) failed during " + std::string(stage) + ":";
  for (const auto& f : failures) msg += "\n  [" + std::to_string(f.index) + "] " + f.id + ": " + f.message;
  throw TransportError(msg);
}

}  // namespace

std::vector<AblationRecord> run_ablation(const std::vector<prompt::KbEntry>& corpus, Task task,
                                         prompt::BaseLMClient& lm, const AblationOptions& options) {
  if (corpus.empty()) throw InvalidArgument("run_ablation: empty corpus");
  if (options.shots < 1) throw InvalidArgument("run_ablation: needs at least one shot");
  if (!options.persist_path.empty()) {
    std::ofstream truncate(options.persist_path, std::ios::trunc);
    if (!truncate) throw IoError("cannot write ablation records to '" + options.persist_path + "'");
  }
  const prompt::KnowledgeBase kb(corpus);
  const auto labeling = PriorityTable::default_for(task);
  prompt::EvalOptions eval{options.shots, options.model, options.concurrency, true};

  const auto full = prompt::evaluate(kb, corpus, task, lm, prompt::keep_all, eval);
  if (!full.failures.empty()) raise_failures(full.failures, "the intact run");

  std::vector<AblationRecord> records;
  for (TypeLabel type : kRankedTypes) {
    const auto strip = [&](const std::string& code) { return strip_type(code, type, labeling); };
    const auto ablated = prompt::evaluate(kb, corpus, task, lm, strip, eval);
    if (!ablated.failures.empty()) {
      raise_failures(ablated.failures, "the " + std::string(type_label_name(type)) + " run");
    }
    records.push_back({task, type, ablated.mean_removed_fraction, full.metric, ablated.metric});
    persist(options.persist_path, records.back());
  }
  return records;
}

std::string ablation_record_json(const AblationRecord& r) {
  json row;
  row["task"] = std::string(task_tag(r.task));
  row["type"] = std::string(type_label_name(r.type_removed));
  row["tau_code_t"] = r.tau_code_t;
  row["metric_full"] = r.metric_full;
  row["metric_ablated"] = r.metric_ablated;
  return row.dump();
}

AblationRecord parse_ablation_record(std::string_view line, std::size_t line_no) {
  const auto where = "ablation line " + std::to_string(line_no) + ": ";
  try {
    const auto row = json::parse(line);
    AblationRecord r;
    r.task = require_task(row.at("task").get<std::string>());
    auto type = parse_type_label(row.at("type").get<std::string>());
    if (!type || *type == TypeLabel::kOutOfType) throw FormatError(where + "unknown type");
    r.type_removed = *type;
    r.tau_code_t = row.at("tau_code_t").get<double>();
    r.metric_full = row.at("metric_full").get<double>();
    r.metric_ablated = row.at("metric_ablated").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(where + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(where + e.what());
  }
}

std::vector<AblationRecord> load_ablation_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::vector<AblationRecord> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_ablation_record(line, n));
  }
  return out;
}

}  // namespace codezip
