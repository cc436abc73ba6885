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

#include "codezip/prompt/rag.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "codezip/error.hpp"
#include "codezip/lexer.hpp"
#include "codezip/prompt/metrics.hpp"

namespace codezip::prompt {

ShotRewrite keep_all(const std::string& code) { return {code, lex(code).length(), 0}; }

double task_metric(Task task, const std::vector<std::string>& preds, const std::vector<std::string>& golds) {
  if (preds.size() != golds.size()) throw InvalidArgument("task_metric: size mismatch");
  if (preds.empty()) return 0.0;
  if (task != Task::kSuggestion) return corpus_em(preds, golds);
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) sum += bleu4_proxy_text(preds[i], golds[i]);
  return sum / static_cast<double>(preds.size());
}

PromptBundle build_prompt(const KnowledgeBase& kb, const KbEntry& question, Task task,
                          const ShotTransform& transform, const EvalOptions& options,
                          std::vector<ShotRewrite>* rewrites) {
  if (options.shots < 0) throw InvalidArgument("shot count must be non-negative");
  const auto tmpl = TaskTemplate::for_task(task);
  std::vector<Shot> shots;
  if (options.shots > 0 && kb.size() > 0) {
    for (const auto& hit : kb.retrieve(question.query, options.shots + (options.exclude_self ? 1 : 0))) {
      const auto& entry = kb.entries()[hit.index];
      if (options.exclude_self && entry.id == question.id) continue;
      if (static_cast<long>(shots.size()) == options.shots) break;
      auto rewrite = [&](const std::string& code) {
        auto r = transform(code);
        if (rewrites) rewrites->push_back(r);
        return r.text;
      };
      Shot shot;
      for (std::size_t s = 0; s < tmpl.input_count(); ++s) {
        const std::string part = s < entry.code.size() ? entry.code[s] : std::string();
        shot.inputs.push_back(tmpl.sections[s].compressible ? rewrite(part) : part);
      }
      shot.answer = tmpl.answer_section().compressible ? rewrite(entry.answer) : entry.answer;
      shots.push_back(std::move(shot));
    }
  }
  return assemble(tmpl, shots, question.code);
}

EvalReport evaluate(const KnowledgeBase& kb, const std::vector<KbEntry>& questions, Task task, BaseLMClient& lm,
                    const ShotTransform& transform, const EvalOptions& options) {
  const std::size_t n = questions.size();
  EvalReport report;
  report.predictions.assign(n, "");
  report.token_counts.assign(n, 0);
  std::vector<std::vector<ShotRewrite>> rewrites(n);
  std::vector<std::string> errors(n);
  std::vector<char> failed(n, 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const auto bundle = build_prompt(kb, questions[i], task, transform, options, &rewrites[i]);
        report.token_counts[i] = bundle.token_count;
        ChatRequest req;
        req.model = options.model;
        req.messages.push_back({"user", bundle.rendered});
        req.tag = questions[i].id;
        report.predictions[i] = lm.complete(req).text;
      } catch (const std::exception& e) {
        failed[i] = 1;
        errors[i] = e.what();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(options.concurrency, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::string> golds;
  double tokens = 0.0, fraction = 0.0;
  std::size_t rewritten = 0;
  for (std::size_t i = 0; i < n; ++i) {
    golds.push_back(questions[i].answer);
    tokens += static_cast<double>(report.token_counts[i]);
    if (failed[i]) report.failures.push_back({i, questions[i].id, errors[i]});
    for (const auto& r : rewrites[i]) {
      if (r.original_tokens == 0) continue;
      fraction += static_cast<double>(r.removed_tokens) / static_cast<double>(r.original_tokens);
      ++rewritten;
    }
  }
  report.metric = task_metric(task, report.predictions, golds);
  report.mean_token_count = n ? tokens / static_cast<double>(n) : 0.0;
  report.mean_removed_fraction = rewritten ? fraction / static_cast<double>(rewritten) : 0.0;
  return report;
}

}  // namespace codezip::prompt
