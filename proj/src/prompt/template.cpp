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

#include "codezip/prompt/template.hpp"

#include "codezip/lexer.hpp"

namespace codezip::prompt {

TaskTemplate TaskTemplate::for_task(Task task) {
  switch (task) {
    case Task::kAssertion:
      return {task,
              "Generate the assertion statement that replaces \"<AssertPlaceHolder>\" in the unit test.",
              {{"FOCAL_METHOD", true}, {"UNIT_TEST", true}, {"ASSERTION", false}}};
    case Task::kBugs2Fix:
      return {task, "Fix the bug in the given method and return the fixed method.",
              {{"BUGGY_CODE", true}, {"FIXED_CODE", true}}};
    case Task::kSuggestion:
      return {task, "Write the whole method for the given method header.",
              {{"METHOD_HEADER", false}, {"WHOLE_METHOD", true}}};
  }
  return for_task(Task::kAssertion);
}

namespace {

std::string trim_newlines(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == '\n') s.remove_prefix(1);
  return std::string(s);
}

std::string render_block(const TaskTemplate& tmpl, const std::vector<std::string>& inputs, const std::string* answer) {
  std::vector<std::string> parts(tmpl.input_count());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto& slot = parts[std::min(i, parts.size() - 1)];
    if (!slot.empty()) slot += "\n";
    slot += trim_newlines(inputs[i]);
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += "### " + tmpl.sections[i].header + "\n" + parts[i] + "\n";
  }
  out += "### " + tmpl.answer_section().header + "\n";
  if (answer) out += trim_newlines(*answer) + "\n";
  return out;
}

}  // namespace

PromptBundle assemble(const TaskTemplate& tmpl, const std::vector<Shot>& shots,
                      const std::vector<std::string>& question) {
  PromptBundle bundle;
  bundle.question = question;
  std::string rendered = tmpl.instruction + "\n\n";
  for (const auto& shot : shots) {
    bundle.shots.push_back(render_block(tmpl, shot.inputs, &shot.answer));
    rendered += bundle.shots.back() + "\n";
  }
  rendered += render_block(tmpl, question, nullptr);
  bundle.rendered = std::move(rendered);
  bundle.token_count = lex(bundle.rendered).length();
  return bundle;
}

PromptBundle assemble(Task task, const std::vector<Shot>& shots, const std::vector<std::string>& question) {
  return assemble(TaskTemplate::for_task(task), shots, question);
}

std::vector<std::pair<std::string, std::string>> parse_sections(std::string_view rendered) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  bool open = false;
  while (pos <= rendered.size()) {
    auto eol = rendered.find('\n', pos);
    if (eol == std::string_view::npos) eol = rendered.size();
    const auto line = rendered.substr(pos, eol - pos);
    if (line.starts_with("### ")) {
      auto name = line.substr(4);
      while (!name.empty() && (name.back() == ' ' || name.back() == '\r')) name.remove_suffix(1);
      out.emplace_back(std::string(name), std::string());
      open = true;
    } else if (open) {
      auto& body = out.back().second;
      if (!body.empty() || !line.empty()) {
        if (!body.empty()) body += "\n";
        body += line;
      }
    }
    pos = eol + 1;
  }
  for (auto& [_, body] : out) body = trim_newlines(body);
  return out;
}

}  // namespace codezip::prompt
