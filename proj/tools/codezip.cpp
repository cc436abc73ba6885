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

// codezip: command-line front end for the compression pipeline.
//
// Exit codes: 0 success, 1 other failure, 2 bad flags, 3 unreadable or
// malformed input, 4 checkpoint mismatch, 5 strict-parse refusal.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "codezip/ablation.hpp"
#include "codezip/compressor.hpp"
#include "codezip/corpus.hpp"
#include "codezip/dataset.hpp"
#include "codezip/error.hpp"
#include "codezip/lexer.hpp"
#include "codezip/neuralzip/train.hpp"
#include "codezip/priority.hpp"
#include "codezip/prompt/bm25.hpp"
#include "codezip/prompt/lm_client.hpp"
#include "codezip/prompt/rag.hpp"
#include "codezip/typer.hpp"
#include "json.hpp"

namespace {

using namespace codezip;
namespace nz = codezip::neuralzip;

constexpr int kExitOther = 1;
constexpr int kExitFlags = 2;
constexpr int kExitInput = 3;
constexpr int kExitCheckpoint = 4;
constexpr int kExitRefused = 5;

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PriorityTable table_for(Task task, const std::string& path) {
  if (path.empty()) return PriorityTable::default_for(task);
  auto t = PriorityTable::load(path);
  if (t.task() != task) {
    throw InvalidArgument("table '" + path + "' is for " + std::string(task_tag(t.task())) + ", not " +
                          std::string(task_tag(task)));
  }
  return t;
}

std::string header(const std::string& cmd, std::uint64_t seed, const std::string& extra = "") {
  return "# codezip " + cmd + " seed=" + std::to_string(seed) + (extra.empty() ? "" : " " + extra);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InvalidArgument("not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

struct Options {
  std::uint64_t seed = 0;
  std::string task = "ASSERTION";
  std::string table;
  std::string input;
  std::string out;
  bool json = false;
  bool occurrences = false;
  double tau = 0.0;
  bool strict = false;
  std::string model;
  std::string corpus;
  std::string questions;
  long shots_single = 1;
  std::string shots = "1";
  std::string taus = "0";
  std::string endpoint;
  std::string lm_model = "gpt-3.5-turbo";
  std::string key_env = "CODEZIP_LM_KEY";
  unsigned concurrency = 4;
  std::string records;
  std::size_t size = 200;
  double oov = 0.12;
  // training
  std::string data;
  std::size_t epochs = 10;
  double lr = 5e-5;
  std::size_t batch = 16;
  std::size_t warmup = 1000;
  double weight_decay = 0.01;
  double dropout = 0.0;
  double clip = 1.0;
  int d_model = 64;
  int d_ff = 128;
  int layers = 1;
  std::size_t max_src = 160;
  std::size_t max_tgt = 160;
  std::size_t min_count = 2;
  std::string gate = "learned";
  std::string log;
};

std::unique_ptr<prompt::BaseLMClient> make_lm(const Options& o, const std::vector<prompt::KbEntry>& questions) {
  if (!o.endpoint.empty()) {
    return std::make_unique<prompt::HttpLMClient>(prompt::HttpClientOptions{.endpoint = o.endpoint, .key_env = o.key_env});
  }
  std::unordered_map<std::string, std::string> gold;
  for (const auto& q : questions) gold[q.id] = q.answer;
  std::cerr << "codezip: no --endpoint given, using the local echo stub\n";
  return std::make_unique<prompt::StubLMClient>(prompt::StubLMClient::echo_gold(std::move(gold)));
}

int cmd_classify(const Options& o) {
  const Task task = require_task(o.task);
  const auto typed = classify_source(read_input(o.input), table_for(task, o.table));
  const auto& stream = typed.stream;
  struct Row {
    std::string token;
    std::vector<std::string> types;
    std::size_t tf = 0;
  };
  std::vector<Row> rows;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < typed.length(); ++i) {
    const auto& text = stream.countable_at(i).text;
    const std::string label(type_label_name(typed.labels[i]));
    if (o.occurrences) {
      rows.push_back({text, {label}, typed.tf_of(i)});
      continue;
    }
    auto [it, fresh] = index.emplace(text, rows.size());
    if (fresh) rows.push_back({text, {}, typed.tf_of(i)});
    auto& types = rows[it->second].types;
    if (std::find(types.begin(), types.end(), label) == types.end()) types.push_back(label);
  }
  if (o.json) {
    nlohmann::json doc;
    doc["seed"] = o.seed;
    doc["task"] = std::string(task_tag(task));
    doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) doc["rows"].push_back({{"token", r.token}, {"types", r.types}, {"tf", r.tf}});
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  std::cout << header("classify", o.seed, "task=" + std::string(task_tag(task))) << "\n";
  std::cout << "token\ttype\ttf\n";
  for (const auto& r : rows) {
    std::string types;
    for (const auto& t : r.types) types += (types.empty() ? "" : ",") + t;
    std::cout << r.token << '\t' << types << '\t' << r.tf << '\n';
  }
  return 0;
}

int cmd_compress(const Options& o) {
  const Task task = require_task(o.task);
  const auto source = read_input(o.input);
  if (o.tau < 0 || o.tau > 1) throw InvalidArgument("--tau must lie in [0, 1]");
  std::cerr << header("compress", o.seed, "tau=" + std::to_string(o.tau)) << "\n";
  if (!o.model.empty()) {
    const auto model = nz::load_checkpoint(o.model);
    const auto src = lex(source).countable_texts();
    if (o.tau == 0) {
      std::cout << join_tokens(src) << "\n";
      return 0;
    }
    std::cout << join_tokens(model.decode(task, o.tau, src, src.size() + 2)) << "\n";
    return 0;
  }
  const auto result = compress_source(source, o.tau, table_for(task, o.table), {.strict_parse = o.strict});
  std::cout << result.text << "\n";
  return 0;
}

int cmd_build_dataset(const Options& o) {
  const Task task = require_task(o.task);
  const auto rows = prompt::load_kb_jsonl(o.corpus);
  const auto m = build_dataset(code_examples(rows, task), task, table_for(task, o.table), o.seed, o.out);
  std::cerr << "codezip: skipped " << m.skipped_unparsable << " unparsable example(s)\n";
  std::cout << header("build-dataset", o.seed, "task=" + std::string(task_tag(task))) << "\n" << m.serialize();
  return 0;
}

int cmd_rank(const Options& o) {
  const Task task = require_task(o.task);
  const auto rows = prompt::load_kb_jsonl(o.corpus);
  auto lm = make_lm(o, rows);
  const auto records = run_ablation(rows, task, *lm,
                                    {.shots = o.shots_single, .model = o.lm_model, .concurrency = o.concurrency,
                                     .persist_path = o.records});
  const auto table = build_table(records);
  if (!o.out.empty()) table.save(o.out);
  std::cout << header("rank", o.seed, "task=" + std::string(task_tag(task))) << "\n";
  std::cout << "type,tau_code_t,metric_full,metric_ablated,priority,rank\n";
  for (const auto& r : records) {
    std::printf("%s,%.6f,%.4f,%.4f,%.6g,%d\n", std::string(type_label_name(r.type_removed)).c_str(), r.tau_code_t,
                r.metric_full, r.metric_ablated, compute_priority(r), table.rank(r.type_removed));
  }
  return 0;
}

nz::ModelConfig model_config(const Options& o) {
  nz::ModelConfig c;
  c.d_model = o.d_model;
  c.d_ff = o.d_ff;
  c.n_layers = o.layers;
  c.lengths.max_src = o.max_src;
  c.lengths.max_tgt = o.max_tgt;
  c.gate = nz::parse_gate_mode(o.gate);
  return c;
}

int cmd_train(const Options& o) {
  const std::string dir = o.data;
  const auto train_set = load_dataset(dir + "/train.jsonl");
  std::vector<CompressionSample> val;
  if (std::ifstream(dir + "/val.jsonl")) val = load_dataset(dir + "/val.jsonl");
  const auto cfg = model_config(o);
  const auto vocab = nz::Vocab::build(train_set, o.min_count);
  nz::EncodeOptions enc = cfg.lengths;
  enc.copy_targets = cfg.gate != nz::GateMode::kGenerateOnly;
  std::vector<nz::EncodedSample> data;
  for (const auto& s : train_set) data.push_back(nz::encode(vocab, s, enc));
  auto model = nz::CopyModel<float>::random(cfg, vocab, o.seed);
  nz::TrainConfig tc;
  tc.lr = o.lr;
  tc.batch = o.batch;
  tc.warmup = o.warmup;
  tc.epochs = o.epochs;
  tc.seed = o.seed;
  tc.weight_decay = o.weight_decay;
  tc.dropout = o.dropout;
  tc.clip = o.clip;
  tc.log_path = o.log;
  std::cerr << header("train", o.seed) << " samples=" << data.size() << " vocab=" << vocab.size()
            << " params=" << model.params().parameter_count() << "\n";
  const auto start = std::chrono::steady_clock::now();
  nz::train(model, data, tc, [&](std::size_t epoch, double loss) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "epoch " << epoch + 1 << "/" << o.epochs << " loss " << loss << " (" << secs << " s)\n";
  });
  nz::save_checkpoint(model, o.out);
  std::cout << header("train", o.seed) << "\n";
  std::cout << "checkpoint=" << o.out << "\ntrain_samples=" << data.size() << "\nvocab=" << vocab.size() << "\n";
  if (!val.empty()) {
    const auto ev = nz::evaluate_model(model, val);
    std::cout << "val_f1=" << ev.overlap.f1 << "\nval_spearman=" << ev.spearman << "\n";
  }
  return 0;
}

int cmd_score(const Options& o) {
  const auto model = nz::load_checkpoint(o.model);
  const auto samples = load_dataset(o.data);
  const auto ev = nz::evaluate_model(model, samples);
  std::cout << header("score", o.seed) << "\n";
  std::cout << "samples=" << samples.size() << "\nprecision=" << ev.overlap.precision
            << "\nrecall=" << ev.overlap.recall << "\nf1=" << ev.overlap.f1 << "\nspearman=" << ev.spearman
            << "\nextractive=" << ev.extractive << "\n";
  return 0;
}

int cmd_eval(const Options& o) {
  const Task task = require_task(o.task);
  const auto kb_rows = prompt::load_kb_jsonl(o.corpus);
  const auto questions = o.questions.empty() ? kb_rows : prompt::load_kb_jsonl(o.questions);
  const prompt::KnowledgeBase kb(kb_rows);
  auto lm = make_lm(o, questions);
  const auto table = table_for(task, o.table);
  std::optional<nz::CopyModel<float>> model;
  if (!o.model.empty()) model.emplace(nz::load_checkpoint(o.model));
  const bool bleu = task == Task::kSuggestion;
  std::cout << header("eval", o.seed,
                      "task=" + std::string(task_tag(task)) + " compressor=" + (model ? "model" : "oracle") +
                          " metric=" + (bleu ? "bleu4-proxy(not CodeBLEU)" : "exact-match"))
            << "\n";
  std::cout << "shots,tau,token_count,metric\n";
  for (double shots : parse_list(o.shots)) {
    for (double tau : parse_list(o.taus)) {
      if (tau < 0 || tau > 1) throw InvalidArgument("tau values must lie in [0, 1]");
      prompt::ShotTransform transform = prompt::keep_all;
      if (tau > 0 && model) {
        transform = [&, tau](const std::string& code) {
          const auto src = lex(code).countable_texts();
          const auto out = model->decode(task, tau, src, src.size() + 2);
          return prompt::ShotRewrite{join_tokens(out), src.size(), src.size() - std::min(src.size(), out.size())};
        };
      } else if (tau > 0) {
        transform = [&, tau](const std::string& code) {
          const auto typed = classify_source(code, table);
          const auto r = compress({typed, tau, table});
          return prompt::ShotRewrite{r.text, typed.length(), r.removed_indices.size()};
        };
      }
      const auto report = prompt::evaluate(kb, questions, task, *lm, transform,
                                           {.shots = static_cast<long>(shots), .model = o.lm_model,
                                            .concurrency = o.concurrency, .exclude_self = o.questions.empty()});
      for (const auto& f : report.failures) std::cerr << "query " << f.id << " failed: " << f.message << "\n";
      std::printf("%ld,%.2f,%.2f,%.4f\n", static_cast<long>(shots), tau, report.mean_token_count, report.metric);
    }
  }
  return 0;
}

int cmd_gen_corpus(const Options& o) {
  const Task task = require_task(o.task);
  const auto rows = synthetic_corpus(task, {.size = o.size, .seed = o.seed, .oov_rate = o.oov});
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out, std::ios::trunc);
    if (!file) throw IoError("cannot write '" + o.out + "'");
  }
  std::ostream& out = o.out.empty() ? std::cout : file;
  for (const auto& r : rows) out << prompt::kb_row_json(r) << "\n";
  std::cerr << header("gen-corpus", o.seed) << " rows=" << rows.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codezip: type-aware code compression for retrieval-augmented prompts"};
  app.set_config("--config", "", "INI/TOML file of option values; [subcommand] sections; flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "Seed for every random choice of the run")->capture_default_str();

  auto task_opt = [&](CLI::App* sub) {
    sub->add_option("--task", o.task, "ASSERTION, BUGS2FIX or SUGGESTION")->capture_default_str();
  };
  auto table_opt = [&](CLI::App* sub) {
    sub->add_option("--table", o.table, "Priority table file (default: shipped table of the task)");
  };
  auto lm_opts = [&](CLI::App* sub) {
    sub->add_option("--endpoint", o.endpoint, "Chat-completions URL; omitted means the local echo stub");
    sub->add_option("--lm-model", o.lm_model, "Model name sent to the endpoint")->capture_default_str();
    sub->add_option("--key-env", o.key_env, "Environment variable with the API key")->capture_default_str();
    sub->add_option("--concurrency", o.concurrency, "LM calls in flight")->capture_default_str()->check(CLI::PositiveNumber);
  };
  auto model_opts = [&](CLI::App* sub) {
    sub->add_option("--d-model", o.d_model)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--d-ff", o.d_ff)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--layers", o.layers)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--max-src", o.max_src)->capture_default_str();
    sub->add_option("--max-tgt", o.max_tgt)->capture_default_str();
    sub->add_option("--gate", o.gate, "learned, generate-only (no copy) or copy-only")
        ->capture_default_str()
        ->check(CLI::IsMember({"learned", "generate-only", "no-copy", "copy-only"}));
  };

  auto* classify = app.add_subcommand("classify", "Print token / type / TF rows for a Java file");
  classify->add_option("file", o.input, "Input file ('-' or omitted: stdin)");
  task_opt(classify);
  table_opt(classify);
  classify->add_flag("--json", o.json, "Machine-readable output");
  classify->add_flag("--occurrences", o.occurrences, "One row per token occurrence instead of per text");

  auto* compressc = app.add_subcommand("compress", "Compress a Java file to stdout");
  compressc->add_option("file", o.input, "Input file ('-' or omitted: stdin)");
  compressc->add_option("--tau", o.tau, "Fraction of code tokens to remove")->required()->check(CLI::Range(0.0, 1.0));
  task_opt(compressc);
  table_opt(compressc);
  auto* oracle_flag = compressc->add_flag("--oracle", "Use the greedy oracle (default)");
  auto* model_flag = compressc->add_option("--model", o.model, "Use a trained checkpoint");
  oracle_flag->excludes(model_flag);
  compressc->add_flag("--strict-parse", o.strict, "Refuse input the structural parser rejects (exit 5)")
      ->excludes(model_flag);

  auto* build = app.add_subcommand("build-dataset", "Oracle compressions at nine ratios, split 80/10/10");
  build->add_option("--corpus", o.corpus, "Knowledge-base JSONL")->required();
  build->add_option("--out", o.out, "Output directory")->required();
  task_opt(build);
  table_opt(build);

  auto* rank = app.add_subcommand("rank", "Type ablation against an LM and the resulting priority table");
  rank->add_option("--corpus", o.corpus, "Knowledge-base JSONL")->required();
  rank->add_option("--out", o.out, "Write the priority table here");
  rank->add_option("--records", o.records, "Persist ablation records (JSONL) as they complete");
  rank->add_option("--shots", o.shots_single, "Retrieved shots per query")->capture_default_str()->check(CLI::PositiveNumber);
  task_opt(rank);
  lm_opts(rank);

  auto* trainc = app.add_subcommand("train", "Train the copy-enhanced compressor on a built dataset");
  trainc->add_option("--data", o.data, "Dataset directory with train.jsonl (val.jsonl optional)")->required();
  trainc->add_option("--out", o.out, "Checkpoint path")->required();
  trainc->add_option("--epochs", o.epochs)->capture_default_str();
  trainc->add_option("--lr", o.lr)->capture_default_str();
  trainc->add_option("--batch", o.batch)->capture_default_str()->check(CLI::PositiveNumber);
  trainc->add_option("--warmup", o.warmup)->capture_default_str();
  trainc->add_option("--weight-decay", o.weight_decay)->capture_default_str();
  trainc->add_option("--dropout", o.dropout)->capture_default_str()->check(CLI::Range(0.0, 0.9));
  trainc->add_option("--clip", o.clip)->capture_default_str();
  trainc->add_option("--min-count", o.min_count, "Minimum token count for the vocabulary")->capture_default_str();
  trainc->add_option("--log", o.log, "CSV of step,loss,lr");
  model_opts(trainc);

  auto* score = app.add_subcommand("score", "Token F1 and ratio control of a checkpoint on a dataset split");
  score->add_option("--data", o.data, "Split JSONL")->required();
  score->add_option("--model", o.model, "Checkpoint")->required();

  auto* evalc = app.add_subcommand("eval", "RAG evaluation CSV over shot counts and ratios");
  evalc->add_option("--corpus", o.corpus, "Knowledge-base JSONL")->required();
  evalc->add_option("--questions", o.questions, "Question JSONL (default: leave-one-out over the corpus)");
  evalc->add_option("--shots", o.shots, "Comma-separated shot counts")->capture_default_str();
  evalc->add_option("--tau", o.taus, "Comma-separated ratios; 0 means uncompressed")->capture_default_str();
  evalc->add_option("--model", o.model, "Compress shots with this checkpoint instead of the oracle");
  task_opt(evalc);
  table_opt(evalc);
  lm_opts(evalc);

  auto* gen = app.add_subcommand("gen-corpus", "Write a seeded synthetic Java knowledge base");
  gen->add_option("--size", o.size, "Rows")->capture_default_str();
  gen->add_option("--oov-rate", o.oov, "Chance of a rare made-up identifier")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  gen->add_option("--out", o.out, "Output JSONL (default: stdout)");
  task_opt(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitFlags;
  }

  try {
    if (*classify) return cmd_classify(o);
    if (*compressc) return cmd_compress(o);
    if (*build) return cmd_build_dataset(o);
    if (*rank) return cmd_rank(o);
    if (*trainc) return cmd_train(o);
    if (*score) return cmd_score(o);
    if (*evalc) return cmd_eval(o);
    if (*gen) return cmd_gen_corpus(o);
  } catch (const InvalidArgument& e) {
    std::cerr << "codezip: " << e.what() << "\n";
    return kExitFlags;
  } catch (const IoError& e) {
    std::cerr << "codezip: " << e.what() << "\n";
    return kExitInput;
  } catch (const FormatError& e) {
    std::cerr << "codezip: " << e.what() << "\n";
    return kExitInput;
  } catch (const CheckpointMismatch& e) {
    std::cerr << "codezip: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const UnparsableInput& e) {
    std::cerr << "codezip: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::exception& e) {
    std::cerr << "codezip: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
