// qasrl/tools/cli.cc

// Copyright 2026  QA-SRL Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "qasrl/cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "qasrl/annosvc.h"
#include "qasrl/expand.h"
#include "qasrl/http.h"
#include "qasrl/parser.h"
#include "qasrl/selfcheck.h"
#include "qasrl/synthetic.h"

// after the Eigen users: resolv.h, pulled in here, defines a macro _res
#include "httplib.h"

namespace qasrl {

namespace fs = std::filesystem;

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json = false;
  bool verbose = false;
  std::uint64_t seed = 1;

  void emit(const Json& summary, const std::string& text) const {
    if (json)
      out << summary.dump() << '\n';
    else
      out << text;
  }
};

std::string data_dir() {
  const char* d = std::getenv("QASRL_DATA_DIR");
  return d ? d : "";
}

// A user path, or its counterpart under QASRL_DATA_DIR when the path itself
// does not exist; `fallback` names the default file there.
fs::path input_path(const std::string& given, const std::string& fallback, const std::string& what) {
  const std::string root = data_dir();
  fs::path p = given;
  if (given.empty()) {
    if (root.empty() || fallback.empty())
      throw ValidationError(what + " is required (or set QASRL_DATA_DIR)");
    p = fs::path(root) / fallback;
  } else if (!fs::exists(p) && !root.empty() && p.is_relative() && fs::exists(fs::path(root) / p)) {
    p = fs::path(root) / p;
  }
  if (!fs::is_regular_file(p)) throw ValidationError(what + " not found: " + p.string());
  return p;
}

void check_output(const std::string& path, const std::string& what) {
  if (path.empty()) throw ValidationError(what + " is required");
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw ValidationError("directory for " + what + " does not exist: " + parent.string());
}

std::optional<AggregationRule> parse_rule(const std::string& s) {
  if (s.empty() || s == "all") return std::nullopt;
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) throw std::invalid_argument(s);
    const int k = std::stoi(s.substr(0, slash)), n = std::stoi(s.substr(slash + 1));
    if (k < 1 || n < k) throw std::invalid_argument(s);
    return AggregationRule::k_of_n(k, n);
  } catch (const std::exception&) {
    throw ValidationError("aggregation rule must be 'all' or 'k/n' with 1 <= k <= n, got '" + s + "'");
  }
}

std::string rule_name(const std::optional<AggregationRule>& r) {
  return r ? std::to_string(r->required) + "/" + std::to_string(r->total) : "all";
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

std::string prf_text(const PRF& p) {
  return "P " + fmt(p.precision) + "  R " + fmt(p.recall) + "  F1 " + fmt(p.f1) + "\n";
}

// Model sizes; "full" is the default.
struct SizeFlags {
  std::string preset = "full";
  int embedding = -1, hidden = -1, layers = -1, mlp = -1, decoder_layers = -1, decoder_hidden = -1,
      slot_embedding = -1;
  double dropout = -1;

  void add(CLI::App* app, bool qgen) {
    app->add_option("--preset", preset, "Size preset")->check(CLI::IsMember({"full", "small", "tiny"}));
    app->add_option("--embedding-dim", embedding, "Word embedding size");
    app->add_option("--hidden", hidden, "Encoder hidden size");
    app->add_option("--layers", layers, "Encoder layers");
    app->add_option("--mlp-hidden", mlp, "Hidden size of the output MLP");
    app->add_option("--recurrent-dropout", dropout, "Recurrent dropout rate")->check(CLI::Range(0.0, 0.95));
    if (qgen) {
      app->add_option("--decoder-layers", decoder_layers, "Sequential decoder layers");
      app->add_option("--decoder-hidden", decoder_hidden, "Sequential decoder hidden size");
      app->add_option("--slot-embedding", slot_embedding, "Slot value embedding size");
    }
  }

  nn::EncoderConfig encoder() const {
    nn::EncoderConfig c;
    if (preset == "small") {
      c.embedding_dim = 50, c.indicator_dim = 10, c.hidden = 64, c.layers = 2;
    } else if (preset == "tiny") {
      c.embedding_dim = 8, c.indicator_dim = 4, c.hidden = 8, c.layers = 1;
    }
    if (embedding > 0) c.embedding_dim = embedding;
    if (hidden > 0) c.hidden = hidden;
    if (layers > 0) c.layers = layers;
    if (dropout >= 0) c.recurrent_dropout = dropout;
    return c;
  }
  int mlp_hidden() const { return mlp > 0 ? mlp : preset == "full" ? 100 : preset == "small" ? 64 : 8; }

  ModelConfig span_config(std::uint64_t seed) const {
    ModelConfig c;
    c.encoder = encoder();
    c.mlp_hidden = mlp_hidden();
    c.seed = seed;
    return c;
  }
  QgenConfig qgen_config(std::uint64_t seed) const {
    QgenConfig c;
    c.encoder = encoder();
    c.mlp_hidden = mlp_hidden();
    if (preset == "small") c.decoder_layers = 2, c.decoder_hidden = 64, c.slot_embedding = 32;
    if (preset == "tiny") c.decoder_layers = 1, c.decoder_hidden = 8, c.slot_embedding = 4;
    if (decoder_layers > 0) c.decoder_layers = decoder_layers;
    if (decoder_hidden > 0) c.decoder_hidden = decoder_hidden;
    if (slot_embedding > 0) c.slot_embedding = slot_embedding;
    c.seed = seed;
    return c;
  }
};

struct TrainFlags {
  std::string train, dev, out, rule, embeddings;
  int epochs = 40, patience = 10, batch = 80, min_count = 1;

  void add(CLI::App* app) {
    app->add_option("--train", train, "Training corpus (default $QASRL_DATA_DIR/train.jsonl)");
    app->add_option("--dev", dev, "Development corpus for early stopping");
    app->add_option("-o,--out", out, "Checkpoint to write")->required();
    app->add_option("--rule", rule, "Gold aggregation rule: all or k/n");
    app->add_option("--embeddings", embeddings, "Pretrained embeddings, one 'token v1 v2 ...' per line");
    app->add_option("--epochs", epochs, "Maximum epochs")->check(CLI::PositiveNumber);
    app->add_option("--patience", patience, "Epochs without dev improvement before stopping")
        ->check(CLI::PositiveNumber);
    app->add_option("--batch-size", batch, "Examples per update")->check(CLI::PositiveNumber);
    app->add_option("--min-count", min_count, "Minimum token count for the vocabulary")->check(CLI::PositiveNumber);
  }

  nn::TrainConfig config(std::uint64_t seed) const {
    nn::TrainConfig c;
    c.max_epochs = epochs;
    c.patience = patience;
    c.batch_size = batch;
    c.seed = seed;
    return c;
  }
};

struct Data {
  std::vector<VerbInstance> train, dev;
  nn::Vocabulary vocab;
};

Data load_training(const TrainFlags& f) {
  check_output(f.out, "--out");
  const auto rule = parse_rule(f.rule);
  const Corpus train = load_corpus(input_path(f.train, "train.jsonl", "training corpus"));
  Corpus dev;
  if (!f.dev.empty()) dev = load_corpus(input_path(f.dev, "", "dev corpus"));
  if (!f.embeddings.empty()) input_path(f.embeddings, "", "embeddings file");
  Data d;
  d.train = verb_instances(train, rule);
  d.dev = verb_instances(dev, rule);
  if (d.train.empty()) throw ValidationError("training corpus has no annotated verbs");
  std::vector<std::vector<std::string>> sentences;
  for (const auto& r : train) sentences.push_back(r.tokens);
  d.vocab = nn::Vocabulary::build(sentences, f.min_count);
  return d;
}

template <class Model>
int load_embeddings(Model& model, const std::string& path) {
  if (path.empty()) return 0;
  return nn::load_pretrained_embeddings(path, model.vocab, model.params.get("encoder.embedding").value);
}

Json report_json(const nn::TrainReport& r) {
  return {{"epochs", r.epochs_run},
          {"bestEpoch", r.best_epoch},
          {"earlyStopped", r.early_stopped},
          {"trainLoss", r.train_loss},
          {"devScore", r.dev_score}};
}

std::string report_text(const std::string& kind, const nn::TrainReport& r, const std::string& out) {
  std::string s = kind + ": " + std::to_string(r.epochs_run) + " epochs";
  if (!r.dev_score.empty()) s += ", best dev " + fmt(r.dev_score[static_cast<std::size_t>(r.best_epoch - 1)]) + " at epoch " + std::to_string(r.best_epoch);
  if (!r.train_loss.empty()) s += ", final loss " + fmt(r.train_loss.back());
  return s + "\nwrote " + out + "\n";
}

std::vector<std::vector<AnswerSpan>> detect(const nn::Checkpoint& ckpt, const std::vector<VerbInstance>& data,
                                            double tau) {
  std::vector<std::vector<AnswerSpan>> pred;
  if (ckpt.kind == BioModel<float>::kKind) {
    auto m = BioModel<float>::from_checkpoint(ckpt);
    for (const auto& ex : data) pred.push_back(m.predict(ex.tokens, ex.verb_index));
  } else {
    auto m = SpanModel<float>::from_checkpoint(ckpt);
    for (const auto& ex : data) pred.push_back(select_spans(m.span_probabilities(ex.tokens, ex.verb_index), tau));
  }
  return pred;
}

Matcher matcher(bool iou, double threshold) { return iou ? Matcher::iou(threshold) : Matcher::exact(); }

void write_lines(const std::string& path, const std::vector<Json>& lines) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  for (const auto& j : lines) f << j.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  CLI::App app{"QA-SRL toolkit: corpus tools, span detection, question generation, parsing, data expansion and "
               "the annotation service",
               "qasrl"};
  app.require_subcommand(1);
  app.add_flag("--json", ctx.json, "Print a machine-readable JSON summary to stdout");
  app.add_flag("-v,--verbose", ctx.verbose, "Progress messages on stderr");
  app.add_option("--seed", ctx.seed, "Random seed");

  // train-span
  auto* train_span_cmd = app.add_subcommand("train-span", "Train a span detector");
  bool bio = false, span = false;
  double train_tau = 0.5;
  TrainFlags span_train;
  SizeFlags span_size;
  auto* bio_flag = train_span_cmd->add_flag("--bio", bio, "B/I/O tagger");
  train_span_cmd->add_flag("--span", span, "Span scorer")->excludes(bio_flag);
  train_span_cmd->add_option("--tau", train_tau, "Threshold for dev scoring of the span scorer")
      ->check(CLI::Range(0.0, 1.0));
  span_train.add(train_span_cmd);
  span_size.add(train_span_cmd, false);

  // train-qgen
  auto* train_qgen_cmd = app.add_subcommand("train-qgen", "Train a question generator");
  bool local = false, seq = false;
  TrainFlags qgen_train;
  SizeFlags qgen_size;
  auto* local_flag = train_qgen_cmd->add_flag("--local", local, "Independent per-slot classifiers");
  train_qgen_cmd->add_flag("--seq", seq, "Slot-by-slot LSTM decoder")->excludes(local_flag);
  std::string prepositions_file;
  qgen_train.add(train_qgen_cmd);
  qgen_size.add(train_qgen_cmd, true);
  train_qgen_cmd->add_option("--prepositions", prepositions_file, "Preposition list, one per line")
      ->check(CLI::ExistingFile);

  // parse
  auto* parse_cmd = app.add_subcommand("parse", "Predict QA-SRL tuples");
  std::string span_model, qgen_model, parse_input, parse_text, parse_out;
  double parse_tau = 0.5;
  parse_cmd->add_option("--span-model", span_model, "Span scorer checkpoint")->required();
  parse_cmd->add_option("--qgen-model", qgen_model, "Question generator checkpoint")->required();
  auto* input_opt = parse_cmd->add_option("-i,--input", parse_input, "Corpus JSONL to parse");
  parse_cmd->add_option("--text", parse_text, "A raw sentence (rough tokenizer and tagger)")->excludes(input_opt);
  parse_cmd->add_option("--tau", parse_tau, "Span probability threshold")->check(CLI::Range(0.0, 1.0));
  parse_cmd->add_option("-o,--out", parse_out, "Prediction JSONL to write");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold");
  bool exact = false, iou = false, joint = false;
  std::string gold_path, pred_path, eval_model, eval_rule;
  double eval_tau = 0.5, iou_threshold = 0.5;
  auto* exact_flag = eval_cmd->add_flag("--exact", exact, "Exact span match (default)");
  eval_cmd->add_flag("--iou", iou, "Span match at IOU >= threshold")->excludes(exact_flag);
  eval_cmd->add_option("--iou-threshold", iou_threshold, "IOU threshold")->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_flag("--joint", joint, "Question and span must both match");
  eval_cmd->add_option("--gold", gold_path, "Gold corpus (default $QASRL_DATA_DIR/dev.jsonl)");
  auto* pred_opt = eval_cmd->add_option("--predictions", pred_path, "Prediction JSONL from parse");
  eval_cmd->add_option("--span-model", eval_model, "Evaluate a span detector checkpoint directly")
      ->excludes(pred_opt);
  eval_cmd->add_option("--tau", eval_tau, "Threshold for --span-model")->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--rule", eval_rule, "Gold aggregation rule: all or k/n");

  // tune-tau
  auto* tune_cmd = app.add_subcommand("tune-tau", "Grid-search the F1-maximizing span threshold");
  std::string tune_model, tune_dev, tune_rule;
  double step = 0.01, tune_iou = 0.5;
  bool tune_use_iou = false;
  tune_cmd->add_option("--span-model", tune_model, "Span scorer checkpoint")->required();
  tune_cmd->add_option("--dev", tune_dev, "Development corpus (default $QASRL_DATA_DIR/dev.jsonl)");
  tune_cmd->add_option("--step", step, "Grid step")->check(CLI::Range(1e-4, 1.0));
  tune_cmd->add_flag("--iou", tune_use_iou, "Match at IOU >= 0.5 instead of exactly");
  tune_cmd->add_option("--iou-threshold", tune_iou, "IOU threshold")->check(CLI::Range(0.0, 1.0));
  tune_cmd->add_option("--rule", tune_rule, "Gold aggregation rule: all or k/n");

  // expand
  auto* expand_cmd = app.add_subcommand("expand", "Over-generate and filter candidate QA pairs");
  std::string ex_span, ex_qgen, ex_corpus, ex_out, model_id = "parser";
  double ex_tau = 0.2;
  int ex_fold = -1;
  expand_cmd->add_option("--span-model", ex_span, "Span scorer checkpoint")->required();
  expand_cmd->add_option("--qgen-model", ex_qgen, "Question generator checkpoint")->required();
  expand_cmd->add_option("--corpus", ex_corpus, "Annotated corpus (default $QASRL_DATA_DIR/train.jsonl)");
  expand_cmd->add_option("--tau", ex_tau, "Span probability threshold")->check(CLI::Range(0.0, 1.0));
  expand_cmd->add_option("--model-id", model_id, "Writer id recorded on candidates");
  expand_cmd->add_option("--fold", ex_fold, "Jackknife fold the models were trained without");
  expand_cmd->add_option("-o,--out", ex_out, "Candidate JSONL to write")->required();

  // jackknife
  auto* jk_cmd = app.add_subcommand("jackknife", "Split a corpus into k train/held-out folds");
  std::string jk_corpus, jk_dir;
  int k = 5;
  jk_cmd->add_option("--corpus", jk_corpus, "Corpus (default $QASRL_DATA_DIR/train.jsonl)");
  jk_cmd->add_option("-k", k, "Number of folds")->check(CLI::Range(2, 1000));
  jk_cmd->add_option("--out-dir", jk_dir, "Directory for fold-<i>-train.jsonl and fold-<i>-heldout.jsonl")
      ->required();

  // merge
  auto* merge_cmd = app.add_subcommand("merge", "Merge validated candidates into a corpus");
  std::string mg_corpus, mg_validated, mg_out, mg_negatives;
  bool paraphrase = false;
  merge_cmd->add_option("--corpus", mg_corpus, "Corpus (default $QASRL_DATA_DIR/train.jsonl)");
  merge_cmd->add_option("--validated", mg_validated, "Validated candidate JSONL")->required();
  merge_cmd->add_flag("--paraphrase-filter", paraphrase, "Drop expansion questions duplicating an original one");
  merge_cmd->add_option("-o,--out", mg_out, "Merged corpus to write")->required();
  merge_cmd->add_option("--negatives", mg_negatives, "Rejected candidates to write");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Corpus counts and implied payments");
  std::string st_corpus, st_rule;
  stats_cmd->add_option("--corpus", st_corpus, "Corpus (default $QASRL_DATA_DIR/train.jsonl)");
  stats_cmd->add_option("--rule", st_rule, "Validity rule: all or k/n");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the annotation service");
  std::string host = "127.0.0.1", log_path, sv_corpus;
  int port = 8080;
  ServiceConfig sv_config;
  serve_cmd->add_option("--host", host, "Address to bind");
  serve_cmd->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--log", log_path, "Event log; replayed on start");
  serve_cmd->add_option("--corpus", sv_corpus, "Sentences to annotate (JSONL)");
  serve_cmd->add_option("--validators", sv_config.validators, "Validators per generation task")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--lease-seconds", sv_config.lease_seconds, "Task lease duration")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--snapshot-every", sv_config.snapshot_every, "Events between snapshots (0 disables)");

  // synthetic
  auto* synth_cmd = app.add_subcommand("synthetic", "Write a template corpus with rule-determined QA pairs");
  int synth_n = 50;
  std::string synth_out;
  synth_cmd->add_option("-n,--sentences", synth_n, "Sentences")->check(CLI::PositiveNumber);
  synth_cmd->add_option("-o,--out", synth_out, "Corpus JSONL to write")->required();

  // grad-check
  auto* gc_cmd = app.add_subcommand("grad-check", "Finite-difference gradient checks of every trainable head");
  int instances = 20;
  double tolerance = 1e-4;
  std::vector<std::string> heads;
  gc_cmd->add_option("--instances", instances, "Compared instances per head")->check(CLI::PositiveNumber);
  gc_cmd->add_option("--tolerance", tolerance, "Maximum relative error");
  gc_cmd->add_option("--head", heads, "Restrict to these heads")->check(CLI::IsMember(trainable_heads()));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 2;
  }

  try {
    if (train_span_cmd->parsed()) {
      if (!bio && !span) throw ValidationError("train-span needs --bio or --span");
      const Data d = load_training(span_train);
      const auto cfg = span_train.config(ctx.seed);
      const auto mcfg = span_size.span_config(ctx.seed);
      nn::TrainReport report;
      nn::Checkpoint ckpt;
      std::vector<std::vector<AnswerSpan>> pred;
      int covered = 0;
      if (bio) {
        BioModel<float> m(d.vocab, mcfg);
        covered = load_embeddings(m, span_train.embeddings);
        report = train_bio(m, d.train, d.dev, cfg);
        ckpt = m.to_checkpoint();
      } else {
        SpanModel<float> m(d.vocab, mcfg);
        covered = load_embeddings(m, span_train.embeddings);
        report = train_span(m, d.train, d.dev, cfg, train_tau);
        ckpt = m.to_checkpoint();
      }
      nn::save_checkpoint(span_train.out, ckpt);
      std::vector<GoldVerb> gold;
      for (const auto& ex : d.train) gold.push_back(ex.gold);
      const PRF train_prf = evaluate_spans(detect(ckpt, d.train, train_tau), gold, Matcher::exact()).prf();
      Json j{{"command", "train-span"}, {"model", ckpt.kind}, {"checkpoint", span_train.out},
             {"seed", ctx.seed},        {"trainVerbs", d.train.size()}, {"devVerbs", d.dev.size()},
             {"vocabulary", d.vocab.size()}, {"embeddingsCovered", covered}};
      j["report"] = report_json(report);
      j["train"] = to_json(train_prf);
      ctx.emit(j, report_text(ckpt.kind, report, span_train.out) + "train exact " + prf_text(train_prf));
      return 0;
    }

    if (train_qgen_cmd->parsed()) {
      if (!local && !seq) throw ValidationError("train-qgen needs --local or --seq");
      const Data d = load_training(qgen_train);
      auto qcfg = qgen_size.qgen_config(ctx.seed);
      if (!prepositions_file.empty()) qcfg.prepositions = load_prepositions(prepositions_file);
      const Grammar grammar(qcfg.prepositions);
      const auto train = qgen_instances(d.train, grammar);
      const auto dev = qgen_instances(d.dev, grammar);
      std::unique_ptr<QuestionGenerator<float>> m;
      int covered = 0;
      if (local) {
        auto lm = std::make_unique<LocalQuestionModel<float>>(d.vocab, qcfg);
        covered = load_embeddings(*lm, qgen_train.embeddings);
        m = std::move(lm);
      } else {
        auto sm = std::make_unique<SequentialQuestionModel<float>>(d.vocab, qcfg);
        covered = load_embeddings(*sm, qgen_train.embeddings);
        m = std::move(sm);
      }
      const auto report = train_qgen(*m, train, dev, qgen_train.config(ctx.seed));
      nn::save_checkpoint(qgen_train.out, m->to_checkpoint());
      const auto scores = evaluate_questions(*m, train);
      Json j{{"command", "train-qgen"}, {"model", m->kind()}, {"checkpoint", qgen_train.out},
             {"seed", ctx.seed},        {"trainInstances", train.size()}, {"devInstances", dev.size()},
             {"vocabulary", d.vocab.size()}, {"embeddingsCovered", covered}};
      j["report"] = report_json(report);
      j["train"] = to_json(scores);
      ctx.emit(j, report_text(m->kind(), report, qgen_train.out) + "train EM " + fmt(scores.exact_match) + "  PM " +
                      fmt(scores.partial_match) + "  SA " + fmt(scores.slot_accuracy) + "\n");
      return 0;
    }

    if (parse_cmd->parsed()) {
      Corpus corpus;
      if (!parse_text.empty()) {
        const auto tagged = rough_tag(parse_text);
        SentenceRecord r;
        r.sentence_id = "text-0";
        r.tokens = tagged.tokens;
        r.pos_tags = tagged.pos_tags;
        corpus.push_back(r);
      } else {
        corpus = load_corpus(input_path(parse_input, "dev.jsonl", "input corpus"));
      }
      if (!parse_out.empty()) check_output(parse_out, "--out");
      auto parser = Parser::load(input_path(span_model, "", "span model"), input_path(qgen_model, "", "qgen model"));
      std::vector<Json> lines;
      long verbs = 0, rejected = 0;
      std::string text;
      for (const auto& r : corpus) {
        verbs += static_cast<long>(identify_verbs(r.tokens, r.pos_tags).size());
        const auto result = parser.parse(r, parse_tau);
        rejected += static_cast<long>(result.rejected.size());
        for (const auto& t : result.tuples) {
          lines.push_back(prediction_to_json(r.sentence_id, t));
          text += r.sentence_id + "\t" + r.tokens[static_cast<std::size_t>(t.verb_index)] + "\t" +
                  to_json(t.slots).dump() + "\t" + spans_to_json(t.spans).dump() + "\t" + fmt(t.prob) + "\n";
        }
      }
      if (!parse_out.empty()) write_lines(parse_out, lines);
      Json j{{"command", "parse"}, {"tau", parse_tau},        {"sentences", corpus.size()},
             {"verbs", verbs},     {"tuples", lines.size()}, {"rejectedUngrammatical", rejected}};
      if (!parse_out.empty()) {
        j["output"] = parse_out;
      } else if (ctx.json) {
        j["predictions"] = lines;
      }
      if (ctx.json || !parse_out.empty())
        ctx.emit(j, std::to_string(lines.size()) + " tuples for " + std::to_string(verbs) + " verbs, wrote " +
                        parse_out + "\n");
      else
        for (const auto& l : lines) out << l.dump() << '\n';
      if (ctx.verbose) err << text;
      return 0;
    }

    if (eval_cmd->parsed()) {
      if (joint && pred_path.empty()) throw ValidationError("--joint needs --predictions");
      if (pred_path.empty() && eval_model.empty()) throw ValidationError("evaluate needs --predictions or --span-model");
      const Matcher m = matcher(iou, iou_threshold);
      const auto rule = parse_rule(eval_rule);
      const auto data = verb_instances(load_corpus(input_path(gold_path, "dev.jsonl", "gold corpus")), rule);
      std::vector<GoldVerb> gold;
      for (const auto& ex : data) gold.push_back(ex.gold);
      MatchCounts counts;
      long unmatched_predictions = 0;
      if (!eval_model.empty()) {
        counts = evaluate_spans(detect(nn::load_checkpoint(input_path(eval_model, "", "span model")), data, eval_tau),
                                gold, m);
      } else {
        std::map<std::pair<std::string, int>, std::vector<ParseTuple>> by_verb;
        for (auto& p : load_predictions(input_path(pred_path, "", "predictions")))
          by_verb[{p.sentence_id, p.tuple.verb_index}].push_back(std::move(p.tuple));
        std::set<std::pair<std::string, int>> seen;
        for (std::size_t i = 0; i < data.size(); ++i) {
          const auto key = std::make_pair(data[i].sentence_id, data[i].verb_index);
          seen.insert(key);
          const auto it = by_verb.find(key);
          const std::vector<ParseTuple> none;
          const auto& tuples = it == by_verb.end() ? none : it->second;
          if (joint) {
            std::vector<PredictedItem> items;
            for (const auto& t : tuples)
              for (const auto& s : t.spans) items.push_back({t.slots, s});
            counts += joint_counts(items, gold[i], m);
          } else {
            std::set<AnswerSpan> spans;
            for (const auto& t : tuples) spans.insert(t.spans.begin(), t.spans.end());
            counts += span_detection_counts({spans.begin(), spans.end()}, gold[i], m);
          }
        }
        for (const auto& [key, tuples] : by_verb)
          if (!seen.count(key)) unmatched_predictions += static_cast<long>(tuples.size());
      }
      const PRF prf = counts.prf();
      Json j{{"command", "evaluate"}, {"matcher", m.name()}, {"mode", joint ? "joint" : "span"},
             {"rule", rule_name(rule)}, {"verbs", data.size()}};
      j["counts"] = to_json(counts);
      j["prf"] = to_json(prf);
      j["predictionsOutsideGold"] = unmatched_predictions;
      ctx.emit(j, std::string(joint ? "joint " : "span ") + m.name() + " over " + std::to_string(data.size()) +
                      " verbs: " + prf_text(prf));
      return 0;
    }

    if (tune_cmd->parsed()) {
      const Matcher m = matcher(tune_use_iou, tune_iou);
      const auto rule = parse_rule(tune_rule);
      const auto data = verb_instances(load_corpus(input_path(tune_dev, "dev.jsonl", "dev corpus")), rule);
      const auto ckpt = nn::load_checkpoint(input_path(tune_model, "", "span model"));
      if (ckpt.kind != SpanModel<float>::kKind) throw ValidationError("tune-tau needs a span scorer checkpoint");
      auto model = SpanModel<float>::from_checkpoint(ckpt);
      std::vector<std::vector<ScoredSpan>> scored;
      std::vector<GoldVerb> gold;
      for (const auto& ex : data) {
        scored.push_back(model.span_probabilities(ex.tokens, ex.verb_index));
        gold.push_back(ex.gold);
      }
      const auto best = tune_threshold(scored, gold, m, step);
      Json j{{"command", "tune-tau"}, {"matcher", m.name()}, {"step", step},
             {"verbs", data.size()},  {"tau", best.tau},     {"prf", to_json(best.prf)}};
      ctx.emit(j, "tau* = " + fmt(best.tau, 2) + "  " + prf_text(best.prf));
      return 0;
    }

    if (expand_cmd->parsed()) {
      const Corpus corpus = load_corpus(input_path(ex_corpus, "train.jsonl", "corpus"));
      check_output(ex_out, "--out");
      auto parser = Parser::load(input_path(ex_span, "", "span model"), input_path(ex_qgen, "", "qgen model"));
      const auto over = overgenerate(parser, corpus, ex_tau, model_id, ex_fold);
      const auto kept = filter_candidates(over, corpus);
      std::vector<Json> lines;
      for (const auto& c : kept) lines.push_back(to_json(c));
      write_lines(ex_out, lines);
      Json j{{"command", "expand"}, {"tau", ex_tau},          {"model", model_id},     {"sentences", corpus.size()},
             {"overgenerated", over.size()}, {"kept", kept.size()}, {"output", ex_out}};
      ctx.emit(j, std::to_string(over.size()) + " candidates, " + std::to_string(kept.size()) +
                      " after filtering, wrote " + ex_out + "\n");
      return 0;
    }

    if (jk_cmd->parsed()) {
      const Corpus corpus = load_corpus(input_path(jk_corpus, "train.jsonl", "corpus"));
      if (!fs::is_directory(jk_dir)) throw ValidationError("--out-dir is not a directory: " + jk_dir);
      const auto folds = jackknife_folds(corpus, k, ctx.seed);
      Json list = Json::array();
      std::string text;
      for (std::size_t i = 0; i < folds.size(); ++i) {
        const auto train = (fs::path(jk_dir) / ("fold-" + std::to_string(i) + "-train.jsonl")).string();
        const auto held = (fs::path(jk_dir) / ("fold-" + std::to_string(i) + "-heldout.jsonl")).string();
        save_corpus(train, folds[i].train);
        save_corpus(held, folds[i].heldout);
        list.push_back({{"fold", i}, {"train", train}, {"heldout", held},
                        {"trainSentences", folds[i].train.size()}, {"heldoutSentences", folds[i].heldout.size()}});
        text += "fold " + std::to_string(i) + ": " + std::to_string(folds[i].train.size()) + " train, " +
                std::to_string(folds[i].heldout.size()) + " held out\n";
      }
      ctx.emit({{"command", "jackknife"}, {"k", k}, {"seed", ctx.seed}, {"folds", list}}, text);
      return 0;
    }

    if (merge_cmd->parsed()) {
      const Corpus corpus = load_corpus(input_path(mg_corpus, "train.jsonl", "corpus"));
      const auto validated = load_validated(input_path(mg_validated, "", "validated candidates"));
      check_output(mg_out, "--out");
      if (!mg_negatives.empty()) check_output(mg_negatives, "--negatives");
      auto result = merge_validated(corpus, validated);
      long removed = 0;
      if (paraphrase) {
        const auto before = corpus_stats(result.corpus).total.questions;
        result.corpus = paraphrase_filter(result.corpus, corpus);
        removed = static_cast<long>(before - corpus_stats(result.corpus).total.questions);
      }
      save_corpus(mg_out, result.corpus);
      if (!mg_negatives.empty()) {
        std::vector<Json> lines;
        for (const auto& n : result.negatives) lines.push_back(to_json(n));
        write_lines(mg_negatives, lines);
      }
      Json j{{"command", "merge"}, {"candidates", validated.size()}, {"merged", result.merged},
             {"negatives", result.negatives.size()}, {"paraphraseRemoved", removed}, {"output", mg_out}};
      ctx.emit(j, std::to_string(result.merged) + " of " + std::to_string(validated.size()) +
                      " candidates merged, " + std::to_string(removed) + " removed as paraphrases, wrote " + mg_out +
                      "\n");
      return 0;
    }

    if (stats_cmd->parsed()) {
      const auto rule = parse_rule(st_rule);
      const Corpus corpus = load_corpus(input_path(st_corpus, "train.jsonl", "corpus"));
      const auto stats = corpus_stats(corpus, rule);
      const long cents = corpus_payments(corpus);
      Json j{{"command", "stats"}, {"rule", rule_name(rule)}, {"stats", to_json(stats)}, {"paymentCents", cents}};
      std::string text = "domain       sentences  verbs  questions  valid\n";
      const auto row = [&](const std::string& name, const CountStats& c) {
        std::ostringstream s;
        s << std::left << std::setw(12) << name << std::right << std::setw(10) << c.sentences << std::setw(7)
          << c.verbs << std::setw(11) << c.questions << std::setw(7) << c.valid_questions << '\n';
        text += s.str();
      };
      for (const auto& [d, c] : stats.by_domain) row(std::string(to_string(d)), c);
      row("total", stats.total);
      text += "questions/verb " + fmt(stats.questions_per_verb(), 2) + ", valid/verb " +
              fmt(stats.valid_questions_per_verb(), 2) + ", implied payments $" + fmt(cents / 100.0, 2) + "\n";
      ctx.emit(j, text);
      return 0;
    }

    if (serve_cmd->parsed()) {
      Corpus corpus;
      if (!sv_corpus.empty()) corpus = load_corpus(input_path(sv_corpus, "", "corpus"));
      Service service(sv_config, {}, log_path);
      for (const auto& r : corpus) service.add_sentence(r);
      httplib::Server server;
      install_routes(server, service);
      const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
      if (bound < 0) throw ValidationError("cannot bind " + host + ":" + std::to_string(port));
      ctx.emit({{"command", "serve"}, {"host", host}, {"port", bound}, {"tasks", service.task_ids().size()}},
               "listening on http://" + host + ":" + std::to_string(bound) + " with " +
                   std::to_string(service.task_ids().size()) + " tasks\n");
      out.flush();
      if (!server.listen_after_bind()) throw std::runtime_error("server stopped unexpectedly");
      return 0;
    }

    if (synth_cmd->parsed()) {
      check_output(synth_out, "--out");
      const Corpus corpus = synthetic_corpus(synth_n, ctx.seed);
      save_corpus(synth_out, corpus);
      const auto stats = corpus_stats(corpus).total;
      ctx.emit({{"command", "synthetic"}, {"seed", ctx.seed}, {"sentences", stats.sentences}, {"verbs", stats.verbs},
                {"questions", stats.questions}, {"output", synth_out}},
               "wrote " + std::to_string(stats.sentences) + " sentences to " + synth_out + "\n");
      return 0;
    }

    if (gc_cmd->parsed()) {
      const auto results = gradient_check_heads(instances, ctx.seed, tolerance, heads);
      bool ok = true;
      Json list = Json::array();
      std::string text;
      for (const auto& h : results) {
        ok = ok && h.ok(instances);
        list.push_back(to_json(h));
        text += (h.ok(instances) ? "PASS " : "FAIL ") + h.head + ": " + std::to_string(h.passed) + "/" +
                std::to_string(h.checked) + " instances, max relative error " + fmt(h.max_relative_error * 1e6, 2) +
                "e-6 (" + h.worst_parameter + "), " + std::to_string(h.skipped_near_kink) + " skipped near a kink\n";
      }
      ctx.emit({{"command", "grad-check"}, {"tolerance", tolerance}, {"instances", instances}, {"passed", ok},
                {"heads", list}},
               text);
      return ok ? 0 : 1;
    }
  } catch (const CorpusError& e) {
    Json detail{{"line", e.line()}, {"sentenceId", e.sentence_id()}};
    if (ctx.json) out << Json{{"error", "invalid_input"}, {"message", e.what()}, {"detail", detail}}.dump() << '\n';
    err << "qasrl: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    if (ctx.json) out << Json{{"error", "invalid_input"}, {"message", e.what()}}.dump() << '\n';
    err << "qasrl: " << e.what() << '\n';
    return 2;
  } catch (const ServiceError& e) {
    if (ctx.json) out << Json{{"error", e.code()}, {"message", e.what()}, {"detail", e.detail()}}.dump() << '\n';
    err << "qasrl: " << e.what() << '\n';
    return e.status() < 500 ? 2 : 1;
  } catch (const std::exception& e) {
    if (ctx.json) out << Json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    err << "qasrl: internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace qasrl
