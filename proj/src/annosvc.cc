// qasrl/src/annosvc.cc

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

#include "qasrl/annosvc.h"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <set>
#include <sstream>

namespace qasrl {

namespace {

const char* const kKindNames[] = {"generation", "validation"};
const char* const kStateNames[] = {"open", "assigned", "submitted", "complete"};
const char* const kStageNames[] = {"original", "expansion"};

Stage stage_from_string(std::string_view s) {
  if (s == "original") return Stage::original;
  if (s == "expansion") return Stage::expansion;
  throw ValidationError("unknown stage '" + std::string(s) + "'");
}

QASource source_of(Stage s) { return s == Stage::expansion ? QASource::expansion : QASource::generation; }

bool spans_overlap(const std::vector<AnswerSpan>& a, const std::vector<AnswerSpan>& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.overlaps(y)) return true;
  return false;
}

void check_bounds(const std::vector<AnswerSpan>& spans, int n, int question, std::vector<Violation>& out) {
  for (const auto& s : spans)
    if (s.start < 0 || s.end < s.start || s.end >= n) {
      out.push_back({question, "span_out_of_bounds",
                     "span [" + std::to_string(s.start) + ", " + std::to_string(s.end) + "] is outside the sentence"});
      return;
    }
}

// flags both members of every overlapping pair of distinct questions
void check_overlaps(const std::vector<std::vector<AnswerSpan>>& spans, std::vector<Violation>& out) {
  std::set<int> flagged;
  for (std::size_t i = 0; i < spans.size(); ++i)
    for (std::size_t j = i + 1; j < spans.size(); ++j)
      if (spans_overlap(spans[i], spans[j])) {
        flagged.insert(static_cast<int>(i));
        flagged.insert(static_cast<int>(j));
      }
  for (int q : flagged) out.push_back({q, "overlapping_answers", "answer overlaps an answer to another question"});
}

Json task_json(const Task& t) {
  Json j{{"id", t.id},
         {"kind", std::string(to_string(t.kind))},
         {"stage", std::string(to_string(t.stage))},
         {"sentenceId", t.sentence_id},
         {"verbIndex", t.verb_index},
         {"required", t.required}};
  Json leases = Json::array();
  for (const auto& l : t.leases) leases.push_back({{"worker", l.worker_id}, {"expires", l.expires}});
  j["leases"] = std::move(leases);
  if (t.generation) {
    Json pairs = Json::array();
    for (const auto& q : t.generation->second) pairs.push_back(to_json(q));
    j["generation"] = {{"worker", t.generation->first}, {"qaPairs", std::move(pairs)}};
  }
  if (!t.child.empty()) j["child"] = t.child;
  if (t.kind == TaskKind::validation) {
    j["writer"] = t.writer;
    if (!t.parent.empty()) j["parent"] = t.parent;
    Json qs = Json::array();
    for (const auto& q : t.questions) qs.push_back(to_json(q));
    j["questions"] = std::move(qs);
    Json vs = Json::array();
    for (const auto& [worker, answers] : t.validations) {
      Json as = Json::array();
      for (const auto& a : answers) as.push_back(to_json(a));
      vs.push_back({{"worker", worker}, {"judgments", std::move(as)}});
    }
    j["validations"] = std::move(vs);
  }
  return j;
}

Task task_from_json(const Json& j) {
  Task t;
  t.id = j.at("id").get<std::string>();
  t.kind = task_kind_from_string(j.at("kind").get<std::string>());
  t.stage = stage_from_string(j.at("stage").get<std::string>());
  t.sentence_id = j.at("sentenceId").get<std::string>();
  t.verb_index = j.at("verbIndex").get<int>();
  t.required = j.at("required").get<int>();
  for (const auto& l : j.at("leases")) t.leases.push_back({l.at("worker").get<std::string>(), l.at("expires").get<std::int64_t>()});
  if (j.contains("generation")) {
    std::vector<ProposedQA> pairs;
    for (const auto& q : j["generation"].at("qaPairs")) pairs.push_back(proposed_qa_from_json(q));
    t.generation = {j["generation"].at("worker").get<std::string>(), std::move(pairs)};
  }
  t.child = j.value("child", std::string());
  t.writer = j.value("writer", std::string());
  t.parent = j.value("parent", std::string());
  for (const auto& q : j.value("questions", Json::array())) t.questions.push_back(proposed_qa_from_json(q));
  for (const auto& v : j.value("validations", Json::array())) {
    std::vector<ValidationAnswer> answers;
    for (const auto& a : v.at("judgments")) answers.push_back(validation_answer_from_json(a));
    t.validations.emplace_back(v.at("worker").get<std::string>(), std::move(answers));
  }
  return t;
}

WorkerStats worker_from_json(const Json& j) {
  WorkerStats s;
  s.worker_id = j.at("workerId").get<std::string>();
  s.questions_written = j.at("questionsWritten").get<long>();
  s.questions_judged_valid = j.at("questionsJudgedValid").get<long>();
  s.verbs_annotated = j.at("verbsAnnotated").get<long>();
  s.verbs_validated = j.at("verbsValidated").get<long>();
  s.validation_judgments = j.at("validationJudgments").get<long>();
  s.agreement_hits = j.at("agreementHits").get<long>();
  s.disqualified = j.at("disqualified").get<bool>();
  return s;
}

double ratio(long a, long b, double empty) { return b == 0 ? empty : static_cast<double>(a) / static_cast<double>(b); }

}  // namespace

std::string_view to_string(TaskKind k) { return kKindNames[static_cast<int>(k)]; }
std::string_view to_string(TaskState s) { return kStateNames[static_cast<int>(s)]; }
std::string_view to_string(Stage s) { return kStageNames[static_cast<int>(s)]; }

TaskKind task_kind_from_string(std::string_view s) {
  if (s == "generation") return TaskKind::generation;
  if (s == "validation") return TaskKind::validation;
  throw ValidationError("unknown task kind '" + std::string(s) + "'");
}

long generation_payment(int k) {
  if (k < 1) throw ValidationError("a generation task has at least one question");
  // 5 for the first question, then 5, 6, 7, ... for the following ones
  const long n = k;
  return 5 * n + (n - 1) * (n - 2) / 2;
}

long validation_payment(int k) {
  if (k < 0) throw ValidationError("question count must be non-negative");
  return 8 + 2 * std::max(0, k - 4);
}

long expansion_payment(int k) {
  if (k < 0) throw ValidationError("question count must be non-negative");
  return 2L * k;
}

long compute_payment(TaskKind kind, int questions, Stage stage) {
  if (kind == TaskKind::generation) {
    if (stage == Stage::expansion) throw ValidationError("the expansion stage has no generation tasks");
    return generation_payment(questions);
  }
  return stage == Stage::expansion ? expansion_payment(questions) : validation_payment(questions);
}

long corpus_payments(const Corpus& corpus) {
  long total = 0;
  for (const auto& r : corpus)
    for (const auto& v : r.verb_entries) {
      int generated = 0;
      std::map<std::string, int> validated;
      std::map<std::string, std::map<std::string, int>> expanded;  // model -> validator -> count
      for (const auto& qa : v.qa_pairs) {
        if (qa.source == QASource::generation) {
          ++generated;
          for (std::size_t i = 1; i < qa.judgments.size(); ++i) ++validated[qa.judgments[i].worker_id];
        } else if (qa.source == QASource::expansion) {
          for (std::size_t i = 1; i < qa.judgments.size(); ++i)
            ++expanded[qa.judgments[0].worker_id][qa.judgments[i].worker_id];
        }
      }
      if (generated > 0) total += generation_payment(generated);
      for (const auto& [w, k] : validated) total += validation_payment(k);
      for (const auto& [model, by_worker] : expanded)
        for (const auto& [w, k] : by_worker) total += expansion_payment(k);
    }
  return total;
}

double WorkerStats::validity_rate() const { return ratio(questions_judged_valid, questions_written, 1.0); }
double WorkerStats::questions_per_verb() const { return ratio(questions_written, verbs_annotated, 0.0); }
double WorkerStats::agreement_rate() const { return ratio(agreement_hits, validation_judgments, 1.0); }

bool judgment_agrees(const QAPair& qa, std::size_t index) {
  if (index == 0 || index >= qa.judgments.size()) throw ValidationError("not a validator judgment");
  const auto& mine = qa.judgments[index];
  long others = 0, support = 0;
  for (std::size_t i = 0; i < qa.judgments.size(); ++i) {
    if (i == index) continue;
    const auto& j = qa.judgments[i];
    ++others;
    if (!mine.is_valid) {
      support += j.is_valid ? 0 : 1;
    }
  }
  if (!mine.is_valid) return 2 * support >= others;
  for (const auto& s : mine.spans) {
    long overlapping = 0;
    for (std::size_t i = 0; i < qa.judgments.size(); ++i) {
      if (i == index || !qa.judgments[i].is_valid) continue;
      const auto& spans = qa.judgments[i].spans;
      if (std::any_of(spans.begin(), spans.end(), [&](const AnswerSpan& x) { return x.overlaps(s); })) ++overlapping;
    }
    if (2 * overlapping >= others) return true;
  }
  return false;
}

std::map<std::string, WorkerStats> update_quality(std::map<std::string, WorkerStats> stats,
                                                  const std::vector<CompletionEvent>& events,
                                                  const QualityConfig& config) {
  const auto entry = [&](const std::string& id) -> WorkerStats& {
    auto& s = stats[id];
    s.worker_id = id;
    return s;
  };
  for (const auto& e : events) {
    if (e.pairs.empty()) continue;
    std::set<std::string> touched;
    if (e.stage == Stage::original) {
      auto& g = entry(e.pairs.front().judgments.front().worker_id);
      ++g.verbs_annotated;
      for (const auto& qa : e.pairs) {
        ++g.questions_written;
        g.questions_judged_valid += qa_is_valid(qa) ? 1 : 0;
      }
      touched.insert(g.worker_id);
    }
    std::set<std::string> validators;
    for (const auto& qa : e.pairs)
      for (std::size_t i = 1; i < qa.judgments.size(); ++i) {
        auto& v = entry(qa.judgments[i].worker_id);
        ++v.validation_judgments;
        v.agreement_hits += judgment_agrees(qa, i) ? 1 : 0;
        validators.insert(v.worker_id);
      }
    for (const auto& id : validators) ++stats[id].verbs_validated;
    touched.insert(validators.begin(), validators.end());

    for (const auto& id : touched) {
      auto& s = stats[id];
      if (s.verbs_annotated >= config.min_verbs &&
          (s.validity_rate() < config.min_validity || s.questions_per_verb() < config.min_questions_per_verb))
        s.disqualified = true;
      if (s.verbs_validated >= config.min_verbs && s.agreement_rate() < config.min_agreement) s.disqualified = true;
    }
  }
  return stats;
}

Service::Service(ServiceConfig config, Clock clock, std::filesystem::path log)
    : config_(std::move(config)), clock_(std::move(clock)), grammar_(config_.prepositions), log_path_(std::move(log)) {
  if (config_.validators < 1 || config_.expansion_validators < 1) throw ValidationError("validator count must be positive");
  if (config_.lease_seconds <= 0) throw ValidationError("lease duration must be positive");
  if (!clock_)
    clock_ = [] {
      return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
  if (log_path_.empty()) return;

  long skip = 0;
  const auto snapshot = std::filesystem::path(log_path_.string() + ".snapshot");
  if (std::filesystem::exists(snapshot)) {
    std::ifstream in(snapshot);
    const Json j = Json::parse(in);
    load_state(j.at("state"));
    skip = j.at("events").get<long>();
    events_ = skip;
  }
  if (std::filesystem::exists(log_path_)) {
    std::ifstream in(log_path_, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::size_t pos = 0;
    long index = 0;
    while (pos < text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
      Json event;
      try {
        event = Json::parse(line);
      } catch (const Json::parse_error&) {
        if (nl == std::string::npos) {
          // a write cut short by a crash; drop it
          in.close();
          std::filesystem::resize_file(log_path_, pos);
          break;
        }
        throw ServiceError("corrupt_log", "event log line " + std::to_string(index + 1) + " is not JSON", 500);
      }
      if (index++ >= skip) apply(event);
      if (nl == std::string::npos) {
        // complete event without its newline
        in.close();
        std::ofstream(log_path_, std::ios::app) << '\n';
        break;
      }
      pos = nl + 1;
    }
  }
  log_.open(log_path_, std::ios::app);
  if (!log_) throw ValidationError("cannot open event log " + log_path_.string());
}

std::int64_t Service::now() const { return clock_(); }

const Task& Service::find(const std::string& id) const {
  const auto it = tasks_.find(id);
  if (it == tasks_.end()) throw ServiceError("not_found", "no task '" + id + "'", 404);
  return it->second;
}

Task& Service::find(const std::string& id) {
  return const_cast<Task&>(static_cast<const Service*>(this)->find(id));
}

const Lease* Service::active_lease(const Task& t, const std::string& worker, std::int64_t at) const {
  for (const auto& l : t.leases)
    if (l.worker_id == worker && l.expires > at) return &l;
  return nullptr;
}

int Service::free_slots(const Task& t, std::int64_t at) const {
  int used = 0;
  if (t.kind == TaskKind::generation) {
    used = t.generation ? 1 : 0;
  } else {
    used = static_cast<int>(t.validations.size());
  }
  for (const auto& l : t.leases) {
    if (l.expires <= at) continue;
    const bool submitted =
        t.kind == TaskKind::generation
            ? t.generation && t.generation->first == l.worker_id
            : std::any_of(t.validations.begin(), t.validations.end(), [&](const auto& v) { return v.first == l.worker_id; });
    if (!submitted) ++used;
  }
  return t.required - used;
}

TaskState Service::state_at(const Task& t, std::int64_t at) const {
  if (t.kind == TaskKind::generation) {
    if (t.generation) {
      const auto child = tasks_.find(t.child);
      return child != tasks_.end() && state_at(child->second, at) == TaskState::complete ? TaskState::complete
                                                                                         : TaskState::submitted;
    }
    return free_slots(t, at) > 0 ? TaskState::open : TaskState::assigned;
  }
  if (static_cast<int>(t.validations.size()) >= t.required) return TaskState::complete;
  return free_slots(t, at) > 0 ? TaskState::open : TaskState::assigned;
}

std::vector<Violation> Service::check_questions(const SentenceRecord& r, const std::vector<ProposedQA>& pairs) const {
  std::vector<Violation> out;
  if (pairs.empty()) out.push_back({-1, "no_questions", "at least one question is required"});
  const int n = static_cast<int>(r.tokens.size());
  std::set<QuestionSlots> seen;
  std::vector<std::vector<AnswerSpan>> spans;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const int q = static_cast<int>(i);
    bool ok = false;
    try {
      ok = grammar_.accepts(pairs[i].slots);
    } catch (const ValidationError&) {
    }
    if (!ok) out.push_back({q, "ungrammatical", "question is not accepted by the grammar"});
    if (!seen.insert(pairs[i].slots).second) out.push_back({q, "duplicate_question", "question repeats an earlier one"});
    if (pairs[i].spans.empty()) out.push_back({q, "no_spans", "question has no answer span"});
    check_bounds(pairs[i].spans, n, q, out);
    spans.push_back(pairs[i].spans);
  }
  check_overlaps(spans, out);
  return out;
}

std::vector<Violation> Service::check_generation(const Task& t, const std::vector<ProposedQA>& pairs) const {
  return check_questions(sentences_.at(t.sentence_id), pairs);
}

std::vector<Violation> Service::check_validation(const Task& t, const std::string& worker,
                                                const std::vector<ValidationAnswer>& answers) const {
  std::vector<Violation> out;
  if (answers.size() != t.questions.size()) {
    out.push_back({-1, "missing_judgments",
                   "expected " + std::to_string(t.questions.size()) + " judgments, got " + std::to_string(answers.size())});
    return out;
  }
  const int n = static_cast<int>(sentences_.at(t.sentence_id).tokens.size());
  std::vector<std::vector<AnswerSpan>> spans;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const int q = static_cast<int>(i);
    if (answers[i].is_valid && answers[i].spans.empty())
      out.push_back({q, "no_spans", "a valid judgment needs at least one answer span"});
    if (!answers[i].is_valid && !answers[i].spans.empty())
      out.push_back({q, "spans_on_invalid", "an invalid judgment has no answer spans"});
    check_bounds(answers[i].spans, n, q, out);
    spans.push_back(answers[i].spans);
  }
  check_overlaps(spans, out);

  // answers this worker already gave for the verb in the same stage
  std::vector<AnswerSpan> stored;
  const VerbEntry* entry = sentences_.at(t.sentence_id).find_verb(t.verb_index);
  for (const auto& qa : entry->qa_pairs) {
    if (qa.source != source_of(t.stage)) continue;
    for (std::size_t k = qa.source == QASource::generation ? 0 : 1; k < qa.judgments.size(); ++k)
      if (qa.judgments[k].worker_id == worker) stored.insert(stored.end(), qa.judgments[k].spans.begin(), qa.judgments[k].spans.end());
  }
  for (std::size_t i = 0; i < answers.size(); ++i)
    if (spans_overlap(answers[i].spans, stored))
      out.push_back({static_cast<int>(i), "overlapping_answers", "answer overlaps one of this worker's stored answers"});
  return out;
}

QAPair Service::to_pair(const ProposedQA& q, const std::string& writer, Stage stage) const {
  QAPair qa;
  qa.slots = q.slots;
  qa.source = source_of(stage);
  qa.judgments.push_back({writer, true, q.spans});
  return qa;
}

void Service::add_sentence(const SentenceRecord& record) {
  std::unique_lock lock(mu_);
  if (sentences_.count(record.sentence_id)) return;
  validate_record(record);
  commit({{"type", "sentence"}, {"time", now()}, {"record", to_json(record)}});
}

std::string Service::add_expansion_task(const std::string& sentence_id, int verb_index, const std::string& writer,
                                        const std::vector<ProposedQA>& questions) {
  std::unique_lock lock(mu_);
  const auto it = sentences_.find(sentence_id);
  if (it == sentences_.end()) throw ServiceError("not_found", "no sentence '" + sentence_id + "'", 404);
  if (!it->second.find_verb(verb_index))
    throw ServiceError("not_found", "sentence '" + sentence_id + "' has no verb " + std::to_string(verb_index), 404);
  if (writer.empty()) throw ServiceError("invalid_request", "expansion tasks need a writer id", 400);
  std::vector<Violation> violations;
  // machine questions may overlap each other
  for (const auto& v : check_questions(it->second, questions))
    if (v.code != "overlapping_answers") violations.push_back(v);
  if (!violations.empty()) {
    Json detail = Json::array();
    for (const auto& v : violations) detail.push_back(to_json(v));
    throw ServiceError("rejected", "expansion questions rejected", 422, {{"violations", detail}});
  }
  Json qs = Json::array();
  for (const auto& q : questions) qs.push_back(to_json(q));
  commit({{"type", "expansion"},
          {"time", now()},
          {"sentenceId", sentence_id},
          {"verbIndex", verb_index},
          {"writer", writer},
          {"questions", qs}});
  return task_order_.back();
}

Task Service::next_task(const std::string& worker, TaskKind kind) {
  std::unique_lock lock(mu_);
  if (worker.empty()) throw ServiceError("invalid_request", "worker id is required", 400);
  const auto w = workers_.find(worker);
  if (w != workers_.end() && w->second.disqualified)
    throw ServiceError("worker_disqualified", "worker '" + worker + "' is disqualified", 403);
  const auto at = now();
  const auto submitted = [&](const Task& t) {
    if (t.kind == TaskKind::generation) return t.generation.has_value();
    return std::any_of(t.validations.begin(), t.validations.end(), [&](const auto& v) { return v.first == worker; });
  };
  for (const auto& id : task_order_) {
    const Task& t = tasks_.at(id);
    if (t.kind == kind && !submitted(t) && active_lease(t, worker, at)) return t;
  }
  for (const auto& id : task_order_) {
    const Task& t = tasks_.at(id);
    if (t.kind != kind || submitted(t) || state_at(t, at) == TaskState::complete) continue;
    if (kind == TaskKind::validation && t.writer == worker) continue;
    if (free_slots(t, at) <= 0) continue;
    commit({{"type", "lease"}, {"time", at}, {"task", id}, {"worker", worker}});
    return tasks_.at(id);
  }
  throw ServiceError("no_task", "no " + std::string(to_string(kind)) + " task is available", 404);
}

SubmitResult Service::submit_generation(const std::string& task_id, const std::string& worker,
                                        const std::vector<ProposedQA>& pairs) {
  std::unique_lock lock(mu_);
  const Task& t = find(task_id);
  if (t.kind != TaskKind::generation) throw ServiceError("wrong_kind", "task '" + task_id + "' is not a generation task", 400);
  const auto at = now();
  if (t.generation) {
    if (t.generation->first != worker)
      throw ServiceError("already_submitted", "task '" + task_id + "' was submitted by another worker", 409);
    SubmitResult same;
    same.validation_task = t.child;
    if (t.generation->second == pairs) {
      same.accepted = same.duplicate = true;
      return same;
    }
    const Task& child = find(t.child);
    if (!child.validations.empty())
      throw ServiceError("task_complete", "questions of task '" + task_id + "' are already being validated", 409);
  } else if (!active_lease(t, worker, at)) {
    const bool had = std::any_of(t.leases.begin(), t.leases.end(), [&](const Lease& l) { return l.worker_id == worker; });
    if (had) throw ServiceError("lease_expired", "the lease on task '" + task_id + "' has expired", 409);
    throw ServiceError("not_assigned", "task '" + task_id + "' is not leased to '" + worker + "'", 403);
  }
  SubmitResult r;
  r.violations = check_generation(t, pairs);
  if (!r.violations.empty()) return r;
  Json ps = Json::array();
  for (const auto& q : pairs) ps.push_back(to_json(q));
  commit({{"type", "generation"}, {"time", at}, {"task", task_id}, {"worker", worker}, {"qaPairs", ps}});
  r.accepted = true;
  r.validation_task = tasks_.at(task_id).child;
  return r;
}

SubmitResult Service::submit_validation(const std::string& task_id, const std::string& worker,
                                        const std::vector<ValidationAnswer>& judgments) {
  std::unique_lock lock(mu_);
  const Task& t = find(task_id);
  if (t.kind != TaskKind::validation) throw ServiceError("wrong_kind", "task '" + task_id + "' is not a validation task", 400);
  const auto at = now();
  const auto mine = std::find_if(t.validations.begin(), t.validations.end(), [&](const auto& v) { return v.first == worker; });
  if (state_at(t, at) == TaskState::complete) {
    if (mine != t.validations.end() && mine->second == judgments) {
      SubmitResult same;
      same.accepted = same.duplicate = same.completed = true;
      return same;
    }
    throw ServiceError("task_complete", "task '" + task_id + "' is complete", 409);
  }
  if (mine != t.validations.end() && mine->second == judgments) {
    SubmitResult same;
    same.accepted = same.duplicate = true;
    return same;
  }
  if (worker == t.writer) throw ServiceError("own_questions", "workers cannot validate their own questions", 403);
  if (mine == t.validations.end() && !active_lease(t, worker, at)) {
    const bool had = std::any_of(t.leases.begin(), t.leases.end(), [&](const Lease& l) { return l.worker_id == worker; });
    if (had) throw ServiceError("lease_expired", "the lease on task '" + task_id + "' has expired", 409);
    throw ServiceError("not_assigned", "task '" + task_id + "' is not leased to '" + worker + "'", 403);
  }
  SubmitResult r;
  r.violations = check_validation(t, worker, judgments);
  if (!r.violations.empty()) return r;
  Json js = Json::array();
  for (const auto& a : judgments) js.push_back(to_json(a));
  commit({{"type", "validation"}, {"time", at}, {"task", task_id}, {"worker", worker}, {"judgments", js}});
  r.accepted = true;
  r.completed = state_at(tasks_.at(task_id), at) == TaskState::complete;
  return r;
}

void Service::commit(Json event) {
  if (log_.is_open()) {
    log_ << event.dump() << '\n';
    log_.flush();
    if (!log_) throw ServiceError("log_write_failed", "cannot append to the event log", 500);
  }
  apply(event);
  if (log_.is_open() && config_.snapshot_every > 0 && events_ % config_.snapshot_every == 0) write_snapshot();
}

void Service::apply(const Json& e) {
  const auto type = e.at("type").get<std::string>();
  if (type == "sentence") {
    apply_sentence(sentence_record_from_json(e.at("record")));
  } else if (type == "expansion") {
    std::vector<ProposedQA> qs;
    for (const auto& q : e.at("questions")) qs.push_back(proposed_qa_from_json(q));
    apply_expansion(e.at("sentenceId").get<std::string>(), e.at("verbIndex").get<int>(), e.at("writer").get<std::string>(), qs);
  } else if (type == "lease") {
    apply_lease(e.at("task").get<std::string>(), e.at("worker").get<std::string>(), e.at("time").get<std::int64_t>());
  } else if (type == "generation") {
    std::vector<ProposedQA> qs;
    for (const auto& q : e.at("qaPairs")) qs.push_back(proposed_qa_from_json(q));
    apply_generation(e.at("task").get<std::string>(), e.at("worker").get<std::string>(), qs);
  } else if (type == "validation") {
    std::vector<ValidationAnswer> as;
    for (const auto& a : e.at("judgments")) as.push_back(validation_answer_from_json(a));
    apply_validation(e.at("task").get<std::string>(), e.at("worker").get<std::string>(), as);
  } else {
    throw ServiceError("corrupt_log", "unknown event type '" + type + "'", 500);
  }
  ++events_;
}

void Service::apply_sentence(const SentenceRecord& record) {
  if (sentences_.count(record.sentence_id)) return;
  sentence_order_.push_back(record.sentence_id);
  sentences_.emplace(record.sentence_id, record);
  for (const auto& v : record.verb_entries) {
    if (!v.qa_pairs.empty()) continue;
    Task t;
    t.id = "gen-" + std::to_string(++next_id_);
    t.kind = TaskKind::generation;
    t.sentence_id = record.sentence_id;
    t.verb_index = v.verb_index;
    t.required = 1;
    task_order_.push_back(t.id);
    tasks_.emplace(t.id, std::move(t));
  }
}

void Service::apply_expansion(const std::string& sentence_id, int verb, const std::string& writer,
                              const std::vector<ProposedQA>& questions) {
  Task t;
  t.id = "val-" + std::to_string(++next_id_);
  t.kind = TaskKind::validation;
  t.stage = Stage::expansion;
  t.sentence_id = sentence_id;
  t.verb_index = verb;
  t.required = config_.expansion_validators;
  t.writer = writer;
  t.questions = questions;
  task_order_.push_back(t.id);
  tasks_.emplace(t.id, std::move(t));
}

void Service::apply_lease(const std::string& task, const std::string& worker, std::int64_t time) {
  Task& t = find(task);
  std::erase_if(t.leases, [&](const Lease& l) { return l.expires <= time || l.worker_id == worker; });
  t.leases.push_back({worker, time + config_.lease_seconds});
}

void Service::apply_generation(const std::string& task, const std::string& worker, const std::vector<ProposedQA>& pairs) {
  Task& t = find(task);
  t.generation = {worker, pairs};
  std::erase_if(t.leases, [&](const Lease& l) { return l.worker_id == worker; });
  if (!t.child.empty()) {
    find(t.child).questions = pairs;
    return;
  }
  Task v;
  v.id = "val-" + std::to_string(++next_id_);
  v.kind = TaskKind::validation;
  v.stage = t.stage;
  v.sentence_id = t.sentence_id;
  v.verb_index = t.verb_index;
  v.required = config_.validators;
  v.writer = worker;
  v.parent = t.id;
  v.questions = pairs;
  t.child = v.id;
  task_order_.push_back(v.id);
  tasks_.emplace(v.id, std::move(v));
}

void Service::apply_validation(const std::string& task, const std::string& worker,
                               const std::vector<ValidationAnswer>& judgments) {
  Task& t = find(task);
  std::erase_if(t.leases, [&](const Lease& l) { return l.worker_id == worker; });
  const auto mine = std::find_if(t.validations.begin(), t.validations.end(), [&](const auto& v) { return v.first == worker; });
  if (mine != t.validations.end())
    mine->second = judgments;
  else
    t.validations.emplace_back(worker, judgments);
  if (static_cast<int>(t.validations.size()) == t.required) complete_validation(t);
}

void Service::complete_validation(Task& t) {
  CompletionEvent event;
  event.stage = t.stage;
  for (std::size_t i = 0; i < t.questions.size(); ++i) {
    QAPair qa = to_pair(t.questions[i], t.writer, t.stage);
    for (const auto& [worker, answers] : t.validations)
      qa.judgments.push_back({worker, answers[i].is_valid, answers[i].spans});
    event.pairs.push_back(std::move(qa));
  }
  SentenceRecord updated = sentences_.at(t.sentence_id);
  VerbEntry* entry = updated.find_verb(t.verb_index);
  entry->qa_pairs.insert(entry->qa_pairs.end(), event.pairs.begin(), event.pairs.end());
  validate_record(updated);
  sentences_[t.sentence_id] = std::move(updated);
  t.leases.clear();
  workers_ = update_quality(std::move(workers_), {event}, config_.quality);
}

Task Service::task(const std::string& id) const {
  std::shared_lock lock(mu_);
  return find(id);
}

TaskState Service::state(const std::string& id) const {
  std::shared_lock lock(mu_);
  return state_at(find(id), now());
}

std::vector<std::string> Service::task_ids() const {
  std::shared_lock lock(mu_);
  return task_order_;
}

SentenceRecord Service::sentence(const std::string& id) const {
  std::shared_lock lock(mu_);
  const auto it = sentences_.find(id);
  if (it == sentences_.end()) throw ServiceError("not_found", "no sentence '" + id + "'", 404);
  return it->second;
}

Corpus Service::export_corpus() const {
  std::shared_lock lock(mu_);
  Corpus out;
  for (const auto& id : sentence_order_) out.push_back(sentences_.at(id));
  return out;
}

std::map<std::string, WorkerStats> Service::worker_stats() const {
  std::shared_lock lock(mu_);
  return workers_;
}

std::vector<Payment> Service::payments() const {
  std::shared_lock lock(mu_);
  const auto at = now();
  std::vector<Payment> out;
  for (const auto& id : task_order_) {
    const Task& t = tasks_.at(id);
    if (t.kind == TaskKind::generation) {
      if (!t.generation) continue;
      const int k = static_cast<int>(t.generation->second.size());
      out.push_back({id, t.generation->first, t.kind, t.stage, k, compute_payment(t.kind, k, t.stage)});
    } else if (state_at(t, at) == TaskState::complete) {
      const int k = static_cast<int>(t.questions.size());
      for (const auto& v : t.validations) out.push_back({id, v.first, t.kind, t.stage, k, compute_payment(t.kind, k, t.stage)});
    }
  }
  return out;
}

long Service::total_payments() const {
  long total = 0;
  for (const auto& p : payments()) total += p.cents;
  return total;
}

Json Service::stats_json() const {
  const auto pays = payments();
  const auto corpus = export_corpus();
  std::shared_lock lock(mu_);
  const auto at = now();
  Json tasks = {{"generation", Json::object()}, {"validation", Json::object()}};
  for (auto& [kind, counts] : tasks.items())
    for (const char* s : kStateNames) counts[s] = 0;
  for (const auto& id : task_order_) {
    const Task& t = tasks_.at(id);
    auto& slot = tasks[std::string(to_string(t.kind))][std::string(to_string(state_at(t, at)))];
    slot = slot.get<long>() + 1;
  }
  Json workers = Json::array();
  for (const auto& [id, s] : workers_) workers.push_back(to_json(s));
  long total = 0;
  Json by_kind = {{"generation", 0}, {"validation", 0}, {"expansion", 0}};
  for (const auto& p : pays) {
    total += p.cents;
    const std::string key = p.kind == TaskKind::generation ? "generation" : p.stage == Stage::expansion ? "expansion" : "validation";
    by_kind[key] = by_kind[key].get<long>() + p.cents;
  }
  return {{"tasks", tasks},
          {"workers", workers},
          {"payments", {{"totalCents", total}, {"byKind", by_kind}, {"count", pays.size()}}},
          {"corpus", to_json(corpus_stats(corpus))},
          {"events", events_}};
}

Json Service::state_json() const {
  std::shared_lock lock(mu_);
  return state_json_at(now());
}

long Service::events() const {
  std::shared_lock lock(mu_);
  return events_;
}

Json Service::state_json_at(std::int64_t at) const {
  Json sentences = Json::array();
  for (const auto& id : sentence_order_) sentences.push_back(to_json(sentences_.at(id)));
  Json tasks = Json::array();
  for (const auto& id : task_order_) {
    Json j = task_json(tasks_.at(id));
    j["state"] = std::string(to_string(state_at(tasks_.at(id), at)));
    tasks.push_back(std::move(j));
  }
  Json workers = Json::array();
  for (const auto& [id, s] : workers_) workers.push_back(to_json(s));
  return {{"nextId", next_id_}, {"sentences", sentences}, {"tasks", tasks}, {"workers", workers}};
}

void Service::load_state(const Json& state) {
  next_id_ = state.at("nextId").get<long>();
  for (const auto& r : state.at("sentences")) {
    auto record = sentence_record_from_json(r);
    sentence_order_.push_back(record.sentence_id);
    sentences_.emplace(record.sentence_id, std::move(record));
  }
  for (const auto& j : state.at("tasks")) {
    Task t = task_from_json(j);
    task_order_.push_back(t.id);
    tasks_.emplace(t.id, std::move(t));
  }
  for (const auto& w : state.at("workers")) {
    auto s = worker_from_json(w);
    workers_.emplace(s.worker_id, std::move(s));
  }
}

void Service::write_snapshot() const {
  const auto path = std::filesystem::path(log_path_.string() + ".snapshot");
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    out << Json{{"events", events_}, {"state", state_json_at(now())}}.dump() << '\n';
    if (!out) throw ServiceError("log_write_failed", "cannot write snapshot", 500);
  }
  std::filesystem::rename(tmp, path);
}

Json to_json(const WorkerStats& s) {
  return {{"workerId", s.worker_id},
          {"questionsWritten", s.questions_written},
          {"questionsJudgedValid", s.questions_judged_valid},
          {"verbsAnnotated", s.verbs_annotated},
          {"verbsValidated", s.verbs_validated},
          {"validationJudgments", s.validation_judgments},
          {"agreementHits", s.agreement_hits},
          {"disqualified", s.disqualified}};
}

Json to_json(const ProposedQA& q) { return {{"slots", to_json(q.slots)}, {"spans", spans_to_json(q.spans)}}; }

ProposedQA proposed_qa_from_json(const Json& j) {
  try {
    return {question_slots_from_json(j.at("slots")), spans_from_json(j.at("spans"))};
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed QA pair: ") + e.what());
  }
}

Json to_json(const ValidationAnswer& a) { return {{"isValid", a.is_valid}, {"spans", spans_to_json(a.spans)}}; }

ValidationAnswer validation_answer_from_json(const Json& j) {
  try {
    return {j.at("isValid").get<bool>(), spans_from_json(j.value("spans", Json::array()))};
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed judgment: ") + e.what());
  }
}

Json to_json(const Violation& v) {
  Json j{{"code", v.code}, {"message", v.message}};
  if (v.question >= 0) j["question"] = v.question;
  return j;
}

Json to_json(const SubmitResult& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations) violations.push_back(to_json(v));
  Json j{{"accepted", r.accepted}, {"duplicate", r.duplicate}, {"violations", violations}};
  if (!r.validation_task.empty()) j["validationTaskId"] = r.validation_task;
  j["completed"] = r.completed;
  return j;
}

}  // namespace qasrl
