// qasrl/annosvc.h

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

#ifndef QASRL_ANNOSVC_H_
#define QASRL_ANNOSVC_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qasrl/corpus.h"
#include "qasrl/grammar.h"

namespace qasrl {

enum class TaskKind : std::uint8_t { generation, validation };
enum class TaskState : std::uint8_t { open, assigned, submitted, complete };
enum class Stage : std::uint8_t { original, expansion };

std::string_view to_string(TaskKind k);
std::string_view to_string(TaskState s);
std::string_view to_string(Stage s);
TaskKind task_kind_from_string(std::string_view s);

/// Cents for a generation task with k >= 1 questions.
long generation_payment(int questions);
/// Cents for one validator's pass over k >= 0 questions of a verb.
long validation_payment(int questions);
/// Cents for one validator's pass over k >= 0 expansion questions.
long expansion_payment(int questions);
/// Throws ValidationError on negative counts, k = 0 generation, or a
/// generation task in the expansion stage.
long compute_payment(TaskKind kind, int questions, Stage stage);

/// Payments implied by a finished corpus: per verb, one generation task for
/// the generation-stage questions plus one validation pass per validator, and
/// one expansion pass per validator of each proposing model's questions.
long corpus_payments(const Corpus& corpus);

/// A service failure with a stable code and an HTTP status.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(std::string code, const std::string& message, int status, Json detail = Json::object())
      : std::runtime_error(message), code_(std::move(code)), status_(status), detail_(std::move(detail)) {}
  const std::string& code() const { return code_; }
  int status() const { return status_; }
  const Json& detail() const { return detail_; }

 private:
  std::string code_;
  int status_;
  Json detail_;
};

struct Lease {
  std::string worker_id;
  std::int64_t expires = 0;
  bool operator==(const Lease&) const = default;
};

struct ProposedQA {
  QuestionSlots slots;
  std::vector<AnswerSpan> spans;
  bool operator==(const ProposedQA&) const = default;
};

struct ValidationAnswer {
  bool is_valid = false;
  std::vector<AnswerSpan> spans;
  bool operator==(const ValidationAnswer&) const = default;
};

struct Task {
  std::string id;
  TaskKind kind = TaskKind::generation;
  Stage stage = Stage::original;
  std::string sentence_id;
  int verb_index = 0;
  int required = 1;
  std::vector<Lease> leases;

  // generation
  std::optional<std::pair<std::string, std::vector<ProposedQA>>> generation;
  std::string child;  // validation task spawned on acceptance

  // validation
  std::string writer;
  std::string parent;
  std::vector<ProposedQA> questions;
  std::vector<std::pair<std::string, std::vector<ValidationAnswer>>> validations;  // first-submission order
};

struct Violation {
  int question = -1;  // -1 for the submission as a whole
  std::string code;
  std::string message;
};

struct SubmitResult {
  bool accepted = false;
  bool duplicate = false;
  std::vector<Violation> violations;
  std::string validation_task;  // generation: the spawned validation task
  bool completed = false;       // validation: this submission completed the task
};

struct WorkerStats {
  std::string worker_id;
  long questions_written = 0;
  long questions_judged_valid = 0;
  long verbs_annotated = 0;
  long verbs_validated = 0;
  long validation_judgments = 0;
  long agreement_hits = 0;
  bool disqualified = false;

  double validity_rate() const;
  double questions_per_verb() const;
  double agreement_rate() const;
  bool operator==(const WorkerStats&) const = default;
};

struct QualityConfig {
  long min_verbs = 10;
  double min_validity = 0.85;
  double min_questions_per_verb = 2.0;
  double min_agreement = 0.85;
};

/// A finished validation task: pairs carry the writer judgment first, then
/// one judgment per validator.
struct CompletionEvent {
  Stage stage = Stage::original;
  std::vector<QAPair> pairs;
};

/// Whether judgments[index] (a validator, index >= 1) agrees with a majority
/// of the other workers on this question, the writer included.
bool judgment_agrees(const QAPair& qa, std::size_t index);

std::map<std::string, WorkerStats> update_quality(std::map<std::string, WorkerStats> stats,
                                                  const std::vector<CompletionEvent>& events,
                                                  const QualityConfig& config = {});

struct ServiceConfig {
  int validators = 2;
  int expansion_validators = 3;
  std::int64_t lease_seconds = 30 * 60;
  QualityConfig quality;
  std::vector<std::string> prepositions = default_prepositions();
  /// Write a snapshot next to the log every this many events; 0 disables.
  long snapshot_every = 1000;
};

struct Payment {
  std::string task_id;
  std::string worker_id;
  TaskKind kind = TaskKind::generation;
  Stage stage = Stage::original;
  int questions = 0;
  long cents = 0;
};

/// Task state machine, validity aggregation, quality control and payments.
/// Every accepted mutation is appended to a JSONL event log before it is
/// applied; constructing a service on an existing log replays it.
class Service {
 public:
  using Clock = std::function<std::int64_t()>;

  explicit Service(ServiceConfig config = {}, Clock clock = {}, std::filesystem::path log = {});

  /// Stores the sentence and opens a generation task for each verb entry
  /// without QA pairs. A second add with the same id is ignored.
  void add_sentence(const SentenceRecord& record);
  /// A validation task over machine-proposed questions.
  std::string add_expansion_task(const std::string& sentence_id, int verb_index, const std::string& writer,
                                 const std::vector<ProposedQA>& questions);

  Task next_task(const std::string& worker, TaskKind kind);
  SubmitResult submit_generation(const std::string& task_id, const std::string& worker,
                                 const std::vector<ProposedQA>& pairs);
  SubmitResult submit_validation(const std::string& task_id, const std::string& worker,
                                 const std::vector<ValidationAnswer>& judgments);

  Task task(const std::string& id) const;
  TaskState state(const std::string& id) const;
  std::vector<std::string> task_ids() const;
  SentenceRecord sentence(const std::string& id) const;
  Corpus export_corpus() const;
  std::map<std::string, WorkerStats> worker_stats() const;
  std::vector<Payment> payments() const;
  long total_payments() const;
  Json stats_json() const;
  /// Full state as of now; equal states serialize identically.
  Json state_json() const;
  long events() const;
  const Grammar& grammar() const { return grammar_; }
  const ServiceConfig& config() const { return config_; }

 private:
  std::int64_t now() const;
  TaskState state_at(const Task& t, std::int64_t now) const;
  const Task& find(const std::string& id) const;
  Task& find(const std::string& id);
  const Lease* active_lease(const Task& t, const std::string& worker, std::int64_t now) const;
  int free_slots(const Task& t, std::int64_t now) const;
  std::vector<Violation> check_generation(const Task& t, const std::vector<ProposedQA>& pairs) const;
  std::vector<Violation> check_validation(const Task& t, const std::string& worker,
                                          const std::vector<ValidationAnswer>& judgments) const;
  std::vector<Violation> check_questions(const SentenceRecord& r, const std::vector<ProposedQA>& pairs) const;
  QAPair to_pair(const ProposedQA& q, const std::string& writer, Stage stage) const;

  void commit(Json event);
  void apply(const Json& event);
  void apply_sentence(const SentenceRecord& record);
  void apply_expansion(const std::string& sentence_id, int verb, const std::string& writer,
                       const std::vector<ProposedQA>& questions);
  void apply_lease(const std::string& task, const std::string& worker, std::int64_t time);
  void apply_generation(const std::string& task, const std::string& worker, const std::vector<ProposedQA>& pairs);
  void apply_validation(const std::string& task, const std::string& worker,
                        const std::vector<ValidationAnswer>& judgments);
  void complete_validation(Task& t);
  Json state_json_at(std::int64_t now) const;
  void load_state(const Json& state);
  void write_snapshot() const;

  ServiceConfig config_;
  Clock clock_;
  Grammar grammar_;
  std::filesystem::path log_path_;
  std::ofstream log_;
  long events_ = 0;
  long next_id_ = 0;

  std::vector<std::string> sentence_order_;
  std::map<std::string, SentenceRecord> sentences_;
  std::vector<std::string> task_order_;
  std::map<std::string, Task> tasks_;
  std::map<std::string, WorkerStats> workers_;

  mutable std::shared_mutex mu_;
};

Json to_json(const WorkerStats& s);
Json to_json(const ProposedQA& q);
ProposedQA proposed_qa_from_json(const Json& j);
Json to_json(const ValidationAnswer& a);
ValidationAnswer validation_answer_from_json(const Json& j);
Json to_json(const Violation& v);
Json to_json(const SubmitResult& r);

}  // namespace qasrl

#endif  // QASRL_ANNOSVC_H_
