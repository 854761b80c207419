// qasrl/src/expand.cc

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

#include "qasrl/expand.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

namespace qasrl {

namespace {

std::map<std::string, const SentenceRecord*> index_corpus(const Corpus& corpus) {
  std::map<std::string, const SentenceRecord*> out;
  for (const auto& r : corpus) out.emplace(r.sentence_id, &r);
  return out;
}

const VerbEntry* find_entry(const std::map<std::string, const SentenceRecord*>& index, const std::string& id,
                            int verb) {
  const auto it = index.find(id);
  return it == index.end() ? nullptr : it->second->find_verb(verb);
}

bool any_overlap(const std::vector<AnswerSpan>& a, const AnswerSpan& s) {
  return std::any_of(a.begin(), a.end(), [&](const AnswerSpan& x) { return x.overlaps(s); });
}

template <class T, class F>
std::vector<T> read_jsonl(std::istream& in, F parse) {
  std::vector<T> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw CorpusError(std::string("malformed JSON: ") + e.what(), lineno);
    } catch (const ValidationError& e) {
      throw CorpusError(e.what(), lineno);
    }
  }
  return out;
}

}  // namespace

std::vector<CandidateQA> overgenerate(Parser& parser, const Corpus& corpus, double tau, const std::string& model_id,
                                      int fold) {
  std::vector<CandidateQA> out;
  for (const auto& rec : corpus) {
    std::vector<int> verbs;
    for (const auto& v : rec.verb_entries) verbs.push_back(v.verb_index);
    if (verbs.empty()) continue;
    for (auto& t : parser.parse(rec.tokens, verbs, tau).tuples)
      out.push_back({rec.sentence_id, t.verb_index, t.slots, std::move(t.spans), std::move(t.span_probs), model_id,
                     fold});
  }
  return out;
}

std::vector<CandidateQA> filter_candidates(const std::vector<CandidateQA>& candidates, const Corpus& existing) {
  const auto index = index_corpus(existing);
  std::vector<CandidateQA> out;
  for (const auto& c : candidates) {
    const VerbEntry* entry = find_entry(index, c.sentence_id, c.verb_index);
    bool drop = false;
    if (entry) {
      for (const auto& qa : entry->qa_pairs) {
        if (qa.slots == c.slots) drop = true;
        if (!drop && qa_is_valid(qa)) {
          const auto answers = answer_spans(qa);
          drop = std::any_of(c.spans.begin(), c.spans.end(), [&](const AnswerSpan& s) { return any_overlap(answers, s); });
        }
        if (drop) break;
      }
    }
    if (!drop) out.push_back(c);
  }
  return out;
}

std::vector<Fold> jackknife_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("fold count must be at least 2");
  if (corpus.size() < static_cast<std::size_t>(k))
    throw ValidationError("corpus has " + std::to_string(corpus.size()) + " sentences, fewer than " +
                          std::to_string(k) + " folds");
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(corpus.size());
  for (std::size_t p = 0; p < order.size(); ++p) fold_of[order[p]] = static_cast<int>(p % static_cast<std::size_t>(k));

  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (int f = 0; f < k; ++f) {
      auto& fold = folds[static_cast<std::size_t>(f)];
      (fold_of[i] == f ? fold.heldout : fold.train).push_back(corpus[i]);
    }
  return folds;
}

MergeResult merge_validated(const Corpus& corpus, const std::vector<ValidatedCandidate>& validated) {
  MergeResult out;
  out.corpus = corpus;
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < out.corpus.size(); ++i) position.emplace(out.corpus[i].sentence_id, i);

  for (const auto& v : validated) {
    const auto& c = v.candidate;
    if (v.judgments.size() != 3)
      throw ValidationError("candidate for '" + c.sentence_id + "' has " + std::to_string(v.judgments.size()) +
                            " judgments, expected 3");
    const auto it = position.find(c.sentence_id);
    VerbEntry* entry = it == position.end() ? nullptr : out.corpus[it->second].find_verb(c.verb_index);
    if (!entry)
      throw ValidationError("candidate refers to unknown verb " + std::to_string(c.verb_index) + " of '" +
                            c.sentence_id + "'");
    if (!aggregate_validity(v.judgments, AggregationRule::all_of(3))) {
      out.negatives.push_back(v);
      continue;
    }
    QAPair qa;
    qa.slots = c.slots;
    qa.source = QASource::expansion;
    qa.judgments.push_back({c.model_id, true, c.spans});
    qa.judgments.insert(qa.judgments.end(), v.judgments.begin(), v.judgments.end());
    entry->qa_pairs.push_back(std::move(qa));
    ++out.merged;
  }
  for (const auto& r : out.corpus) validate_record(r);
  return out;
}

Corpus paraphrase_filter(const Corpus& expanded, const Corpus& original) {
  const auto index = index_corpus(original);
  Corpus out = expanded;
  for (auto& rec : out) {
    for (auto& entry : rec.verb_entries) {
      const VerbEntry* orig = find_entry(index, rec.sentence_id, entry.verb_index);
      if (!orig) continue;
      std::vector<std::vector<AnswerSpan>> original_answers;
      for (const auto& qa : orig->qa_pairs)
        if (qa.source == QASource::generation && qa_is_valid(qa)) original_answers.push_back(answer_spans(qa));
      std::erase_if(entry.qa_pairs, [&](const QAPair& qa) {
        if (qa.source == QASource::generation) return false;
        const auto spans = answer_spans(qa);
        return std::any_of(original_answers.begin(), original_answers.end(), [&](const auto& answers) {
          return std::count_if(spans.begin(), spans.end(), [&](const AnswerSpan& s) { return any_overlap(answers, s); }) >= 2;
        });
      });
    }
  }
  return out;
}

Json to_json(const CandidateQA& c) {
  Json j{{"sentenceId", c.sentence_id},
         {"verbIndex", c.verb_index},
         {"slots", to_json(c.slots)},
         {"spans", spans_to_json(c.spans)},
         {"spanProbs", c.span_probs},
         {"model", c.model_id}};
  if (c.fold >= 0) j["fold"] = c.fold;
  return j;
}

CandidateQA candidate_from_json(const Json& j) {
  CandidateQA c;
  c.sentence_id = j.at("sentenceId").get<std::string>();
  c.verb_index = j.at("verbIndex").get<int>();
  c.slots = question_slots_from_json(j.at("slots"));
  c.spans = spans_from_json(j.at("spans"));
  c.span_probs = j.value("spanProbs", std::vector<double>{});
  c.model_id = j.value("model", std::string("parser"));
  c.fold = j.value("fold", -1);
  if (c.spans.empty()) throw ValidationError("candidate has no spans");
  if (!c.span_probs.empty() && c.span_probs.size() != c.spans.size())
    throw ValidationError("spanProbs must parallel spans");
  for (const auto& s : c.spans)
    if (s.start < 0 || s.end < s.start) throw ValidationError("span end before start");
  return c;
}

Json to_json(const ValidatedCandidate& v) {
  Json j = to_json(v.candidate);
  Json judgments = Json::array();
  for (const auto& jd : v.judgments) judgments.push_back(to_json(jd));
  j["judgments"] = std::move(judgments);
  return j;
}

ValidatedCandidate validated_candidate_from_json(const Json& j) {
  ValidatedCandidate v;
  v.candidate = candidate_from_json(j);
  for (const auto& jj : j.at("judgments")) {
    v.judgments.push_back(judgment_from_json(jj));
    if (v.judgments.back().is_valid == v.judgments.back().spans.empty())
      throw ValidationError("judgment must have spans iff it is valid");
  }
  return v;
}

std::vector<CandidateQA> read_candidates(std::istream& in) {
  return read_jsonl<CandidateQA>(in, candidate_from_json);
}

std::vector<ValidatedCandidate> read_validated(std::istream& in) {
  return read_jsonl<ValidatedCandidate>(in, validated_candidate_from_json);
}

std::vector<CandidateQA> load_candidates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open candidate file " + path.string());
  return read_candidates(in);
}

std::vector<ValidatedCandidate> load_validated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open validated candidate file " + path.string());
  return read_validated(in);
}

}  // namespace qasrl
