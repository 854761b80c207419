// qasrl/src/corpus.cc

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

#include "qasrl/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace qasrl {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

const std::set<std::string, std::less<>>& be_forms() {
  static const std::set<std::string, std::less<>> s = {"be",   "am",   "is", "are", "was",
                                                       "were", "been", "being", "'s",
                                                       "'re",  "'m"};
  return s;
}

const std::set<std::string, std::less<>>& have_forms() {
  static const std::set<std::string, std::less<>> s = {"have", "has", "had", "having", "'ve",
                                                       "'d"};
  return s;
}

const std::set<std::string, std::less<>>& do_forms() {
  static const std::set<std::string, std::less<>> s = {"do", "does", "did", "doing", "done"};
  return s;
}

}  // namespace

Json spans_to_json(const std::vector<AnswerSpan>& spans) {
  Json arr = Json::array();
  for (const auto& s : spans) arr.push_back(Json::array({s.start, s.end}));
  return arr;
}

std::vector<AnswerSpan> spans_from_json(const Json& j) {
  std::vector<AnswerSpan> out;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      throw ValidationError("span must be a pair [start, end]");
    out.push_back({pair.at(0).get<int>(), pair.at(1).get<int>()});
  }
  return out;
}

Json to_json(const Judgment& j) {
  Json out;
  out["workerId"] = j.worker_id;
  out["isValid"] = j.is_valid;
  out["spans"] = spans_to_json(j.spans);
  return out;
}

Judgment judgment_from_json(const Json& j) {
  return {j.at("workerId").get<std::string>(), j.at("isValid").get<bool>(), spans_from_json(j.at("spans"))};
}

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::wikipedia: return "wikipedia";
    case Domain::wikinews: return "wikinews";
    case Domain::science: return "science";
    case Domain::other: return "other";
  }
  return "other";
}

Domain domain_from_string(std::string_view s) {
  if (s == "wikipedia") return Domain::wikipedia;
  if (s == "wikinews") return Domain::wikinews;
  if (s == "science" || s == "tqa") return Domain::science;
  if (s == "other") return Domain::other;
  throw ValidationError("unknown domain '" + std::string(s) + "'");
}

std::string_view to_string(QASource s) {
  switch (s) {
    case QASource::generation: return "generation";
    case QASource::expansion: return "expansion";
    case QASource::parser: return "parser";
  }
  return "generation";
}

QASource qa_source_from_string(std::string_view s) {
  if (s == "generation") return QASource::generation;
  if (s == "expansion") return QASource::expansion;
  if (s == "parser") return QASource::parser;
  throw ValidationError("unknown QA source '" + std::string(s) + "'");
}

const VerbEntry* SentenceRecord::find_verb(int verb_index) const {
  for (const auto& v : verb_entries)
    if (v.verb_index == verb_index) return &v;
  return nullptr;
}

VerbEntry* SentenceRecord::find_verb(int verb_index) {
  for (auto& v : verb_entries)
    if (v.verb_index == verb_index) return &v;
  return nullptr;
}

bool aggregate_validity(std::span<const Judgment> judgments, AggregationRule rule) {
  if (rule.total <= 0 || rule.required < 0 || rule.required > rule.total)
    throw ValidationError("malformed aggregation rule");
  if (static_cast<int>(judgments.size()) < rule.total)
    throw ValidationError("aggregation needs " + std::to_string(rule.total) +
                          " judgments, got " + std::to_string(judgments.size()));
  int valid = 0;
  for (int i = 0; i < rule.total; ++i) valid += judgments[i].is_valid ? 1 : 0;
  return valid >= rule.required;
}

bool qa_is_valid(const QAPair& qa, std::optional<AggregationRule> rule) {
  if (qa.judgments.size() <= 1) return true;
  std::span<const Judgment> validators(qa.judgments.begin() + 1, qa.judgments.end());
  return aggregate_validity(validators,
                            rule.value_or(AggregationRule::all_of(static_cast<int>(validators.size()))));
}

std::vector<AnswerSpan> answer_spans(const QAPair& qa) {
  std::set<AnswerSpan> all;
  for (const auto& j : qa.judgments)
    if (j.is_valid) all.insert(j.spans.begin(), j.spans.end());
  return {all.begin(), all.end()};
}

void validate_record(const SentenceRecord& r) {
  auto fail = [&](const std::string& msg) { throw CorpusError(msg, 0, r.sentence_id); };
  if (r.tokens.empty()) fail("sentence has no tokens");
  if (r.tokens.size() != r.pos_tags.size()) fail("posTags and tokens differ in length");
  const int n = static_cast<int>(r.tokens.size());
  int previous = -1;
  for (const auto& v : r.verb_entries) {
    if (v.verb_index <= previous) fail("verb indices must be strictly increasing");
    if (v.verb_index < 0 || v.verb_index >= n)
      fail("verb index " + std::to_string(v.verb_index) + " out of range");
    if (!starts_with(r.pos_tags[v.verb_index], "VB"))
      fail("verb index " + std::to_string(v.verb_index) + " is not tagged VB*");
    previous = v.verb_index;
    const auto& inf = v.inflections;
    if (inf.stem.empty() || inf.present_singular_3rd.empty() || inf.present_participle.empty() ||
        inf.past.empty() || inf.past_participle.empty())
      fail("inflection table has an empty form");

    // worker -> (qa index, span) for the cross-question overlap check, per source
    std::map<std::pair<QASource, std::string>, std::vector<std::pair<std::size_t, AnswerSpan>>>
        by_worker;
    for (std::size_t qi = 0; qi < v.qa_pairs.size(); ++qi) {
      const auto& qa = v.qa_pairs[qi];
      if (qa.judgments.empty() || !qa.judgments.front().is_valid ||
          qa.judgments.front().spans.empty())
        fail("QA pair lacks a generator judgment with answer spans");
      for (std::size_t ji = 0; ji < qa.judgments.size(); ++ji) {
        const auto& j = qa.judgments[ji];
        if (j.is_valid == j.spans.empty())
          fail("judgment by '" + j.worker_id + "' must have spans iff it is valid");
        // model-written questions may overlap each other; only people are bound
        const bool model_writer = ji == 0 && qa.source != QASource::generation;
        for (const auto& s : j.spans) {
          if (s.start < 0 || s.end < s.start || s.end >= n)
            fail("span (" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                 ") is out of bounds");
          if (!model_writer) by_worker[{qa.source, j.worker_id}].emplace_back(qi, s);
        }
      }
    }
    for (const auto& [key, spans] : by_worker)
      for (std::size_t a = 0; a < spans.size(); ++a)
        for (std::size_t b = a + 1; b < spans.size(); ++b)
          if (spans[a].first != spans[b].first && spans[a].second.overlaps(spans[b].second))
            fail("worker '" + key.second + "' gave overlapping answers to different questions");
  }
}

Json to_json(const QuestionSlots& q) {
  Json j;
  j["wh"] = std::string(to_string(q.wh));
  j["aux"] = q.aux;
  j["subj"] = std::string(to_string(q.subj));
  j["verbForm"] = q.verb ? std::string(to_string(q.verb->form)) : std::string();
  j["auxChain"] = q.verb ? std::string(to_string(q.verb->chain)) : std::string();
  j["obj"] = std::string(to_string(q.obj));
  j["prep"] = q.prep;
  j["misc"] = std::string(to_string(q.misc));
  return j;
}

QuestionSlots question_slots_from_json(const Json& j) {
  try {
    QuestionSlots q;
    q.wh = wh_from_string(j.at("wh").get<std::string>());
    q.aux = j.at("aux").get<std::string>();
    if (!q.aux.empty()) aux_class(q.aux);  // vocabulary check
    q.subj = placeholder_from_string(j.at("subj").get<std::string>());
    const auto form = j.at("verbForm").get<std::string>();
    const auto chain = j.value("auxChain", std::string());
    if (!form.empty()) q.verb = VerbSlot{aux_chain_from_string(chain), verb_form_from_string(form)};
    q.obj = placeholder_from_string(j.at("obj").get<std::string>());
    q.prep = j.at("prep").get<std::string>();
    q.misc = misc_from_string(j.at("misc").get<std::string>());
    return q;
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

Json to_json(const InflectionTable& t) {
  Json j;
  j["stem"] = t.stem;
  j["presentSingular3rd"] = t.present_singular_3rd;
  j["presentParticiple"] = t.present_participle;
  j["past"] = t.past;
  j["pastParticiple"] = t.past_participle;
  return j;
}

InflectionTable inflection_table_from_json(const Json& j) {
  return {j.at("stem").get<std::string>(), j.at("presentSingular3rd").get<std::string>(),
          j.at("presentParticiple").get<std::string>(), j.at("past").get<std::string>(),
          j.at("pastParticiple").get<std::string>()};
}

Json to_json(const SentenceRecord& r) {
  Json j;
  j["sentenceId"] = r.sentence_id;
  j["domain"] = std::string(to_string(r.domain));
  j["tokens"] = r.tokens;
  j["posTags"] = r.pos_tags;
  Json verbs = Json::array();
  for (const auto& v : r.verb_entries) {
    Json jv;
    jv["verbIndex"] = v.verb_index;
    jv["inflections"] = to_json(v.inflections);
    Json qas = Json::array();
    for (const auto& qa : v.qa_pairs) {
      Json jq;
      jq["slots"] = to_json(qa.slots);
      jq["source"] = std::string(to_string(qa.source));
      Json judgments = Json::array();
      for (const auto& jd : qa.judgments) judgments.push_back(to_json(jd));
      jq["judgments"] = std::move(judgments);
      qas.push_back(std::move(jq));
    }
    jv["qaPairs"] = std::move(qas);
    verbs.push_back(std::move(jv));
  }
  j["verbEntries"] = std::move(verbs);
  return j;
}

SentenceRecord sentence_record_from_json(const Json& j) {
  SentenceRecord r;
  r.sentence_id = j.at("sentenceId").get<std::string>();
  try {
    r.domain = domain_from_string(j.value("domain", std::string("other")));
    r.tokens = j.at("tokens").get<std::vector<std::string>>();
    r.pos_tags = j.at("posTags").get<std::vector<std::string>>();
    for (const auto& jv : j.value("verbEntries", Json::array())) {
      VerbEntry v;
      v.verb_index = jv.at("verbIndex").get<int>();
      v.inflections = inflection_table_from_json(jv.at("inflections"));
      for (const auto& jq : jv.value("qaPairs", Json::array())) {
        QAPair qa;
        qa.slots = question_slots_from_json(jq.at("slots"));
        qa.source = qa_source_from_string(jq.value("source", std::string("generation")));
        for (const auto& jj : jq.at("judgments")) qa.judgments.push_back(judgment_from_json(jj));
        v.qa_pairs.push_back(std::move(qa));
      }
      r.verb_entries.push_back(std::move(v));
    }
  } catch (const Json::exception& e) {
    throw CorpusError(e.what(), 0, r.sentence_id);
  } catch (const CorpusError&) {
    throw;
  } catch (const ValidationError& e) {
    throw CorpusError(e.what(), 0, r.sentence_id);
  }
  return r;
}

std::string serialize_record(const SentenceRecord& r) { return to_json(r).dump(); }

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw CorpusError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    try {
      SentenceRecord r = sentence_record_from_json(j);
      validate_record(r);
      corpus.push_back(std::move(r));
    } catch (const CorpusError& e) {
      throw e.at_line(lineno);
    } catch (const Json::exception& e) {
      throw CorpusError(e.what(), lineno);
    }
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file " + path.string());
  return read_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& r : corpus) out << serialize_record(r) << '\n';
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file " + path.string());
  write_corpus(out, corpus);
}

CountStats& CountStats::operator+=(const CountStats& o) {
  sentences += o.sentences;
  verbs += o.verbs;
  questions += o.questions;
  valid_questions += o.valid_questions;
  return *this;
}

namespace {
double ratio(std::int64_t a, std::int64_t b) { return b == 0 ? 0.0 : double(a) / double(b); }
}  // namespace

double CorpusStats::questions_per_verb() const { return ratio(total.questions, total.verbs); }
double CorpusStats::valid_questions_per_verb() const {
  return ratio(total.valid_questions, total.verbs);
}
double CorpusStats::questions_per_sentence() const {
  return ratio(total.questions, total.sentences);
}
double CorpusStats::valid_questions_per_sentence() const {
  return ratio(total.valid_questions, total.sentences);
}

CorpusStats corpus_stats(const Corpus& corpus, std::optional<AggregationRule> rule) {
  CorpusStats stats;
  for (const auto& r : corpus) {
    CountStats c;
    c.sentences = 1;
    c.verbs = static_cast<std::int64_t>(r.verb_entries.size());
    for (const auto& v : r.verb_entries) {
      c.questions += static_cast<std::int64_t>(v.qa_pairs.size());
      for (const auto& qa : v.qa_pairs) c.valid_questions += qa_is_valid(qa, rule) ? 1 : 0;
    }
    stats.by_domain[r.domain] += c;
  }
  for (const auto& [domain, c] : stats.by_domain) stats.total += c;
  return stats;
}

Json to_json(const CorpusStats& stats) {
  auto counts = [](const CountStats& c) {
    Json j;
    j["sentences"] = c.sentences;
    j["verbs"] = c.verbs;
    j["questions"] = c.questions;
    j["validQuestions"] = c.valid_questions;
    return j;
  };
  Json j = counts(stats.total);
  j["questionsPerVerb"] = stats.questions_per_verb();
  j["validQuestionsPerVerb"] = stats.valid_questions_per_verb();
  j["questionsPerSentence"] = stats.questions_per_sentence();
  j["validQuestionsPerSentence"] = stats.valid_questions_per_sentence();
  Json domains = Json::object();
  for (const auto& [d, c] : stats.by_domain) domains[std::string(to_string(d))] = counts(c);
  j["byDomain"] = std::move(domains);
  return j;
}

std::vector<int> identify_verbs(std::span<const std::string> tokens,
                                std::span<const std::string> pos_tags) {
  if (tokens.size() != pos_tags.size())
    throw ValidationError("identify_verbs: " + std::to_string(tokens.size()) + " tokens but " +
                          std::to_string(pos_tags.size()) + " tags");
  std::vector<int> out;
  const int n = static_cast<int>(tokens.size());
  for (int i = 0; i < n; ++i) {
    if (!starts_with(pos_tags[i], "VB")) continue;
    const std::string word = lower(tokens[i]);
    if (be_forms().count(word)) continue;
    const bool is_have = have_forms().count(word) > 0;
    const bool is_do = do_forms().count(word) > 0;
    if (is_have || is_do) {
      bool auxiliary = false;
      for (int j = i + 1; j < n; ++j) {
        if (pos_tags[j] == ".") break;
        if (!starts_with(pos_tags[j], "VB")) continue;
        auxiliary = is_have ? pos_tags[j] == "VBN" : pos_tags[j] == "VB";
        break;
      }
      if (auxiliary) continue;
    }
    out.push_back(i);
  }
  return out;
}

TaggedSentence rough_tag(std::string_view text) {
  TaggedSentence out;
  std::istringstream ss{std::string(text)};
  std::string word;
  while (ss >> word) {
    std::string trailing;
    while (word.size() > 1 && std::ispunct(static_cast<unsigned char>(word.back())) &&
           word.back() != '\'') {
      trailing.insert(trailing.begin(), word.back());
      word.pop_back();
    }
    out.tokens.push_back(word);
    for (char c : trailing) out.tokens.emplace_back(1, c);
  }

  static const std::set<std::string, std::less<>> determiners = {"the", "a", "an", "this",
                                                                 "that", "these", "those"};
  static const std::set<std::string, std::less<>> pronouns = {"i",   "you", "he",   "she", "it",
                                                              "we",  "they", "him", "her",
                                                              "them", "me",  "us"};
  static const std::set<std::string, std::less<>> modals = {"can",   "could",  "may",  "might",
                                                            "must",  "should", "shall", "will",
                                                            "would"};
  static const std::set<std::string, std::less<>> preps = {"in",   "on",   "at",   "by",
                                                            "with", "from", "for",  "of",
                                                            "about", "into", "over", "under"};
  std::string prev;
  for (const auto& tok : out.tokens) {
    const std::string w = lower(tok);
    std::string tag = "NN";
    if (w.size() == 1 && std::ispunct(static_cast<unsigned char>(w[0]))) {
      tag = (w == "." || w == "!" || w == "?") ? "." : ",";
    } else if (determiners.count(w)) {
      tag = "DT";
    } else if (pronouns.count(w)) {
      tag = "PRP";
    } else if (modals.count(w)) {
      tag = "MD";
    } else if (w == "to") {
      tag = "TO";
    } else if (preps.count(w)) {
      tag = "IN";
    } else if (w == "is" || w == "has" || w == "does") {
      tag = "VBZ";
    } else if (w == "are" || w == "am" || w == "have" || w == "do") {
      tag = "VBP";
    } else if (w == "was" || w == "were" || w == "had" || w == "did") {
      tag = "VBD";
    } else if (w == "been") {
      tag = "VBN";
    } else if (w == "be") {
      tag = "VB";
    } else if (w.size() > 3 && w.ends_with("ing")) {
      tag = "VBG";
    } else if (w.size() > 3 && w.ends_with("ed")) {
      tag = (be_forms().count(prev) || have_forms().count(prev)) ? "VBN" : "VBD";
    } else if (w.size() > 3 && w.ends_with("ly")) {
      tag = "RB";
    } else if (modals.count(prev) || prev == "to") {
      tag = "VB";
    } else if (std::isupper(static_cast<unsigned char>(tok[0]))) {
      tag = "NNP";
    } else if (w.size() > 3 && w.ends_with("s")) {
      tag = "NNS";
    }
    out.pos_tags.push_back(tag);
    prev = w;
  }
  return out;
}

}  // namespace qasrl
