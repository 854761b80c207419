// qasrl/src/http.cc

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

#include "qasrl/http.h"

#include <sstream>

#include "httplib.h"

namespace qasrl {

namespace {

const Lexicon& lexicon() {
  static const Lexicon lex = Lexicon::builtin();
  return lex;
}

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                Json detail = Json::object()) {
  send(res, status, {{"code", code}, {"message", message}, {"detail", std::move(detail)}});
}

// runs a handler, mapping exceptions to structured errors
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.code(), e.what(), e.detail());
    } catch (const Json::parse_error& e) {
      send_error(res, 400, "invalid_json", "request body is not JSON", {{"reason", e.what()}});
    } catch (const Json::exception& e) {
      send_error(res, 400, "invalid_request", "request body does not match the schema", {{"reason", e.what()}});
    } catch (const ValidationError& e) {
      send_error(res, 400, "invalid_request", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", "internal error", {{"reason", e.what()}});
    }
  };
}

std::string required_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name) || req.get_param_value(name).empty())
    throw ServiceError("invalid_request", std::string("query parameter '") + name + "' is required", 400);
  return req.get_param_value(name);
}

std::string worker_of(const Json& body) {
  if (!body.contains("workerId") || !body["workerId"].is_string() || body["workerId"].get<std::string>().empty())
    throw ServiceError("invalid_request", "workerId is required", 400);
  return body["workerId"].get<std::string>();
}

void send_result(httplib::Response& res, const SubmitResult& r) {
  if (r.accepted) {
    send(res, 200, to_json(r));
    return;
  }
  Json violations = Json::array();
  for (const auto& v : r.violations) violations.push_back(to_json(v));
  send_error(res, 422, "rejected", "submission rejected", {{"violations", violations}});
}

}  // namespace

Json task_view(const Service& service, const Task& t) {
  const SentenceRecord r = service.sentence(t.sentence_id);
  const VerbEntry* v = r.find_verb(t.verb_index);
  Json j{{"taskId", t.id},
         {"kind", std::string(to_string(t.kind))},
         {"stage", std::string(to_string(t.stage))},
         {"state", std::string(to_string(service.state(t.id)))},
         {"sentenceId", t.sentence_id},
         {"tokens", r.tokens},
         {"verbIndex", t.verb_index},
         {"inflections", to_json(v->inflections)},
         {"required", t.required}};
  Json leases = Json::array();
  for (const auto& l : t.leases) leases.push_back({{"workerId", l.worker_id}, {"expires", l.expires}});
  j["leases"] = std::move(leases);
  if (t.kind == TaskKind::validation) {
    Json qs = Json::array();
    for (const auto& q : t.questions)
      qs.push_back({{"slots", to_json(q.slots)}, {"text", service.grammar().render(q.slots, v->inflections)}});
    j["questions"] = std::move(qs);
  }
  return j;
}

Json autocomplete_json(const Grammar& grammar, const std::string& verb_stem, const std::string& prefix,
                       const Json& prior) {
  if (verb_stem.empty()) throw ValidationError("verb is required");
  const InflectionTable inf = inflect(verb_stem, lexicon());
  std::vector<int> codes;
  if (!prefix.empty()) {
    std::vector<std::string> names;
    std::stringstream ss(prefix);
    std::string part;
    while (std::getline(ss, part, ',')) names.push_back(part);
    if (prefix.back() == ',') names.emplace_back();
    if (names.size() > static_cast<std::size_t>(kNumSlots)) throw ValidationError("prefix is longer than a question");
    for (std::size_t k = 0; k < names.size(); ++k)
      codes.push_back(grammar.code_from_name(static_cast<Slot>(k), names[k]));
  }
  Json j;
  j["verb"] = to_json(inf);
  Json options = Json::array();
  if (codes.size() < static_cast<std::size_t>(kNumSlots)) {
    const auto slot = static_cast<Slot>(codes.size());
    j["slot"] = std::string(slot_name(slot));
    for (int c : grammar.autocomplete(codes))
      options.push_back({{"value", grammar.value_name(slot, c)}, {"text", grammar.value_text(slot, c, &inf)}});
    j["complete"] = false;
  } else {
    SlotCodes full{};
    std::copy(codes.begin(), codes.end(), full.begin());
    j["slot"] = nullptr;
    j["complete"] = grammar.accepts(full);
    if (j["complete"].get<bool>()) j["text"] = grammar.render(grammar.decode(full), inf);
  }
  j["options"] = std::move(options);

  std::vector<QuestionSlots> prior_slots;
  for (const auto& q : prior) prior_slots.push_back(question_slots_from_json(q));
  Json suggestions = Json::array();
  for (const auto& q : grammar.auto_suggest(prior_slots))
    suggestions.push_back({{"slots", to_json(q)}, {"text", grammar.render(q, inf)}});
  j["suggestions"] = std::move(suggestions);
  return j;
}

void install_routes(httplib::Server& server, Service& service) {
  server.Get("/api/task/next", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const auto worker = required_param(req, "worker");
               const auto kind = task_kind_from_string(req.has_param("kind") ? req.get_param_value("kind") : "generation");
               send(res, 200, task_view(service, service.next_task(worker, kind)));
             }));

  server.Post(R"(/api/task/([^/]+)/generation)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const Json body = Json::parse(req.body);
                std::vector<ProposedQA> pairs;
                for (const auto& q : body.at("qaPairs")) pairs.push_back(proposed_qa_from_json(q));
                send_result(res, service.submit_generation(req.matches[1], worker_of(body), pairs));
              }));

  server.Post(R"(/api/task/([^/]+)/validation)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const Json body = Json::parse(req.body);
                std::vector<ValidationAnswer> answers;
                for (const auto& a : body.at("judgments")) answers.push_back(validation_answer_from_json(a));
                send_result(res, service.submit_validation(req.matches[1], worker_of(body), answers));
              }));

  server.Get("/api/autocomplete", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const Json prior = req.has_param("prior") ? Json::parse(req.get_param_value("prior")) : Json::array();
               send(res, 200,
                    autocomplete_json(service.grammar(), required_param(req, "verb"),
                                      req.has_param("prefix") ? req.get_param_value("prefix") : "", prior));
             }));

  server.Get("/api/stats", guarded([&service](const httplib::Request&, httplib::Response& res) {
               send(res, 200, service.stats_json());
             }));

  server.Get("/api/export", guarded([&service](const httplib::Request&, httplib::Response& res) {
               std::ostringstream out;
               write_corpus(out, service.export_corpus());
               res.set_content(out.str(), "application/x-ndjson");
             }));
}

}  // namespace qasrl
