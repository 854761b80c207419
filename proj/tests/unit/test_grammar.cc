// qasrl/tests/unit/test_grammar.cc

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

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "qasrl/error.h"
#include "qasrl/grammar.h"

using namespace qasrl;

namespace {

QuestionSlots make(Wh wh, std::string aux, Placeholder subj, AuxChain chain, VerbForm form,
                   Placeholder obj, std::string prep, Misc misc) {
  QuestionSlots q;
  q.wh = wh;
  q.aux = std::move(aux);
  q.subj = subj;
  q.verb = VerbSlot{chain, form};
  q.obj = obj;
  q.prep = std::move(prep);
  q.misc = misc;
  return q;
}

// The constraint table written out directly over slot values, independent
// of the automaton.
bool reference_accepts(const QuestionSlots& q, const std::vector<std::string>& preps) {
  using C = AuxChain;
  using F = VerbForm;
  if (!q.verb) return false;
  const bool core_wh = q.wh == Wh::who || q.wh == Wh::what;
  const AuxClass ac = aux_class(q.aux);
  if (q.subj == Placeholder::none && (!core_wh || ac == AuxClass::do_)) return false;
  if (q.subj != Placeholder::none && q.aux.empty()) return false;
  const auto v = *q.verb;
  const auto in = [&](std::initializer_list<VerbSlot> allowed) {
    return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
  };
  bool agree = false;
  switch (ac) {
    case AuxClass::do_: agree = in({{C::none, F::stem}}); break;
    case AuxClass::be:
      agree = in({{C::none, F::present_participle}, {C::none, F::past_participle},
                  {C::being, F::past_participle}});
      break;
    case AuxClass::have:
      agree = in({{C::none, F::past_participle}, {C::been, F::present_participle},
                  {C::been, F::past_participle}});
      break;
    case AuxClass::modal:
      agree = in({{C::none, F::stem}, {C::be, F::present_participle}, {C::be, F::past_participle},
                  {C::have, F::past_participle}, {C::have_been, F::present_participle},
                  {C::have_been, F::past_participle}});
      break;
    case AuxClass::none: agree = in({{C::none, F::past}, {C::none, F::present_singular_3rd}}); break;
  }
  if (!agree) return false;
  const bool do_phrase = q.misc == Misc::do_something || q.misc == Misc::doing_something ||
                         q.misc == Misc::be_doing_something || q.misc == Misc::to_do_something;
  if (is_passive(q) && q.obj != Placeholder::none && q.prep.empty() && !do_phrase) return false;
  if (q.prep.empty() && (q.misc == Misc::someone || q.misc == Misc::something) &&
      q.obj == Placeholder::none)
    return false;
  if (q.misc == Misc::to_do_something &&
      (q.prep.empty() || std::find(preps.begin(), preps.end(), q.prep + " to") != preps.end()))
    return false;
  return true;
}

struct Enumeration {
  std::vector<SlotCodes> accepted;
};

const Enumeration& enumerate_accepted(const Grammar& g) {
  static const Enumeration e = [&] {
    Enumeration out;
    SlotCodes c{};
    for (c[0] = 0; c[0] < g.vocabulary_size(Slot::wh); ++c[0])
      for (c[1] = 0; c[1] < g.vocabulary_size(Slot::aux); ++c[1])
        for (c[2] = 0; c[2] < g.vocabulary_size(Slot::subj); ++c[2])
          for (c[3] = 0; c[3] < g.vocabulary_size(Slot::verb); ++c[3])
            for (c[4] = 0; c[4] < g.vocabulary_size(Slot::obj); ++c[4])
              for (c[5] = 0; c[5] < g.vocabulary_size(Slot::prep); ++c[5])
                for (c[6] = 0; c[6] < g.vocabulary_size(Slot::misc); ++c[6])
                  if (reference_accepts(g.decode(c), g.prepositions())) out.accepted.push_back(c);
    return out;
  }();
  return e;
}

}  // namespace

TEST_CASE("inflection rules and lexicon") {
  const Lexicon lex = Lexicon::builtin();
  const auto refuse = inflect("refuse", lex);
  CHECK(refuse.past == "refused");
  CHECK(refuse.present_participle == "refusing");
  CHECK(inflect("blame", lex) == InflectionTable{"blame", "blames", "blaming", "blamed", "blamed"});
  CHECK(inflect("put", lex) == InflectionTable{"put", "puts", "putting", "put", "put"});
  CHECK(inflect("stop", lex).past == "stopped");
  CHECK(inflect("stop", lex).present_participle == "stopping");
  CHECK(inflect("visit", lex).past == "visited");
  CHECK(inflect("carry", lex).present_singular_3rd == "carries");
  CHECK(inflect("carry", lex).past == "carried");
  CHECK(inflect("play", lex).past == "played");
  CHECK(inflect("watch", lex).present_singular_3rd == "watches");
  CHECK(inflect("die", lex).present_participle == "dying");
  CHECK(inflect("agree", lex).present_participle == "agreeing");
  CHECK(inflect("fix", lex).past == "fixed");
}

TEST_CASE("Table-style examples are accepted and the counterexample rejected") {
  const Grammar g;
  using P = Placeholder;
  using C = AuxChain;
  using F = VerbForm;
  const std::vector<QuestionSlots> rows = {
      make(Wh::who, "", P::none, C::none, F::past, P::someone, "", Misc::none),
      make(Wh::what, "did", P::someone, C::none, F::stem, P::something, "on", Misc::none),
      make(Wh::who, "", P::none, C::none, F::past, P::none, "to", Misc::do_something),
      make(Wh::when, "did", P::someone, C::none, F::stem, P::none, "to", Misc::do_something),
      make(Wh::who, "might", P::none, C::none, F::stem, P::something, "", Misc::somewhere),
      make(Wh::where, "might", P::someone, C::none, F::stem, P::something, "", Misc::none),
  };
  for (const auto& q : rows) CHECK(g.accepts(q));
  CHECK_FALSE(g.accepts(
      make(Wh::what, "did", P::none, C::been, F::past_participle, P::none, "", Misc::none)));
  CHECK_FALSE(g.accepts(
      make(Wh::what, "did", P::someone, C::been, F::past_participle, P::none, "", Misc::none)));
  QuestionSlots no_verb = rows[0];
  no_verb.verb.reset();
  CHECK_FALSE(g.accepts(no_verb));
  QuestionSlots bad = rows[0];
  bad.aux = "shalln't";
  CHECK_THROWS_AS(g.encode(bad), ValidationError);

  const Lexicon lex = Lexicon::builtin();
  CHECK(g.render(rows[1], inflect("blame", lex)) == "What did someone blame something on?");
  CHECK(g.render(rows[4], inflect("put", lex)) == "Who might put something somewhere?");
  CHECK(g.render(rows[2], inflect("refuse", lex)) == "Who refused to do something?");
}

TEST_CASE("automaton agrees with the constraint table on every slot tuple") {
  const Grammar g;
  const auto& e = enumerate_accepted(g);
  MESSAGE("accepted tuples: " << e.accepted.size());
  CHECK(e.accepted.size() > 1000);
  std::set<SlotCodes> accepted(e.accepted.begin(), e.accepted.end());
  // Every accepted tuple is accepted by the automaton; sample rejects too.
  for (const auto& c : e.accepted) REQUIRE(g.accepts(c));
  SlotCodes c{};
  std::size_t checked = 0;
  for (c[0] = 0; c[0] < g.vocabulary_size(Slot::wh); ++c[0])
    for (c[1] = 0; c[1] < g.vocabulary_size(Slot::aux); c[1] += 3)
      for (c[2] = 0; c[2] < 3; ++c[2])
        for (c[3] = 0; c[3] < 13; ++c[3])
          for (c[4] = 0; c[4] < 3; ++c[4])
            for (c[5] = 0; c[5] < g.vocabulary_size(Slot::prep); c[5] += 2)
              for (c[6] = 0; c[6] < kNumMisc; ++c[6]) {
                REQUIRE(g.accepts(c) == accepted.count(c) > 0);
                ++checked;
              }
  CHECK(checked > 100000);
}

TEST_CASE("autocomplete is sound and complete for every reachable prefix") {
  const Grammar g;
  const auto& e = enumerate_accepted(g);
  // prefix -> set of next values, computed from the accepted tuples
  std::map<std::vector<int>, std::set<int>> expected;
  for (const auto& c : e.accepted)
    for (int k = 0; k < kNumSlots; ++k) expected[std::vector<int>(c.begin(), c.begin() + k)].insert(c[k]);
  std::size_t prefixes = 0;
  for (const auto& [prefix, values] : expected) {
    const auto got = g.autocomplete(prefix);
    REQUIRE(std::set<int>(got.begin(), got.end()) == values);
    ++prefixes;
  }
  CHECK(prefixes > 1000);

  CHECK(g.autocomplete(std::vector<int>{}).size() == 8);
  const int who = 0;
  const int what = 1;
  const int did = static_cast<int>(std::find(aux_vocabulary().begin(), aux_vocabulary().end(), "did") -
                                   aux_vocabulary().begin());
  const auto verbs_did = g.autocomplete(std::vector<int>{what, did, 1});
  REQUIRE(verbs_did.size() == 1);
  CHECK(verb_slot_vocabulary()[verbs_did[0]] == VerbSlot{AuxChain::none, VerbForm::stem});
  const auto verbs_who = g.autocomplete(std::vector<int>{who, 0, 0});
  std::set<VerbSlot> who_set;
  for (int v : verbs_who) who_set.insert(verb_slot_vocabulary()[v]);
  CHECK(who_set == std::set<VerbSlot>{{AuxChain::none, VerbForm::past},
                                      {AuxChain::none, VerbForm::present_singular_3rd}});
  CHECK_THROWS_AS(g.autocomplete(std::vector<int>{what, did, 0}), ValidationError);
}

TEST_CASE("autocomplete for a full prefix sweep stays fast") {
  const Grammar g;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t n = 0;
  for (int wh = 0; wh < kNumWh; ++wh)
    for (int aux = 0; aux < g.vocabulary_size(Slot::aux); ++aux)
      for (int subj = 0; subj < 3; ++subj) {
        std::vector<int> prefix{wh, aux, subj};
        try {
          n += g.autocomplete(prefix).size();
        } catch (const ValidationError&) {
        }
      }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(n > 0);
  CHECK(secs < 5.0);
}

TEST_CASE("render and parse are inverse on the accepted language") {
  const Grammar g;
  const Lexicon lex = Lexicon::builtin();
  const auto& e = enumerate_accepted(g);
  for (const char* verb : {"blame", "put", "refuse"}) {
    const auto inf = inflect(verb, lex);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < e.accepted.size(); i += (std::string(verb) == "blame" ? 5 : 97)) {
      const auto q = g.decode(e.accepted[i]);
      const std::string text = g.render(q, inf);
      REQUIRE(g.parse(text, inf) == q);
      if (std::string(verb) == "blame") REQUIRE(seen.insert(text).second);
    }
  }
  const auto inf = inflect("blame", lex);
  CHECK_THROWS_AS(g.parse("What did been blamed?", inf), ValidationError);
  CHECK_THROWS_AS(g.parse("Why blamed?", inf), ValidationError);
}

TEST_CASE("value names round-trip") {
  const Grammar g;
  for (int k = 0; k < kNumSlots; ++k) {
    const auto slot = static_cast<Slot>(k);
    for (int c = 0; c < g.vocabulary_size(slot); ++c) CHECK(g.code_from_name(slot, g.value_name(slot, c)) == c);
  }
  CHECK(g.value_name(Slot::verb, 12) == "have been:pastParticiple");
}

TEST_CASE("auto_suggest covers unasked argument positions") {
  const Grammar g;
  const Lexicon lex = Lexicon::builtin();
  const auto inf = inflect("blame", lex);

  const auto initial = g.auto_suggest({});
  REQUIRE_FALSE(initial.empty());
  for (const auto& q : initial) {
    CHECK(g.accepts(q));
    CHECK(extracted_position(q) == ArgumentPosition::subject);
  }

  const QuestionSlots who_blamed = g.parse("Who blamed someone?", inf);
  const std::vector<QuestionSlots> prior{who_blamed};
  const auto after = g.auto_suggest(prior);
  REQUIRE_FALSE(after.empty());
  std::vector<std::string> texts;
  for (const auto& q : after) {
    CHECK(g.accepts(q));
    CHECK(q != who_blamed);
    CHECK(extracted_position(q) != ArgumentPosition::subject);
    texts.push_back(g.render(q, inf));
  }
  CHECK(std::find(texts.begin(), texts.end(), "What did someone blame?") != texts.end());

  std::vector<QuestionSlots> all = prior;
  all.push_back(g.parse("Who did someone blame?", inf));
  CHECK(g.auto_suggest(all).empty());

  // ranking: subject before object before prep object
  const std::vector<QuestionSlots> one{g.parse("What did someone blame something on?", inf)};
  const auto ranked = g.auto_suggest(one);
  REQUIRE(ranked.size() >= 2);
  CHECK(extracted_position(ranked.front()) == ArgumentPosition::subject);
  for (std::size_t i = 1; i < ranked.size(); ++i)
    CHECK(static_cast<int>(extracted_position(ranked[i - 1])) <=
          static_cast<int>(extracted_position(ranked[i])));
  for (const auto& q : ranked) CHECK_FALSE(is_negated_aux(q.aux));
}

TEST_CASE("extracted positions") {
  const Grammar g;
  const auto inf = inflect("blame", Lexicon::builtin());
  CHECK(extracted_position(g.parse("Who blamed someone?", inf)) == ArgumentPosition::subject);
  CHECK(extracted_position(g.parse("Who was blamed?", inf)) == ArgumentPosition::object);
  CHECK(extracted_position(g.parse("Who did someone blame?", inf)) == ArgumentPosition::object);
  CHECK(extracted_position(g.parse("What did someone blame something on?", inf)) ==
        ArgumentPosition::prep_object);
  CHECK(extracted_position(g.parse("Why did someone blame someone?", inf)) == ArgumentPosition::none);
}

TEST_CASE("shipped preposition list") {
  CHECK(load_prepositions(std::string(QASRL_DATA_DIR) + "/prepositions.txt") == default_prepositions());

  const auto path = std::filesystem::temp_directory_path() / "qasrl-preps.txt";
  std::ofstream(path) << "# comment\nOn\n  out   of  \n\nalong # trailing\n";
  CHECK(load_prepositions(path) == std::vector<std::string>{"on", "out of", "along"});
  std::ofstream(path) << "on\nabout\nON\n";
  CHECK_THROWS_AS(load_prepositions(path), ValidationError);
  std::ofstream(path) << "# nothing\n";
  CHECK_THROWS_AS(load_prepositions(path), ValidationError);
  std::filesystem::remove(path);
}
