// qasrl/src/slots.cc

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

#include "qasrl/slots.h"

#include <algorithm>
#include <array>

namespace qasrl {

namespace {

constexpr std::array<std::string_view, 7> kSlotNames = {"wh",  "aux",  "subj", "verb",
                                                        "obj", "prep", "misc"};

constexpr std::array<std::pair<std::string_view, std::string_view>, 19> kNegations = {{
    {"is", "isn't"},         {"are", "aren't"},     {"was", "wasn't"},
    {"were", "weren't"},     {"do", "don't"},       {"does", "doesn't"},
    {"did", "didn't"},       {"has", "hasn't"},     {"have", "haven't"},
    {"had", "hadn't"},       {"can", "can't"},      {"could", "couldn't"},
    {"may", "mayn't"},       {"might", "mightn't"}, {"must", "mustn't"},
    {"should", "shouldn't"}, {"shall", "shan't"},   {"will", "won't"},
    {"would", "wouldn't"},
}};

template <typename Enum>
Enum lookup(const std::vector<std::string>& vocab, std::string_view s, const char* what) {
  auto it = std::find(vocab.begin(), vocab.end(), s);
  if (it == vocab.end())
    throw std::invalid_argument(std::string("unknown ") + what + " value '" + std::string(s) + "'");
  return static_cast<Enum>(it - vocab.begin());
}

const std::vector<std::string>& chain_names() {
  static const std::vector<std::string> v = {"", "be", "been", "being", "have", "have been"};
  return v;
}

const std::vector<std::string>& form_names() {
  static const std::vector<std::string> v = {"stem", "presentSingular3rd", "presentParticiple",
                                             "past", "pastParticiple"};
  return v;
}

}  // namespace

std::string_view slot_name(Slot slot) { return kSlotNames[static_cast<int>(slot)]; }

const std::string& InflectionTable::get(VerbForm form) const {
  switch (form) {
    case VerbForm::stem: return stem;
    case VerbForm::present_singular_3rd: return present_singular_3rd;
    case VerbForm::present_participle: return present_participle;
    case VerbForm::past: return past;
    case VerbForm::past_participle: return past_participle;
  }
  return stem;
}

const std::vector<std::string>& wh_vocabulary() {
  static const std::vector<std::string> v = {"who", "what", "when",     "where",
                                             "why", "how",  "how much", "how long"};
  return v;
}

const std::vector<std::string>& aux_vocabulary() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out{""};
    for (const auto& [pos, neg] : kNegations) out.emplace_back(pos);
    for (const auto& [pos, neg] : kNegations) out.emplace_back(neg);
    return out;
  }();
  return v;
}

const std::vector<std::string>& placeholder_vocabulary() {
  static const std::vector<std::string> v = {"", "someone", "something"};
  return v;
}

const std::vector<std::string>& misc_vocabulary() {
  static const std::vector<std::string> v = {"",
                                             "someone",
                                             "something",
                                             "somewhere",
                                             "do something",
                                             "doing something",
                                             "be doing something",
                                             "to do something"};
  return v;
}

const std::vector<VerbSlot>& verb_slot_vocabulary() {
  using C = AuxChain;
  using F = VerbForm;
  static const std::vector<VerbSlot> v = {
      {C::none, F::stem},
      {C::none, F::present_singular_3rd},
      {C::none, F::past},
      {C::none, F::present_participle},
      {C::none, F::past_participle},
      {C::be, F::present_participle},
      {C::be, F::past_participle},
      {C::been, F::present_participle},
      {C::been, F::past_participle},
      {C::being, F::past_participle},
      {C::have, F::past_participle},
      {C::have_been, F::present_participle},
      {C::have_been, F::past_participle},
  };
  return v;
}

const std::vector<std::string>& default_prepositions() {
  static const std::vector<std::string> v = {
      "about",  "above",   "across", "after",  "against", "along", "among",  "around",
      "as",     "at",      "before", "behind", "below",   "beside", "between", "by",
      "down",   "during",  "for",    "from",   "in",      "inside", "into",   "like",
      "near",   "of",      "off",    "on",     "onto",    "out",   "out of", "over",
      "through", "to",     "toward", "under",  "until",   "up",    "up to",  "with",
  };
  return v;
}

std::string_view to_string(Wh wh) { return wh_vocabulary()[static_cast<int>(wh)]; }
std::string_view to_string(Placeholder p) { return placeholder_vocabulary()[static_cast<int>(p)]; }
std::string_view to_string(Misc m) { return misc_vocabulary()[static_cast<int>(m)]; }
std::string_view to_string(AuxChain chain) { return chain_names()[static_cast<int>(chain)]; }
std::string_view to_string(VerbForm form) { return form_names()[static_cast<int>(form)]; }

Wh wh_from_string(std::string_view s) { return lookup<Wh>(wh_vocabulary(), s, "wh"); }
Placeholder placeholder_from_string(std::string_view s) {
  return lookup<Placeholder>(placeholder_vocabulary(), s, "placeholder");
}
Misc misc_from_string(std::string_view s) { return lookup<Misc>(misc_vocabulary(), s, "misc"); }
AuxChain aux_chain_from_string(std::string_view s) {
  return lookup<AuxChain>(chain_names(), s, "auxChain");
}
VerbForm verb_form_from_string(std::string_view s) {
  return lookup<VerbForm>(form_names(), s, "verbForm");
}

std::string_view positive_aux(std::string_view aux) {
  for (const auto& [pos, neg] : kNegations)
    if (neg == aux) return pos;
  return aux;
}

bool is_negated_aux(std::string_view aux) { return positive_aux(aux) != aux; }

AuxClass aux_class(std::string_view aux) {
  const std::string_view a = positive_aux(aux);
  if (a.empty()) return AuxClass::none;
  if (a == "is" || a == "are" || a == "was" || a == "were") return AuxClass::be;
  if (a == "do" || a == "does" || a == "did") return AuxClass::do_;
  if (a == "has" || a == "have" || a == "had") return AuxClass::have;
  for (const auto& [pos, neg] : kNegations)
    if (pos == a) return AuxClass::modal;
  throw std::invalid_argument("unknown aux value '" + std::string(aux) + "'");
}

bool is_passive(const QuestionSlots& q) {
  if (!q.verb || q.verb->form != VerbForm::past_participle) return false;
  switch (q.verb->chain) {
    case AuxChain::be:
    case AuxChain::been:
    case AuxChain::being:
    case AuxChain::have_been:
      return true;
    case AuxChain::none:
      return aux_class(q.aux) == AuxClass::be;
    case AuxChain::have:
      return false;
  }
  return false;
}

}  // namespace qasrl
