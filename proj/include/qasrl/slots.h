// qasrl/slots.h

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

#ifndef QASRL_SLOTS_H_
#define QASRL_SLOTS_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qasrl {

/// Position of each slot in the question template, in rendering order.
enum class Slot : std::uint8_t { wh, aux, subj, verb, obj, prep, misc };
inline constexpr int kNumSlots = 7;

std::string_view slot_name(Slot slot);

enum class Wh : std::uint8_t { who, what, when, where, why, how, how_much, how_long };
inline constexpr int kNumWh = 8;

/// Subject and object slots only ever hold an abstract placeholder.
enum class Placeholder : std::uint8_t { none, someone, something };

enum class Misc : std::uint8_t {
  none,
  someone,
  something,
  somewhere,
  do_something,
  doing_something,
  be_doing_something,
  to_do_something,
};
inline constexpr int kNumMisc = 8;

enum class AuxChain : std::uint8_t { none, be, been, being, have, have_been };
enum class VerbForm : std::uint8_t {
  stem,
  present_singular_3rd,
  present_participle,
  past,
  past_participle,
};

/// Auxiliary chain plus inflected form of the main verb. Only the pairs
/// listed by verb_slot_vocabulary() are legal.
struct VerbSlot {
  AuxChain chain = AuxChain::none;
  VerbForm form = VerbForm::stem;
  auto operator<=>(const VerbSlot&) const = default;
};

/// The seven-slot question. `aux` and `prep` hold surface strings (empty for
/// the empty slot) so the preposition inventory can be extended by config.
struct QuestionSlots {
  Wh wh = Wh::what;
  std::string aux;
  Placeholder subj = Placeholder::none;
  std::optional<VerbSlot> verb;
  Placeholder obj = Placeholder::none;
  std::string prep;
  Misc misc = Misc::none;
  auto operator<=>(const QuestionSlots&) const = default;
};

/// Surface forms of a verb, keyed by VerbForm.
struct InflectionTable {
  std::string stem;
  std::string present_singular_3rd;
  std::string present_participle;
  std::string past;
  std::string past_participle;

  const std::string& get(VerbForm form) const;
  bool operator==(const InflectionTable&) const = default;
};

enum class AuxClass : std::uint8_t { none, be, do_, have, modal };

// Vocabularies. Index 0 is the empty value wherever the slot may be empty.
const std::vector<std::string>& wh_vocabulary();
const std::vector<std::string>& aux_vocabulary();
const std::vector<std::string>& placeholder_vocabulary();
const std::vector<std::string>& misc_vocabulary();
const std::vector<VerbSlot>& verb_slot_vocabulary();
const std::vector<std::string>& default_prepositions();

std::string_view to_string(Wh wh);
std::string_view to_string(Placeholder p);
std::string_view to_string(Misc m);
std::string_view to_string(AuxChain chain);
std::string_view to_string(VerbForm form);

// Parse the serialized names; throw std::invalid_argument on unknown input.
Wh wh_from_string(std::string_view s);
Placeholder placeholder_from_string(std::string_view s);
Misc misc_from_string(std::string_view s);
AuxChain aux_chain_from_string(std::string_view s);
VerbForm verb_form_from_string(std::string_view s);

AuxClass aux_class(std::string_view aux);
bool is_negated_aux(std::string_view aux);
/// "didn't" -> "did"; non-negated input is returned unchanged.
std::string_view positive_aux(std::string_view aux);

/// True for a slot tuple whose verb is passive-voiced.
bool is_passive(const QuestionSlots& q);

}  // namespace qasrl

#endif  // QASRL_SLOTS_H_
