// qasrl/grammar.h

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

#ifndef QASRL_GRAMMAR_H_
#define QASRL_GRAMMAR_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qasrl/slots.h"

namespace qasrl {

/// Irregular (or otherwise explicitly listed) verb inflections.
class Lexicon {
 public:
  Lexicon() = default;

  /// Common English irregular verbs, compiled in.
  static Lexicon builtin();
  /// TSV: stem, presentSingular3rd, presentParticiple, past, pastParticiple.
  static Lexicon load(const std::filesystem::path& path);

  void add(InflectionTable entry);
  const InflectionTable* find(std::string_view stem) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, InflectionTable, std::less<>> entries_;
};

/// Lexicon entry when present, otherwise regular English suffix rules.
InflectionTable inflect(std::string_view stem, const Lexicon& lexicon);

/// One preposition per line, `#` comments. Throws ValidationError on an
/// empty list or duplicates.
std::vector<std::string> load_prepositions(const std::filesystem::path& path);

/// Slot values as vocabulary indices in Slot order. Index 0 is the empty
/// value for aux, subj, obj, prep and misc; wh and verb have no empty value.
using SlotCodes = std::array<int, kNumSlots>;

enum class Voice : std::uint8_t { unset, active, passive };

/// Automaton state: the next slot to fill plus the bits of syntax that the
/// remaining constraints depend on.
struct AutomatonState {
  int slot_index = 0;
  bool subject_present = false;
  bool wh_is_adjunct = false;
  AuxClass aux_class = AuxClass::none;
  Voice verb_voice = Voice::unset;
  bool object_present = false;
  bool prep_present = false;
  // "to do something" is only legal after a preposition P for which "P to"
  // is not itself a preposition; otherwise the rendering is ambiguous.
  bool to_do_licensed = false;

  auto operator<=>(const AutomatonState&) const = default;
};

/// Slot-by-slot automaton over SlotCodes. Transitions return successor sets;
/// acceptance means some path reaches slot index 7.
class QuestionAutomaton {
 public:
  explicit QuestionAutomaton(std::vector<std::string> prepositions);

  AutomatonState start() const { return {}; }
  std::vector<AutomatonState> step(const AutomatonState& state, int code) const;
  std::vector<AutomatonState> run(std::span<const int> codes) const;
  bool accepting(const AutomatonState& state) const { return state.slot_index == kNumSlots; }
  /// Whether an accepting state is reachable from `state`.
  bool live(const AutomatonState& state) const;
  int alphabet_size(int slot_index) const;
  std::size_t num_states() const { return live_.size(); }

 private:
  std::vector<std::string> prepositions_;
  std::vector<bool> to_do_licensed_by_prep_;
  std::map<AutomatonState, bool> live_;
};

enum class ArgumentPosition : std::uint8_t { subject, object, prep_object, misc, none };
std::string_view to_string(ArgumentPosition p);

/// The argument a question asks about; `none` for adjunct questions.
ArgumentPosition extracted_position(const QuestionSlots& q);

/// Vocabularies, the automaton, and the text <-> slots mapping. Immutable
/// after construction.
class Grammar {
 public:
  explicit Grammar(std::vector<std::string> prepositions = default_prepositions());

  const std::vector<std::string>& prepositions() const { return prepositions_; }
  const QuestionAutomaton& automaton() const { return automaton_; }
  int vocabulary_size(Slot slot) const;

  /// Throws ValidationError on out-of-vocabulary values or a missing verb.
  SlotCodes encode(const QuestionSlots& q) const;
  QuestionSlots decode(const SlotCodes& codes) const;
  /// Surface text of one slot value; verb values need the inflection table.
  std::string value_text(Slot slot, int code, const InflectionTable* inflections = nullptr) const;
  /// Serialized (JSON) name of a slot value, e.g. "have been:pastParticiple".
  std::string value_name(Slot slot, int code) const;
  int code_from_name(Slot slot, std::string_view name) const;

  /// Throws ValidationError on out-of-vocabulary slot values.
  bool accepts(const QuestionSlots& q) const;
  bool accepts(const SlotCodes& codes) const;

  /// Codes v for the next slot such that prefix + v can still be completed.
  /// Throws ValidationError for a prefix no accepted question starts with.
  std::vector<int> autocomplete(std::span<const int> prefix) const;

  /// Complete questions about argument positions that the prior questions
  /// reveal but do not yet ask about, in deterministic rank order.
  std::vector<QuestionSlots> auto_suggest(std::span<const QuestionSlots> prior) const;

  std::string render(const QuestionSlots& q, const InflectionTable& inflections) const;
  /// Inverse of render on accepted questions; throws ValidationError otherwise.
  QuestionSlots parse(std::string_view question, const InflectionTable& inflections) const;

 private:
  std::vector<std::string> slot_words(Slot slot, int code, const InflectionTable* inf) const;

  std::vector<std::string> prepositions_;
  QuestionAutomaton automaton_;
  // words of every non-verb slot value, indexed [slot][code]
  std::array<std::vector<std::vector<std::string>>, kNumSlots> words_;
};

}  // namespace qasrl

#endif  // QASRL_GRAMMAR_H_
