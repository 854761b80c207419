// qasrl/src/grammar.cc

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

#include "qasrl/grammar.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "qasrl/error.h"

namespace qasrl {

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Single vowel group ending consonant-vowel-consonant, final not w/x/y.
bool doubles_final_consonant(std::string_view s) {
  if (s.size() < 3) return false;
  const char c3 = s[s.size() - 1], v = s[s.size() - 2], c1 = s[s.size() - 3];
  if (is_vowel(c3) || !is_vowel(v) || is_vowel(c1)) return false;
  if (c3 == 'w' || c3 == 'x' || c3 == 'y') return false;
  int groups = 0;
  bool in_vowel = false;
  for (char c : s) {
    const bool vw = is_vowel(c);
    if (vw && !in_vowel) ++groups;
    in_vowel = vw;
  }
  return groups == 1;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

constexpr const char* kIrregulars[][5] = {
    {"arise", "arises", "arising", "arose", "arisen"},
    {"awake", "awakes", "awaking", "awoke", "awoken"},
    {"bear", "bears", "bearing", "bore", "borne"},
    {"beat", "beats", "beating", "beat", "beaten"},
    {"become", "becomes", "becoming", "became", "become"},
    {"begin", "begins", "beginning", "began", "begun"},
    {"bend", "bends", "bending", "bent", "bent"},
    {"bet", "bets", "betting", "bet", "bet"},
    {"bind", "binds", "binding", "bound", "bound"},
    {"bite", "bites", "biting", "bit", "bitten"},
    {"bleed", "bleeds", "bleeding", "bled", "bled"},
    {"blow", "blows", "blowing", "blew", "blown"},
    {"break", "breaks", "breaking", "broke", "broken"},
    {"breed", "breeds", "breeding", "bred", "bred"},
    {"bring", "brings", "bringing", "brought", "brought"},
    {"build", "builds", "building", "built", "built"},
    {"burst", "bursts", "bursting", "burst", "burst"},
    {"buy", "buys", "buying", "bought", "bought"},
    {"cast", "casts", "casting", "cast", "cast"},
    {"catch", "catches", "catching", "caught", "caught"},
    {"choose", "chooses", "choosing", "chose", "chosen"},
    {"cling", "clings", "clinging", "clung", "clung"},
    {"come", "comes", "coming", "came", "come"},
    {"cost", "costs", "costing", "cost", "cost"},
    {"creep", "creeps", "creeping", "crept", "crept"},
    {"cut", "cuts", "cutting", "cut", "cut"},
    {"deal", "deals", "dealing", "dealt", "dealt"},
    {"dig", "digs", "digging", "dug", "dug"},
    {"do", "does", "doing", "did", "done"},
    {"draw", "draws", "drawing", "drew", "drawn"},
    {"drink", "drinks", "drinking", "drank", "drunk"},
    {"drive", "drives", "driving", "drove", "driven"},
    {"eat", "eats", "eating", "ate", "eaten"},
    {"fall", "falls", "falling", "fell", "fallen"},
    {"feed", "feeds", "feeding", "fed", "fed"},
    {"feel", "feels", "feeling", "felt", "felt"},
    {"fight", "fights", "fighting", "fought", "fought"},
    {"find", "finds", "finding", "found", "found"},
    {"flee", "flees", "fleeing", "fled", "fled"},
    {"fly", "flies", "flying", "flew", "flown"},
    {"forbid", "forbids", "forbidding", "forbade", "forbidden"},
    {"forget", "forgets", "forgetting", "forgot", "forgotten"},
    {"forgive", "forgives", "forgiving", "forgave", "forgiven"},
    {"freeze", "freezes", "freezing", "froze", "frozen"},
    {"get", "gets", "getting", "got", "gotten"},
    {"give", "gives", "giving", "gave", "given"},
    {"go", "goes", "going", "went", "gone"},
    {"grind", "grinds", "grinding", "ground", "ground"},
    {"grow", "grows", "growing", "grew", "grown"},
    {"hang", "hangs", "hanging", "hung", "hung"},
    {"have", "has", "having", "had", "had"},
    {"hear", "hears", "hearing", "heard", "heard"},
    {"hide", "hides", "hiding", "hid", "hidden"},
    {"hit", "hits", "hitting", "hit", "hit"},
    {"hold", "holds", "holding", "held", "held"},
    {"hurt", "hurts", "hurting", "hurt", "hurt"},
    {"keep", "keeps", "keeping", "kept", "kept"},
    {"know", "knows", "knowing", "knew", "known"},
    {"lay", "lays", "laying", "laid", "laid"},
    {"lead", "leads", "leading", "led", "led"},
    {"leave", "leaves", "leaving", "left", "left"},
    {"lend", "lends", "lending", "lent", "lent"},
    {"let", "lets", "letting", "let", "let"},
    {"lie", "lies", "lying", "lay", "lain"},
    {"light", "lights", "lighting", "lit", "lit"},
    {"lose", "loses", "losing", "lost", "lost"},
    {"make", "makes", "making", "made", "made"},
    {"mean", "means", "meaning", "meant", "meant"},
    {"meet", "meets", "meeting", "met", "met"},
    {"pay", "pays", "paying", "paid", "paid"},
    {"put", "puts", "putting", "put", "put"},
    {"quit", "quits", "quitting", "quit", "quit"},
    {"read", "reads", "reading", "read", "read"},
    {"ride", "rides", "riding", "rode", "ridden"},
    {"ring", "rings", "ringing", "rang", "rung"},
    {"rise", "rises", "rising", "rose", "risen"},
    {"run", "runs", "running", "ran", "run"},
    {"say", "says", "saying", "said", "said"},
    {"see", "sees", "seeing", "saw", "seen"},
    {"seek", "seeks", "seeking", "sought", "sought"},
    {"sell", "sells", "selling", "sold", "sold"},
    {"send", "sends", "sending", "sent", "sent"},
    {"set", "sets", "setting", "set", "set"},
    {"shake", "shakes", "shaking", "shook", "shaken"},
    {"shine", "shines", "shining", "shone", "shone"},
    {"shoot", "shoots", "shooting", "shot", "shot"},
    {"show", "shows", "showing", "showed", "shown"},
    {"shut", "shuts", "shutting", "shut", "shut"},
    {"sing", "sings", "singing", "sang", "sung"},
    {"sink", "sinks", "sinking", "sank", "sunk"},
    {"sit", "sits", "sitting", "sat", "sat"},
    {"sleep", "sleeps", "sleeping", "slept", "slept"},
    {"slide", "slides", "sliding", "slid", "slid"},
    {"speak", "speaks", "speaking", "spoke", "spoken"},
    {"spend", "spends", "spending", "spent", "spent"},
    {"spin", "spins", "spinning", "spun", "spun"},
    {"split", "splits", "splitting", "split", "split"},
    {"spread", "spreads", "spreading", "spread", "spread"},
    {"stand", "stands", "standing", "stood", "stood"},
    {"steal", "steals", "stealing", "stole", "stolen"},
    {"stick", "sticks", "sticking", "stuck", "stuck"},
    {"sting", "stings", "stinging", "stung", "stung"},
    {"strike", "strikes", "striking", "struck", "struck"},
    {"swear", "swears", "swearing", "swore", "sworn"},
    {"sweep", "sweeps", "sweeping", "swept", "swept"},
    {"swim", "swims", "swimming", "swam", "swum"},
    {"swing", "swings", "swinging", "swung", "swung"},
    {"take", "takes", "taking", "took", "taken"},
    {"teach", "teaches", "teaching", "taught", "taught"},
    {"tear", "tears", "tearing", "tore", "torn"},
    {"tell", "tells", "telling", "told", "told"},
    {"think", "thinks", "thinking", "thought", "thought"},
    {"throw", "throws", "throwing", "threw", "thrown"},
    {"understand", "understands", "understanding", "understood", "understood"},
    {"wake", "wakes", "waking", "woke", "woken"},
    {"wear", "wears", "wearing", "wore", "worn"},
    {"win", "wins", "winning", "won", "won"},
    {"wind", "winds", "winding", "wound", "wound"},
    {"withdraw", "withdraws", "withdrawing", "withdrew", "withdrawn"},
    {"write", "writes", "writing", "wrote", "written"},
};

bool is_do_phrase(Misc m) {
  return m == Misc::do_something || m == Misc::doing_something ||
         m == Misc::be_doing_something || m == Misc::to_do_something;
}

bool is_object_placeholder(Misc m) { return m == Misc::someone || m == Misc::something; }

}  // namespace

// ---------------------------------------------------------------------------
// Lexicon / inflection

Lexicon Lexicon::builtin() {
  Lexicon lex;
  for (const auto& row : kIrregulars) lex.add({row[0], row[1], row[2], row[3], row[4]});
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open inflection lexicon " + path.string());
  Lexicon lex;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 5 || std::any_of(cols.begin(), cols.end(), [](auto& c) { return c.empty(); }))
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": expected 5 non-empty tab-separated forms");
    lex.add({cols[0], cols[1], cols[2], cols[3], cols[4]});
  }
  return lex;
}

std::vector<std::string> load_prepositions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open preposition list " + path.string());
  std::vector<std::string> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string word, prep;
    while (words >> word) {
      for (char& ch : word) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      prep += (prep.empty() ? "" : " ") + word;
    }
    if (prep.empty()) continue;
    if (std::find(out.begin(), out.end(), prep) != out.end())
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": duplicate preposition '" + prep + "'");
    out.push_back(prep);
  }
  if (out.empty()) throw ValidationError(path.string() + ": no prepositions");
  return out;
}

void Lexicon::add(InflectionTable entry) {
  std::string key = entry.stem;
  entries_[key] = std::move(entry);
}

const InflectionTable* Lexicon::find(std::string_view stem) const {
  auto it = entries_.find(stem);
  return it == entries_.end() ? nullptr : &it->second;
}

InflectionTable inflect(std::string_view stem_view, const Lexicon& lexicon) {
  if (const auto* entry = lexicon.find(stem_view)) return *entry;
  const std::string stem(stem_view);
  InflectionTable t;
  t.stem = stem;
  const auto ends = [&](std::string_view suffix) { return stem.ends_with(suffix); };
  const bool consonant_y = stem.size() >= 2 && stem.back() == 'y' && !is_vowel(stem[stem.size() - 2]);

  if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh") || ends("o"))
    t.present_singular_3rd = stem + "es";
  else if (consonant_y)
    t.present_singular_3rd = stem.substr(0, stem.size() - 1) + "ies";
  else
    t.present_singular_3rd = stem + "s";

  if (ends("ie"))
    t.present_participle = stem.substr(0, stem.size() - 2) + "ying";
  else if (ends("e") && !ends("ee") && !ends("ye") && !ends("oe") && stem.size() > 2)
    t.present_participle = stem.substr(0, stem.size() - 1) + "ing";
  else if (doubles_final_consonant(stem))
    t.present_participle = stem + stem.back() + "ing";
  else
    t.present_participle = stem + "ing";

  if (ends("e"))
    t.past = stem + "d";
  else if (consonant_y)
    t.past = stem.substr(0, stem.size() - 1) + "ied";
  else if (doubles_final_consonant(stem))
    t.past = stem + stem.back() + "ed";
  else
    t.past = stem + "ed";
  t.past_participle = t.past;
  return t;
}

// ---------------------------------------------------------------------------
// Automaton

QuestionAutomaton::QuestionAutomaton(std::vector<std::string> prepositions)
    : prepositions_(std::move(prepositions)) {
  to_do_licensed_by_prep_.push_back(false);  // empty preposition
  for (const auto& p : prepositions_)
    to_do_licensed_by_prep_.push_back(
        std::find(prepositions_.begin(), prepositions_.end(), p + " to") == prepositions_.end());

  // Enumerate reachable states, then mark co-reachable ones backwards by
  // slot index (all transitions go from slot k to slot k + 1).
  std::vector<std::set<AutomatonState>> layers(kNumSlots + 1);
  layers[0].insert(start());
  for (int k = 0; k < kNumSlots; ++k)
    for (const auto& s : layers[k])
      for (int c = 0; c < alphabet_size(k); ++c)
        for (const auto& next : step(s, c)) layers[k + 1].insert(next);
  for (const auto& s : layers[kNumSlots]) live_[s] = true;
  for (int k = kNumSlots - 1; k >= 0; --k) {
    for (const auto& s : layers[k]) {
      bool any = false;
      for (int c = 0; c < alphabet_size(k) && !any; ++c)
        for (const auto& next : step(s, c))
          if (live_[next]) {
            any = true;
            break;
          }
      live_[s] = any;
    }
  }
}

int QuestionAutomaton::alphabet_size(int slot_index) const {
  switch (static_cast<Slot>(slot_index)) {
    case Slot::wh: return kNumWh;
    case Slot::aux: return static_cast<int>(aux_vocabulary().size());
    case Slot::subj:
    case Slot::obj: return static_cast<int>(placeholder_vocabulary().size());
    case Slot::verb: return static_cast<int>(verb_slot_vocabulary().size());
    case Slot::prep: return static_cast<int>(prepositions_.size()) + 1;
    case Slot::misc: return kNumMisc;
  }
  return 0;
}

std::vector<AutomatonState> QuestionAutomaton::step(const AutomatonState& s, int code) const {
  if (s.slot_index >= kNumSlots || code < 0 || code >= alphabet_size(s.slot_index)) return {};
  AutomatonState n = s;
  n.slot_index = s.slot_index + 1;
  switch (static_cast<Slot>(s.slot_index)) {
    case Slot::wh: {
      const auto wh = static_cast<Wh>(code);
      n.wh_is_adjunct = wh != Wh::who && wh != Wh::what;
      break;
    }
    case Slot::aux:
      n.aux_class = aux_class(aux_vocabulary()[code]);
      break;
    case Slot::subj:
      n.subject_present = code != 0;
      if (!n.subject_present && (s.wh_is_adjunct || s.aux_class == AuxClass::do_)) return {};
      if (n.subject_present && s.aux_class == AuxClass::none) return {};
      break;
    case Slot::verb: {
      using C = AuxChain;
      using F = VerbForm;
      const VerbSlot v = verb_slot_vocabulary()[code];
      const auto is = [&](C c, F f) { return v.chain == c && v.form == f; };
      bool ok = false;
      switch (s.aux_class) {
        case AuxClass::do_: ok = is(C::none, F::stem); break;
        case AuxClass::be:
          ok = is(C::none, F::present_participle) || is(C::none, F::past_participle) ||
               is(C::being, F::past_participle);
          break;
        case AuxClass::have:
          ok = is(C::none, F::past_participle) || is(C::been, F::present_participle) ||
               is(C::been, F::past_participle);
          break;
        case AuxClass::modal:
          ok = is(C::none, F::stem) || is(C::be, F::present_participle) ||
               is(C::be, F::past_participle) || is(C::have, F::past_participle) ||
               is(C::have_been, F::present_participle) || is(C::have_been, F::past_participle);
          break;
        case AuxClass::none:
          ok = !s.subject_present && (is(C::none, F::past) || is(C::none, F::present_singular_3rd));
          break;
      }
      if (!ok) return {};
      const bool passive =
          v.form == F::past_participle &&
          (v.chain == C::be || v.chain == C::been || v.chain == C::being ||
           v.chain == C::have_been || (v.chain == C::none && s.aux_class == AuxClass::be));
      n.verb_voice = passive ? Voice::passive : Voice::active;
      break;
    }
    case Slot::obj:
      n.object_present = code != 0;
      break;
    case Slot::prep:
      n.prep_present = code != 0;
      n.to_do_licensed = to_do_licensed_by_prep_[code];
      break;
    case Slot::misc: {
      const auto m = static_cast<Misc>(code);
      if (s.verb_voice == Voice::passive && s.object_present && !s.prep_present && !is_do_phrase(m))
        return {};
      if (!s.prep_present && is_object_placeholder(m) && !s.object_present) return {};
      if (m == Misc::to_do_something && !s.to_do_licensed) return {};
      // the accepting state forgets everything but the slot index
      n = AutomatonState{};
      n.slot_index = kNumSlots;
      break;
    }
  }
  return {n};
}

std::vector<AutomatonState> QuestionAutomaton::run(std::span<const int> codes) const {
  std::vector<AutomatonState> current{start()};
  for (int code : codes) {
    std::set<AutomatonState> next;
    for (const auto& s : current)
      for (const auto& t : step(s, code)) next.insert(t);
    current.assign(next.begin(), next.end());
    if (current.empty()) break;
  }
  return current;
}

bool QuestionAutomaton::live(const AutomatonState& state) const {
  auto it = live_.find(state);
  return it != live_.end() && it->second;
}

// ---------------------------------------------------------------------------
// Argument positions

std::string_view to_string(ArgumentPosition p) {
  switch (p) {
    case ArgumentPosition::subject: return "subject";
    case ArgumentPosition::object: return "object";
    case ArgumentPosition::prep_object: return "prepObject";
    case ArgumentPosition::misc: return "misc";
    case ArgumentPosition::none: return "none";
  }
  return "none";
}

ArgumentPosition extracted_position(const QuestionSlots& q) {
  const bool passive = is_passive(q);
  if (q.wh == Wh::where)
    return q.subj != Placeholder::none && q.misc == Misc::none ? ArgumentPosition::misc
                                                                : ArgumentPosition::none;
  if (q.wh != Wh::who && q.wh != Wh::what) return ArgumentPosition::none;
  if (q.subj == Placeholder::none)
    return passive ? ArgumentPosition::object : ArgumentPosition::subject;
  if (q.obj == Placeholder::none)
    return passive ? ArgumentPosition::misc : ArgumentPosition::object;
  if (!q.prep.empty() && q.misc == Misc::none) return ArgumentPosition::prep_object;
  if (q.prep.empty() && q.misc == Misc::none) return ArgumentPosition::misc;
  return ArgumentPosition::none;
}

// ---------------------------------------------------------------------------
// Grammar

Grammar::Grammar(std::vector<std::string> prepositions)
    : prepositions_(prepositions), automaton_(std::move(prepositions)) {
  for (int k = 0; k < kNumSlots; ++k) {
    if (static_cast<Slot>(k) == Slot::verb) continue;
    for (int c = 0; c < vocabulary_size(static_cast<Slot>(k)); ++c)
      words_[k].push_back(slot_words(static_cast<Slot>(k), c, nullptr));
  }
}

int Grammar::vocabulary_size(Slot slot) const {
  return automaton_.alphabet_size(static_cast<int>(slot));
}

SlotCodes Grammar::encode(const QuestionSlots& q) const {
  if (!q.verb) throw ValidationError("question has no verb");
  SlotCodes c{};
  c[0] = static_cast<int>(q.wh);
  const auto& aux = aux_vocabulary();
  auto ai = std::find(aux.begin(), aux.end(), q.aux);
  if (ai == aux.end()) throw ValidationError("aux '" + q.aux + "' is not in the vocabulary");
  c[1] = static_cast<int>(ai - aux.begin());
  c[2] = static_cast<int>(q.subj);
  const auto& verbs = verb_slot_vocabulary();
  auto vi = std::find(verbs.begin(), verbs.end(), *q.verb);
  if (vi == verbs.end())
    throw ValidationError("verb slot (" + std::string(to_string(q.verb->chain)) + ", " +
                          std::string(to_string(q.verb->form)) + ") is not a legal combination");
  c[3] = static_cast<int>(vi - verbs.begin());
  c[4] = static_cast<int>(q.obj);
  if (q.prep.empty()) {
    c[5] = 0;
  } else {
    auto pi = std::find(prepositions_.begin(), prepositions_.end(), q.prep);
    if (pi == prepositions_.end())
      throw ValidationError("preposition '" + q.prep + "' is not in the vocabulary");
    c[5] = static_cast<int>(pi - prepositions_.begin()) + 1;
  }
  c[6] = static_cast<int>(q.misc);
  return c;
}

QuestionSlots Grammar::decode(const SlotCodes& c) const {
  for (int k = 0; k < kNumSlots; ++k)
    if (c[k] < 0 || c[k] >= vocabulary_size(static_cast<Slot>(k)))
      throw ValidationError("slot code out of range for " +
                            std::string(slot_name(static_cast<Slot>(k))));
  QuestionSlots q;
  q.wh = static_cast<Wh>(c[0]);
  q.aux = aux_vocabulary()[c[1]];
  q.subj = static_cast<Placeholder>(c[2]);
  q.verb = verb_slot_vocabulary()[c[3]];
  q.obj = static_cast<Placeholder>(c[4]);
  q.prep = c[5] == 0 ? std::string() : prepositions_[c[5] - 1];
  q.misc = static_cast<Misc>(c[6]);
  return q;
}

std::vector<std::string> Grammar::slot_words(Slot slot, int code,
                                             const InflectionTable* inf) const {
  std::string text;
  switch (slot) {
    case Slot::wh: text = wh_vocabulary()[code]; break;
    case Slot::aux: text = aux_vocabulary()[code]; break;
    case Slot::subj:
    case Slot::obj: text = placeholder_vocabulary()[code]; break;
    case Slot::verb: {
      const VerbSlot v = verb_slot_vocabulary()[code];
      text = std::string(to_string(v.chain));
      if (!text.empty()) text += ' ';
      text += inf ? inf->get(v.form) : "<" + std::string(to_string(v.form)) + ">";
      break;
    }
    case Slot::prep: text = code == 0 ? std::string() : prepositions_[code - 1]; break;
    case Slot::misc: text = misc_vocabulary()[code]; break;
  }
  return split_words(text);
}

std::string Grammar::value_text(Slot slot, int code, const InflectionTable* inf) const {
  if (code < 0 || code >= vocabulary_size(slot)) throw ValidationError("slot code out of range");
  std::string out;
  for (const auto& w : slot_words(slot, code, inf)) out += (out.empty() ? "" : " ") + w;
  return out;
}

std::string Grammar::value_name(Slot slot, int code) const {
  if (code < 0 || code >= vocabulary_size(slot)) throw ValidationError("slot code out of range");
  if (slot == Slot::verb) {
    const VerbSlot v = verb_slot_vocabulary()[code];
    return std::string(to_string(v.chain)) + ":" + std::string(to_string(v.form));
  }
  return value_text(slot, code);
}

int Grammar::code_from_name(Slot slot, std::string_view name) const {
  for (int c = 0; c < vocabulary_size(slot); ++c)
    if (value_name(slot, c) == name) return c;
  throw ValidationError("'" + std::string(name) + "' is not a value of slot " +
                        std::string(slot_name(slot)));
}

bool Grammar::accepts(const SlotCodes& codes) const {
  for (const auto& s : automaton_.run(codes))
    if (automaton_.accepting(s)) return true;
  return false;
}

bool Grammar::accepts(const QuestionSlots& q) const {
  if (!q.verb) return false;
  return accepts(encode(q));
}

std::vector<int> Grammar::autocomplete(std::span<const int> prefix) const {
  if (prefix.size() >= static_cast<std::size_t>(kNumSlots))
    throw ValidationError("prefix already fills every slot");
  const auto states = automaton_.run(prefix);
  const bool reachable =
      std::any_of(states.begin(), states.end(), [&](const auto& s) { return automaton_.live(s); });
  if (!reachable) throw ValidationError("prefix cannot be completed to a grammatical question");
  std::vector<int> out;
  const int k = static_cast<int>(prefix.size());
  for (int c = 0; c < automaton_.alphabet_size(k); ++c) {
    bool ok = false;
    for (const auto& s : states) {
      for (const auto& t : automaton_.step(s, c))
        if (automaton_.live(t)) ok = true;
      if (ok) break;
    }
    if (ok) out.push_back(c);
  }
  return out;
}

namespace {

enum class TenseKind { past, present, fixed };

struct Tense {
  TenseKind kind = TenseKind::past;
  std::string aux;  // fixed only
  VerbSlot verb;    // fixed only
};

std::string singular_aux(std::string_view aux) {
  const std::string_view a = positive_aux(aux);
  if (a == "are") return "is";
  if (a == "were") return "was";
  if (a == "have") return "has";
  if (a == "do") return "does";
  return std::string(a);
}

// Active-voice tense of a question, stripped of negation and agreement.
Tense tense_of(const QuestionSlots& q) {
  using C = AuxChain;
  using F = VerbForm;
  Tense t;
  const VerbSlot v = q.verb.value_or(VerbSlot{});
  const std::string aux = singular_aux(q.aux);
  switch (aux_class(q.aux)) {
    case AuxClass::none:
      t.kind = v.form == F::present_singular_3rd ? TenseKind::present : TenseKind::past;
      return t;
    case AuxClass::do_:
      t.kind = aux == "did" ? TenseKind::past : TenseKind::present;
      return t;
    case AuxClass::be:
      if (is_passive(q)) {
        t.kind = aux == "was" ? TenseKind::past : TenseKind::present;
        return t;
      }
      t.kind = TenseKind::fixed;
      t.aux = aux;
      t.verb = {C::none, F::present_participle};
      return t;
    case AuxClass::have:
      t.kind = TenseKind::fixed;
      t.aux = aux;
      t.verb = {C::none, F::past_participle};
      return t;
    case AuxClass::modal:
      t.kind = TenseKind::fixed;
      t.aux = aux;
      if (v.chain == C::be && v.form == F::past_participle)
        t.verb = {C::none, F::stem};
      else if (v.chain == C::have_been && v.form == F::past_participle)
        t.verb = {C::have, F::past_participle};
      else
        t.verb = v;
      return t;
  }
  return t;
}

Placeholder placeholder_for(Wh wh) {
  return wh == Wh::who ? Placeholder::someone : Placeholder::something;
}

Misc misc_for(Wh wh) { return wh == Wh::who ? Misc::someone : Misc::something; }

}  // namespace

std::vector<QuestionSlots> Grammar::auto_suggest(std::span<const QuestionSlots> prior) const {
  using P = ArgumentPosition;
  std::set<P> covered;
  std::set<P> revealed{P::subject};
  std::optional<Placeholder> obj_value;
  std::optional<std::pair<std::string, Misc>> prep_obj_frame;
  std::optional<std::pair<std::string, Misc>> misc_frame;

  for (const auto& q : prior) {
    const P extracted = extracted_position(q);
    if (extracted != P::none) {
      covered.insert(extracted);
      revealed.insert(extracted);
    }
    const bool passive = is_passive(q);
    if (q.obj != Placeholder::none && !passive) {
      revealed.insert(P::object);
      if (!obj_value) obj_value = q.obj;
    }
    if (extracted == P::object && !obj_value && q.wh != Wh::where) obj_value = placeholder_for(q.wh);
    if (!q.prep.empty() && is_object_placeholder(q.misc)) {
      revealed.insert(P::prep_object);
      if (!prep_obj_frame) prep_obj_frame = {q.prep, q.misc};
    } else if (q.misc != Misc::none) {
      revealed.insert(P::misc);
      if (!misc_frame) misc_frame = {q.prep, q.misc};
    }
    if (extracted == P::prep_object && !prep_obj_frame)
      prep_obj_frame = {q.prep, misc_for(q.wh)};
    if (extracted == P::misc && !misc_frame)
      misc_frame = {std::string(), q.wh == Wh::where ? Misc::somewhere : misc_for(q.wh)};
  }

  const Tense tense = prior.empty() ? Tense{} : tense_of(prior.front());
  std::vector<QuestionSlots> out;
  for (P position : {P::subject, P::object, P::prep_object, P::misc}) {
    if (!revealed.count(position) || covered.count(position)) continue;
    std::vector<Wh> whs = {Wh::who, Wh::what};
    if (position == P::misc) {
      if (!misc_frame || !misc_frame->first.empty()) continue;
      if (misc_frame->second == Misc::somewhere)
        whs = {Wh::where};
      else if (!is_object_placeholder(misc_frame->second))
        continue;
    }
    for (Wh wh : whs) {
      QuestionSlots q;
      q.wh = wh;
      q.subj = position == P::subject ? Placeholder::none : Placeholder::someone;
      if (position != P::object && revealed.count(P::object))
        q.obj = obj_value.value_or(Placeholder::something);
      if (position == P::prep_object) {
        q.prep = prep_obj_frame->first;
      } else if (position != P::misc && prep_obj_frame) {
        q.prep = prep_obj_frame->first;
        q.misc = prep_obj_frame->second;
      } else if (position != P::misc && misc_frame) {
        q.prep = misc_frame->first;
        q.misc = misc_frame->second;
      }
      const bool subject_question = position == P::subject;
      switch (tense.kind) {
        case TenseKind::past:
          q.aux = subject_question ? "" : "did";
          q.verb = subject_question ? VerbSlot{AuxChain::none, VerbForm::past}
                                    : VerbSlot{AuxChain::none, VerbForm::stem};
          break;
        case TenseKind::present:
          q.aux = subject_question ? "" : "does";
          q.verb = subject_question ? VerbSlot{AuxChain::none, VerbForm::present_singular_3rd}
                                    : VerbSlot{AuxChain::none, VerbForm::stem};
          break;
        case TenseKind::fixed:
          q.aux = tense.aux;
          q.verb = tense.verb;
          break;
      }
      if (!accepts(q) || extracted_position(q) != position) continue;
      if (std::find(prior.begin(), prior.end(), q) != prior.end()) continue;
      if (std::find(out.begin(), out.end(), q) != out.end()) continue;
      out.push_back(std::move(q));
    }
  }
  return out;
}

std::string Grammar::render(const QuestionSlots& q, const InflectionTable& inflections) const {
  const SlotCodes codes = encode(q);
  std::string out;
  for (int k = 0; k < kNumSlots; ++k)
    for (const auto& w : slot_words(static_cast<Slot>(k), codes[k], &inflections))
      out += (out.empty() ? "" : " ") + w;
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out + "?";
}

QuestionSlots Grammar::parse(std::string_view question, const InflectionTable& inflections) const {
  std::string text(question);
  while (!text.empty() && (text.back() == '?' || std::isspace(static_cast<unsigned char>(text.back()))))
    text.pop_back();
  if (!text.empty()) text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
  const std::vector<std::string> words = split_words(text);

  // Depth-first over slot values; the automaton prunes dead prefixes.
  std::vector<std::vector<std::string>> verb_words;
  for (int c = 0; c < vocabulary_size(Slot::verb); ++c)
    verb_words.push_back(slot_words(Slot::verb, c, &inflections));
  SlotCodes codes{};
  std::optional<SlotCodes> found;
  auto search = [&](auto&& self, int slot, std::size_t pos, const AutomatonState& state) -> void {
    if (found) return;
    if (slot == kNumSlots) {
      if (pos == words.size() && automaton_.accepting(state)) found = codes;
      return;
    }
    const auto& values = static_cast<Slot>(slot) == Slot::verb ? verb_words : words_[slot];
    for (int c = 0; c < static_cast<int>(values.size()) && !found; ++c) {
      const auto& value = values[c];
      if (pos + value.size() > words.size()) continue;
      if (!std::equal(value.begin(), value.end(), words.begin() + static_cast<long>(pos))) continue;
      const auto next = automaton_.step(state, c);
      if (next.empty() || !automaton_.live(next.front())) continue;
      codes[slot] = c;
      self(self, slot + 1, pos + value.size(), next.front());
    }
  };
  search(search, 0, 0, automaton_.start());
  if (!found)
    throw ValidationError("'" + std::string(question) + "' is not a question of the slot grammar");
  return decode(*found);
}

}  // namespace qasrl
