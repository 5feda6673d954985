#include "econet/event_tagger.hpp"

#include <fstream>
#include <stdexcept>

#include "econet/text.hpp"

namespace econet {

namespace {

// Base forms of common news-domain event verbs. Irregular past forms are
// listed directly; regular inflections are reached by suffix stripping.
const char* const kVerbForms[] = {
    "accept", "accuse", "acquire", "act", "agree", "announce", "apologize", "appoint", "approve",
    "arrest", "arrive", "attack", "award", "ban", "begin", "began", "begun", "blame", "block",
    "bomb", "boost", "break", "broke", "broken", "breach", "bring", "brought", "build", "built",
    "burn", "buy", "bought", "call", "cancel", "capture", "carry", "cause", "celebrate", "charge",
    "choose", "chose", "claim", "climb", "close", "collapse", "collide", "come", "came", "complete",
    "confirm", "convict", "copy", "crash", "create", "cut", "debate", "decide", "declare",
    "decline", "defeat", "demand", "deny", "depart", "describe", "destroy", "die", "died",
    "disappear", "discover", "discuss", "dismiss", "dissolve", "drop", "elect", "emerge", "end",
    "erupt", "escape", "evacuate", "expand", "expel", "explode", "fail", "fall", "fell", "fallen",
    "fight", "fought", "find", "found", "fine", "finish", "fire", "flee", "fled", "fly", "flew",
    "gather", "give", "gave", "given", "go", "went", "gone", "grow", "grew", "grown", "halt",
    "harvest", "hire", "hit", "hold", "held", "hurt", "impose", "improve", "increase", "injure",
    "invade", "invest", "investigate", "join", "jump", "kidnap", "kill", "launch", "lead", "led",
    "leak", "leave", "left", "lift", "lose", "lost", "march", "meet", "met", "merge", "mislead",
    "misled", "mourn", "move", "negotiate", "occur", "offer", "open", "order", "pass", "pay",
    "paid", "perform", "plan", "plunge", "prepare", "promise", "propose", "protest", "publish",
    "purchase", "quit", "raid", "raise", "rally", "reach", "rebuild", "receive", "recover",
    "reduce", "refuse", "reject", "release", "repair", "replace", "report", "rescue", "resign",
    "resume", "retire", "retreat", "return", "reveal", "rise", "rose", "risen", "rule", "run",
    "ran", "say", "said", "search", "seize", "sell", "sold", "send", "sent", "sentence", "settle",
    "shoot", "shot", "shut", "sign", "sink", "sank", "sunk", "speak", "spoke", "spoken", "spend",
    "spent", "start", "steal", "stole", "stolen", "stop", "strike", "struck", "submit", "sue",
    "suffer", "surrender", "suspend", "take", "took", "taken", "talk", "tell", "told", "testify",
    "threaten", "transfer", "travel", "treat", "try", "urge", "visit", "vote", "wait", "warn",
    "win", "won", "withdraw", "withdrew", "withdrawn", "write", "wrote", "written",
};

// Deverbal/event nouns whose surface differs from any verb base form.
const char* const kNounForms[] = {
    "agreement", "announcement", "arrival", "assassination", "bombing", "ceasefire", "collision",
    "death", "departure", "destruction", "election", "explosion", "funeral", "invasion",
    "investigation", "killing", "meeting", "merger", "negotiation", "resignation", "retirement",
    "robbery", "shooting", "trial", "wedding", "withdrawal",
};

}  // namespace

EventTagger::EventTagger(TemporalLexicon lexicon) : lexicon_(std::move(lexicon)) {}

EventTagger EventTagger::with_default_lexicon() { return with_lexicon(TemporalLexicon::load_default()); }

EventTagger EventTagger::with_lexicon(TemporalLexicon lexicon) {
  EventTagger tagger(std::move(lexicon));
  for (const char* v : kVerbForms) tagger.verb_forms_.insert(v);
  for (const char* n : kNounForms) tagger.noun_forms_.insert(n);
  return tagger;
}

void EventTagger::extend_verbs_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open event lexicon file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    verb_forms_.insert(to_lower(line));
  }
}

void EventTagger::add_verb_forms(std::span<const std::string> forms) {
  for (const auto& f : forms) verb_forms_.insert(to_lower(f));
}

void EventTagger::add_noun_forms(std::span<const std::string> forms) {
  for (const auto& f : forms) noun_forms_.insert(to_lower(f));
}

bool EventTagger::is_trigger_word(const std::string& t) const {
  if (t.size() < 2) return false;
  if (verb_forms_.count(t) || noun_forms_.count(t)) return true;
  const size_t n = t.size();
  auto in_verbs = [&](std::string s) { return verb_forms_.count(s) != 0; };
  auto ends_with = [&](std::string_view suf) {
    return n >= suf.size() && std::string_view(t).substr(n - suf.size()) == suf;
  };
  // One suffix rule application, mirroring regular inflection.
  if (ends_with("ies") && n >= 5 && in_verbs(t.substr(0, n - 3) + "y")) return true;
  if (ends_with("ied") && n >= 5 && in_verbs(t.substr(0, n - 3) + "y")) return true;
  if (ends_with("es") && n >= 4 && in_verbs(t.substr(0, n - 2))) return true;
  if (ends_with("s") && !ends_with("ss") && n >= 3 && in_verbs(t.substr(0, n - 1))) return true;
  if (ends_with("ed") && n >= 4) {
    if (in_verbs(t.substr(0, n - 2))) return true;       // jumped -> jump
    if (in_verbs(t.substr(0, n - 1))) return true;       // moved -> move
    if (n >= 5 && t[n - 3] == t[n - 4] && in_verbs(t.substr(0, n - 3))) return true;  // stopped -> stop
  }
  if (ends_with("ing") && n >= 5) {
    if (in_verbs(t.substr(0, n - 3))) return true;        // fighting -> fight
    if (in_verbs(t.substr(0, n - 3) + "e")) return true;  // leaving -> leave
    if (n >= 6 && t[n - 4] == t[n - 5] && in_verbs(t.substr(0, n - 4))) return true;  // running -> run
  }
  return false;
}

std::vector<TriggerSpan> EventTagger::tag(std::span<const std::string> tokens) const {
  return tag(tokens, lexicon_.find_indicators(tokens));
}

std::vector<TriggerSpan> EventTagger::tag(std::span<const std::string> tokens,
                                          std::span<const IndicatorMatch> indicator_matches) const {
  std::vector<bool> excluded(tokens.size(), false);
  for (const auto& m : indicator_matches)
    for (int k = m.begin; k < m.end && k < (int)tokens.size(); ++k) excluded[k] = true;
  std::vector<TriggerSpan> triggers;
  for (int i = 0; i < (int)tokens.size(); ++i) {
    if (excluded[i]) continue;
    std::string lower = to_lower(tokens[i]);
    if (is_trigger_word(lower)) triggers.push_back({i, tokens[i]});
  }
  return triggers;
}

}  // namespace econet
