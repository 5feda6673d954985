#include "econet/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "econet/text.hpp"

namespace econet {

namespace {

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string w;
  for (char c : text) {
    if (c == ' ') {
      if (!w.empty()) words.push_back(w);
      w.clear();
    } else {
      w.push_back(c);
    }
  }
  if (!w.empty()) words.push_back(w);
  return words;
}

std::string normalize(std::string_view raw) {
  auto words = split_words(raw);
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += to_lower(words[i]);
  }
  return out;
}

}  // namespace

TemporalLexicon TemporalLexicon::load_default() {
  return from_entries({
      {"before", {"before", "until", "previous to", "prior to", "preceding", "followed by"}},
      {"after", {"after", "following", "since", "now that", "soon after", "once"}},
      {"during", {"during", "while", "when", "at the time", "at the same time", "meanwhile"}},
      {"past", {"earlier", "previously", "formerly", "yesterday", "in the past", "last time"}},
      {"future", {"consequently", "subsequently", "in turn", "henceforth", "later", "then"}},
      {"beginning", {"initially", "originally", "at the beginning", "to begin", "starting with", "to start with"}},
      {"ending", {"finally", "in the end", "at last", "lastly"}},
  });
}

TemporalLexicon TemporalLexicon::from_entries(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& categories) {
  TemporalLexicon lex;
  for (const auto& [name, members] : categories) {
    int cat = static_cast<int>(lex.category_names_.size());
    lex.category_names_.push_back(name);
    lex.members_.emplace_back();
    for (const auto& raw : members) {
      Entry e;
      e.text = normalize(raw);
      e.words = split_words(e.text);
      e.category = cat;
      if (e.words.empty()) throw std::invalid_argument("empty indicator in category '" + name + "'");
      lex.members_.back().push_back(e.text);
      lex.entries_.push_back(std::move(e));
    }
  }
  lex.index_entries();
  lex.validate();
  return lex;
}

TemporalLexicon TemporalLexicon::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
  std::vector<std::pair<std::string, std::vector<std::string>>> cats;
  std::unordered_map<std::string, size_t> cat_index;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("lexicon file " + path + " line " + std::to_string(line_no) +
                               ": expected 'category<TAB>indicator'");
    std::string cat = to_lower(line.substr(0, tab));
    std::string ind = line.substr(tab + 1);
    auto [it, inserted] = cat_index.try_emplace(cat, cats.size());
    if (inserted) cats.push_back({cat, {}});
    cats[it->second].second.push_back(ind);
  }
  return from_entries(cats);
}

void TemporalLexicon::index_entries() {
  for (int id = 0; id < static_cast<int>(entries_.size()); ++id) {
    const Entry& e = entries_[id];
    by_first_word_[e.words.front()].push_back(id);
    id_by_text_.emplace(e.text, id);
    max_words_ = std::max(max_words_, static_cast<int>(e.words.size()));
  }
  // Longest candidates first per head word, stable on lexicon order.
  for (auto& [_, ids] : by_first_word_) {
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
      return entries_[a].words.size() > entries_[b].words.size();
    });
  }
}

void TemporalLexicon::validate() const {
  if (id_by_text_.size() != entries_.size())
    throw std::invalid_argument("duplicate indicator string across categories");
  for (const Entry& e : entries_) {
    for (const auto& w : e.words) {
      if (w.empty()) throw std::invalid_argument("indicator with empty word");
      for (char c : w)
        if (c == ' ' || (c >= 'A' && c <= 'Z'))
          throw std::invalid_argument("indicator not lowercase/single-spaced: " + e.text);
    }
  }
}

int TemporalLexicon::id_of(std::string_view indicator_text) const {
  auto it = id_by_text_.find(std::string(indicator_text));
  return it == id_by_text_.end() ? -1 : it->second;
}

std::vector<IndicatorMatch> TemporalLexicon::find_indicators(std::span<const std::string> tokens) const {
  const int n = static_cast<int>(tokens.size());
  if (n == 0) return {};
  std::vector<std::string> lower(n);
  for (int i = 0; i < n; ++i) lower[i] = to_lower(tokens[i]);

  // Gather every candidate window match.
  struct Candidate {
    int begin, end, id;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < n; ++i) {
    auto it = by_first_word_.find(lower[i]);
    if (it == by_first_word_.end()) continue;
    for (int id : it->second) {
      const Entry& e = entries_[id];
      const int len = static_cast<int>(e.words.size());
      if (i + len > n) continue;
      bool ok = true;
      for (int k = 1; k < len && ok; ++k)
        ok = lower[i + k] == e.words[k];
      if (ok) candidates.push_back({i, i + len, id});
    }
  }

  // Longest-match-first, leftmost on ties, then drop overlaps.
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    int la = a.end - a.begin, lb = b.end - b.begin;
    if (la != lb) return la > lb;
    return a.begin < b.begin;
  });
  std::vector<bool> taken(n, false);
  std::vector<Candidate> chosen;
  for (const Candidate& c : candidates) {
    bool free = true;
    for (int k = c.begin; k < c.end && free; ++k) free = !taken[k];
    if (!free) continue;
    for (int k = c.begin; k < c.end; ++k) taken[k] = true;
    chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(), [](const Candidate& a, const Candidate& b) { return a.begin < b.begin; });

  std::vector<IndicatorMatch> matches;
  matches.reserve(chosen.size());
  for (const Candidate& c : chosen) {
    IndicatorMatch m;
    m.begin = c.begin;
    m.end = c.end;
    std::string surface;
    for (int k = c.begin; k < c.end; ++k) {
      if (k > c.begin) surface.push_back(' ');
      surface += tokens[k];
    }
    m.surface = std::move(surface);
    m.category_id = entries_[c.id].category;
    m.category = category_names_[m.category_id];
    m.lexicon_id = c.id;
    matches.push_back(std::move(m));
  }
  return matches;
}

}  // namespace econet
