#include "congen/lemmatizer.hpp"

#include <map>
#include <optional>
#include <unordered_set>
#include <utility>

#include "congen/assets.hpp"

namespace congen {
namespace {

using ExceptionTable = std::map<std::pair<PosTag, std::string>, std::string,
                                std::less<>>;

const ExceptionTable& exceptions() {
  static const ExceptionTable table = [] {
    ExceptionTable t;
    for (const auto& line : assets::lines(assets::lemma_exceptions_tsv())) {
      const auto a = line.find('\t');
      const auto b = line.find('\t', a + 1);
      if (a == std::string::npos || b == std::string::npos) continue;
      const auto tag = parse_tag(line.substr(a + 1, b - a - 1));
      if (!tag) continue;
      t[{*tag, line.substr(0, a)}] = line.substr(b + 1);
    }
    return t;
  }();
  return table;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool is_consonant(char c) {
  return c >= 'a' && c <= 'z' && !is_vowel(c);
}

bool has_vowel(std::string_view s) {
  for (char c : s) {
    if (is_vowel(c) || c == 'y') return true;
  }
  return false;
}

bool needs_silent_e(std::string_view stem) {
  const auto n = stem.size();
  if (n < 2) return false;
  const char last = stem[n - 1];
  const char prev = stem[n - 2];
  if (last == 'v' || last == 'c' || last == 'u') return true;
  if (last == 'l' && std::string_view("bcdfgkptz").find(prev) != std::string_view::npos) {
    return true;
  }
  if (last == 'z' && (prev == 'i' || prev == 'y')) return true;
  if (last == 'g' && (prev == 'r' || prev == 'd')) return true;
  if (n >= 4 && (last == 's') && (prev == 'a' || prev == 'o')) return true;
  if (n >= 4 && last == 'd' && prev == 'i' && is_consonant(stem[n - 3])) {
    return true;
  }
  if (n >= 5 && last == 't' && prev == 'a' && is_consonant(stem[n - 3])) {
    return true;
  }
  // Short stems: "us" -> use, "mak" -> make, "rid" -> ride.
  if (n == 2) return is_vowel(prev) && is_consonant(last) && last != 'w' &&
                     last != 'x' && last != 'y';
  if (n == 3) {
    return is_consonant(stem[0]) && is_vowel(prev) && is_consonant(last) &&
           last != 'w' && last != 'x' && last != 'y';
  }
  return false;
}

// Repairs a verb stem left by stripping -ing / -ed.
std::string fix_stem(std::string_view stem) {
  const auto n = stem.size();
  if (n >= 4 && stem[n - 1] == stem[n - 2] && is_consonant(stem[n - 1]) &&
      std::string_view("lszf").find(stem[n - 1]) == std::string_view::npos) {
    return std::string(stem.substr(0, n - 1));
  }
  if (needs_silent_e(stem)) return std::string(stem) + "e";
  return std::string(stem);
}

// Shared -s / -es / -ies handling; returns nullopt when no plural or
// third-person suffix applies.
std::optional<std::string> strip_s(std::string_view w, bool verb) {
  const auto n = w.size();
  if (ends_with(w, "ies")) {
    if (n > 4) return std::string(w.substr(0, n - 3)) + "y";
    return std::string(w.substr(0, n - 1));
  }
  for (std::string_view es : {"sses", "xes", "ches", "shes", "zzes"}) {
    if (ends_with(w, es)) return std::string(w.substr(0, n - 2));
  }
  if (verb && ends_with(w, "oes") && n > 3) {
    return std::string(w.substr(0, n - 2));
  }
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) {
    return std::nullopt;
  }
  if (ends_with(w, "s") && n > 3) return std::string(w.substr(0, n - 1));
  return std::nullopt;
}

std::string rule_step(std::string_view w, PosTag tag) {
  if (auto it = exceptions().find(std::make_pair(tag, std::string(w)));
      it != exceptions().end()) {
    return it->second;
  }
  if (ends_with(w, "'s")) return std::string(w.substr(0, w.size() - 2));
  if (ends_with(w, "s'")) return std::string(w.substr(0, w.size() - 1));
  const auto n = w.size();
  if (tag == PosTag::kNoun) {
    if (auto s = strip_s(w, false)) return *s;
    return std::string(w);
  }
  // Verb.
  if (ends_with(w, "n't") && n > 3) return std::string(w.substr(0, n - 3));
  if (auto s = strip_s(w, true)) return *s;
  if (ends_with(w, "ing") && n >= 5) {
    const auto stem = w.substr(0, n - 3);
    if (has_vowel(stem)) return fix_stem(stem);
    return std::string(w);
  }
  if (ends_with(w, "ied")) {
    if (n > 4) return std::string(w.substr(0, n - 3)) + "y";
    return std::string(w.substr(0, n - 1));
  }
  if (ends_with(w, "eed")) return std::string(w);
  if (ends_with(w, "ed") && n >= 4) {
    const auto stem = w.substr(0, n - 2);
    if (has_vowel(stem)) return fix_stem(stem);
  }
  return std::string(w);
}

}  // namespace

std::string lemmatize(std::string_view token, PosTag tag) {
  if (tag != PosTag::kNoun && tag != PosTag::kVerb) return std::string(token);
  std::string cur(token);
  for (int i = 0; i < 32; ++i) {
    auto next = rule_step(cur, tag);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

std::string lemmatize_any(std::string_view token) {
  // Listed irregular forms win over suffix rules of the other reading.
  for (PosTag t : {PosTag::kVerb, PosTag::kNoun}) {
    if (auto it = exceptions().find(std::make_pair(t, std::string(token)));
        it != exceptions().end()) {
      return lemmatize(token, t);
    }
  }
  auto v = lemmatize(token, PosTag::kVerb);
  if (v != token) return v;
  return lemmatize(token, PosTag::kNoun);
}

bool is_auxiliary(std::string_view word) {
  static const std::unordered_set<std::string> set = [] {
    std::unordered_set<std::string> s;
    for (auto& w : assets::lines(assets::aux_stoplist())) s.insert(w);
    return s;
  }();
  return set.count(std::string(word)) != 0;
}

}  // namespace congen
