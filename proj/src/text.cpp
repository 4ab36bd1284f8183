#include "congen/text.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <string>
#include <unordered_set>

#include "congen/assets.hpp"
#include "unicode.hpp"

namespace congen {
namespace {

bool ascii_ieq(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto x = static_cast<unsigned char>(a[i]);
    auto y = static_cast<unsigned char>(b[i]);
    if (x >= 'A' && x <= 'Z') x += 32;
    if (y >= 'A' && y <= 'Z') y += 32;
    if (x != y) return false;
  }
  return true;
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view p) {
  return pos + p.size() <= s.size() && ascii_ieq(s.substr(pos, p.size()), p);
}

std::size_t end_of_line(std::string_view s, std::size_t pos) {
  const auto nl = s.find('\n', pos);
  return nl == std::string_view::npos ? s.size() : nl;
}

// Step 1. Nesting-aware {{...}} removal. Stray "}}" are dropped too.
std::string drop_templates(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "{{") == 0) {
      int depth = 0;
      std::size_t j = i;
      bool closed = false;
      while (j < s.size()) {
        if (s.compare(j, 2, "{{") == 0) {
          ++depth;
          j += 2;
        } else if (s.compare(j, 2, "}}") == 0) {
          --depth;
          j += 2;
          if (depth == 0) {
            closed = true;
            break;
          }
        } else {
          ++j;
        }
      }
      i = closed ? j : end_of_line(s, i);
    } else if (s.compare(i, 2, "}}") == 0) {
      i += 2;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// Step 2. <ref>..</ref>, comments, then every other tag.
std::string drop_tags(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      out.push_back(s[i++]);
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      const auto end = s.find("-->", i + 4);
      i = end == std::string_view::npos ? end_of_line(s, i) : end + 3;
      continue;
    }
    if (starts_with_ci(s, i, "<ref") &&
        (i + 4 == s.size() || s[i + 4] == '>' || s[i + 4] == ' ' ||
         s[i + 4] == '/' || s[i + 4] == '\t' || s[i + 4] == '\n')) {
      const auto gt = s.find('>', i);
      if (gt == std::string_view::npos) {
        i = end_of_line(s, i);
        continue;
      }
      if (s[gt - 1] == '/') {  // <ref name="x"/>
        i = gt + 1;
        continue;
      }
      // Case-insensitive search for the closing tag.
      std::size_t j = gt + 1;
      std::size_t close = std::string_view::npos;
      while (j + 6 <= s.size()) {
        if (starts_with_ci(s, j, "</ref>")) {
          close = j;
          break;
        }
        ++j;
      }
      i = close == std::string_view::npos ? end_of_line(s, i) : close + 6;
      continue;
    }
    const bool tag_like =
        i + 1 < s.size() &&
        (std::isalpha(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '/' ||
         s[i + 1] == '!');
    if (!tag_like) {
      out.push_back(s[i++]);
      continue;
    }
    const auto eol = end_of_line(s, i);
    const auto gt = s.find('>', i);
    i = (gt == std::string_view::npos || gt > eol) ? eol : gt + 1;
  }
  return out;
}

bool is_heading(std::string_view line) {
  return line.size() >= 2 && line.front() == '=' && line.back() == '=';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Line structure: headings and table rows go, list markers are stripped.
std::string filter_lines(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto eol = end_of_line(s, pos);
    auto line = trim(s.substr(pos, eol - pos));
    while (!line.empty() && (line.front() == '*' || line.front() == '#' ||
                             line.front() == ':' || line.front() == ';')) {
      line.remove_prefix(1);
    }
    line = trim(line);
    const bool table = !line.empty() && (line.front() == '|' ||
                                         line.front() == '!' ||
                                         line.substr(0, 2) == "{|");
    if (!table && !is_heading(line)) {
      out.append(line);
    }
    out.push_back('\n');
    pos = eol + 1;
  }
  return out;
}

bool is_dropped_namespace(std::string_view target) {
  while (!target.empty() && (target.front() == ' ' || target.front() == ':')) {
    target.remove_prefix(1);
  }
  for (std::string_view ns : {"file:", "image:", "category:"}) {
    if (target.size() >= ns.size() && ascii_ieq(target.substr(0, ns.size()), ns)) {
      return true;
    }
  }
  return false;
}

std::string replace_links(std::string_view s);

// Renders the inside of one [[...]] link.
std::string render_link(std::string_view inner) {
  if (is_dropped_namespace(inner)) return {};
  // First '|' outside nested brackets separates target from anchor.
  int depth = 0;
  std::size_t bar = std::string_view::npos;
  for (std::size_t k = 0; k < inner.size(); ++k) {
    if (inner.compare(k, 2, "[[") == 0) {
      ++depth;
      ++k;
    } else if (inner.compare(k, 2, "]]") == 0) {
      --depth;
      ++k;
    } else if (inner[k] == '|' && depth == 0) {
      bar = k;
      break;
    }
  }
  if (bar == std::string_view::npos) return replace_links(inner);
  auto anchor = inner.substr(bar + 1);
  if (trim(anchor).empty()) return replace_links(inner.substr(0, bar));
  return replace_links(anchor);
}

// Step 3. Wikilinks, nesting-aware. Stray "]]" are dropped.
std::string replace_links(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "[[") == 0) {
      int depth = 0;
      std::size_t j = i;
      bool closed = false;
      while (j < s.size()) {
        if (s.compare(j, 2, "[[") == 0) {
          ++depth;
          j += 2;
        } else if (s.compare(j, 2, "]]") == 0) {
          --depth;
          j += 2;
          if (depth == 0) {
            closed = true;
            break;
          }
        } else {
          ++j;
        }
      }
      if (!closed) {
        i = end_of_line(s, i);
        continue;
      }
      out += render_link(s.substr(i + 2, j - i - 4));
      i = j;
    } else if (s.compare(i, 2, "]]") == 0) {
      i += 2;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

bool is_url_start(std::string_view s, std::size_t pos) {
  for (std::string_view scheme : {"http://", "https://", "ftp://", "//"}) {
    if (starts_with_ci(s, pos, scheme)) return true;
  }
  return false;
}

// Step 4. [url label] -> label, [url] -> nothing.
std::string replace_external_links(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '[' && is_url_start(s, i + 1)) {
      const auto eol = end_of_line(s, i);
      const auto close = s.find(']', i);
      if (close == std::string_view::npos || close > eol) {
        i = eol;
        continue;
      }
      const auto inner = s.substr(i + 1, close - i - 1);
      const auto space = inner.find_first_of(" \t");
      if (space != std::string_view::npos) out.append(inner.substr(space + 1));
      i = close + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// Step 5. Runs of two or more apostrophes are emphasis markup.
std::string drop_emphasis(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '\'') {
      std::size_t j = i;
      while (j < s.size() && s[j] == '\'') ++j;
      if (j - i == 1) out.push_back('\'');
      i = j;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

std::string replace_all(std::string s, std::string_view from,
                        std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

const std::unordered_set<std::string>& abbreviation_set() {
  static const std::unordered_set<std::string> set = [] {
    std::unordered_set<std::string> s;
    for (auto& a : assets::lines(assets::abbreviations())) s.insert(a);
    return s;
  }();
  return set;
}

bool is_closing_punct(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U')' || cp == U']' ||
         cp == U'”' || cp == U'’';
}

bool is_opening_punct(char32_t cp) {
  return cp == U'"' || cp == U'(' || cp == U'“' || cp == U'\'';
}

// Word immediately before `end` (exclusive), without leading punctuation.
std::string_view word_before(std::string_view s, std::size_t end) {
  std::size_t start = end;
  while (start > 0 && s[start - 1] != ' ' && s[start - 1] != '\t' &&
         s[start - 1] != '\n') {
    --start;
  }
  auto w = s.substr(start, end - start);
  while (!w.empty() && (w.front() == '(' || w.front() == '"' ||
                        w.front() == '\'' || w.front() == '[')) {
    w.remove_prefix(1);
  }
  return w;
}

bool suppresses_split(std::string_view word) {
  if (word.empty()) return false;
  const auto lowered = to_lower(word);
  if (abbreviation_set().count(lowered) != 0) return true;
  // Single-letter initial, e.g. "J. Smith".
  const auto d = unicode::decode(word, 0);
  return d.len == word.size() && unicode::is_upper(d.cp);
}

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto d = unicode::decode(text, i);
    if (d.valid) {
      unicode::append_utf8(out, unicode::lower(d.cp));
    } else {
      out.push_back(text[i]);
    }
    i += d.len;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  bool apostrophe_used = false;
  std::size_t i = 0;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
    apostrophe_used = false;
  };
  while (i < text.size()) {
    const auto d = unicode::decode(text, i);
    if (d.valid && unicode::is_alnum(d.cp)) {
      unicode::append_utf8(cur, unicode::lower(d.cp));
    } else if (d.valid && unicode::is_apostrophe(d.cp) && !cur.empty() &&
               !apostrophe_used && i + d.len < text.size()) {
      const auto next = unicode::decode(text, i + d.len);
      if (next.valid && unicode::is_alnum(next.cp)) {
        cur.push_back('\'');
        apostrophe_used = true;
      } else {
        flush();
      }
    } else {
      flush();
    }
    i += d.len;
  }
  flush();
  return tokens;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  auto emit = [&](std::size_t end) {
    auto s = collapse_whitespace(text.substr(start, end - start));
    if (!s.empty()) out.push_back(std::move(s));
    start = end;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    const std::size_t term_begin = i;
    std::size_t j = i;
    while (j < text.size() &&
           (text[j] == '.' || text[j] == '!' || text[j] == '?')) {
      ++j;
    }
    const bool single_period = (j - term_begin == 1) && c == '.';
    while (j < text.size()) {
      const auto d = unicode::decode(text, j);
      if (!d.valid || !is_closing_punct(d.cp)) break;
      j += d.len;
    }
    const std::size_t sent_end = j;
    std::size_t k = j;
    bool saw_space = false;
    while (k < text.size()) {
      const auto d = unicode::decode(text, k);
      if (!d.valid || !unicode::is_space(d.cp)) break;
      saw_space = true;
      k += d.len;
    }
    bool next_ok = false;
    if (saw_space && k < text.size()) {
      auto d = unicode::decode(text, k);
      if (d.valid && is_opening_punct(d.cp) && k + d.len < text.size()) {
        d = unicode::decode(text, k + d.len);
      }
      next_ok = d.valid && (unicode::is_upper(d.cp) ||
                            (d.cp >= U'0' && d.cp <= U'9'));
    }
    if (next_ok && single_period &&
        suppresses_split(word_before(text, term_begin))) {
      next_ok = false;
    }
    if (next_ok) emit(sent_end);
    i = sent_end > i ? sent_end : i + 1;
  }
  emit(text.size());
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto d = unicode::decode(text, i);
    if (d.valid && unicode::is_space(d.cp)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.append(text.substr(i, d.len));
    }
    i += d.len;
  }
  return out;
}

bool contains_markup(std::string_view text) {
  for (std::string_view m : {"[[", "]]", "{{", "}}"}) {
    if (text.find(m) != std::string_view::npos) return true;
  }
  for (std::size_t i = 0; i + 4 <= text.size(); ++i) {
    if (starts_with_ci(text, i, "<ref")) return true;
  }
  return false;
}

namespace {

std::string strip_pass(std::string_view wikitext) {
  auto s = drop_templates(wikitext);
  s = drop_tags(s);
  s = filter_lines(s);
  s = replace_links(s);
  s = replace_external_links(s);
  s = drop_emphasis(s);
  s = replace_all(std::move(s), "&nbsp;", " ");
  s = collapse_whitespace(s);
  // Earlier removals can juxtapose bracket halves; no marker may survive.
  while (contains_markup(s)) {
    for (std::string_view m : {"[[", "]]", "{{", "}}"}) s = replace_all(s, m, "");
    for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
      if (starts_with_ci(s, i, "<ref")) s.erase(i, 4);
    }
    s = collapse_whitespace(s);
  }
  return s;
}

}  // namespace

std::string strip_markup(std::string_view wikitext) {
  // A pass can expose new markup (a leading '|' once a link is gone), so
  // repeat to a fixed point. Passes never grow the text.
  auto s = strip_pass(wikitext);
  for (int i = 0; i < 16; ++i) {
    auto next = strip_pass(s);
    if (next == s) break;
    s = std::move(next);
  }
  return s;
}

}  // namespace congen
