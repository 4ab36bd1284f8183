#pragma once

// UTF-8 decoding and character classes. Classification goes through the
// C library's UTF-8 locale so that letters outside ASCII are handled.

#include <cstddef>
#include <string>
#include <string_view>

namespace congen::unicode {

struct Decoded {
  char32_t cp;
  std::size_t len;  // bytes consumed, >= 1
  bool valid;
};

/// Decodes the code point starting at `pos`. Invalid sequences consume one
/// byte and report valid=false.
Decoded decode(std::string_view s, std::size_t pos);

void append_utf8(std::string& out, char32_t cp);

bool is_alnum(char32_t cp);
bool is_upper(char32_t cp);
bool is_space(char32_t cp);
char32_t lower(char32_t cp);

inline bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'\u2019'; }

}  // namespace congen::unicode
