#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace congen {

/// Lowercases UTF-8 text code point by code point. Invalid bytes pass through.
std::string to_lower(std::string_view text);

/// Splits text into lowercase word tokens: maximal runs of letters and digits,
/// keeping one internal apostrophe ("don't", "dog's"). Everything else,
/// hyphens included, separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Sentence splitting on ., ! and ? when followed by whitespace and an
/// uppercase letter or digit. A period after a known abbreviation or a single
/// capital initial does not split. Sentences are returned trimmed.
std::vector<std::string> segment_sentences(std::string_view text);

/// Reduces wikitext to plain text with a fixed rule cascade:
///   1. {{templates}} (nesting-aware) removed
///   2. <ref>..</ref>, comments and every remaining tag removed
///   3. [[target|anchor]] -> anchor, [[target]] -> target; File/Image/Category
///      links removed
///   4. [http://url label] -> label
///   5. '' and ''' emphasis quotes removed
///   6. whitespace collapsed
/// Heading lines and table rows are dropped and list markers stripped before
/// the cascade. An unterminated construct swallows the rest of its line.
std::string strip_markup(std::string_view wikitext);

/// Collapses whitespace runs to one space and trims both ends.
std::string collapse_whitespace(std::string_view text);

/// True if text contains any of the markers that must not survive stripping.
bool contains_markup(std::string_view text);

}  // namespace congen
