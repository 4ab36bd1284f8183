#pragma once

#include <string>
#include <string_view>
#include <vector>

// Data files under data/ compiled into the library.
namespace congen::assets {

std::string_view lemma_exceptions_tsv();
std::string_view aux_stoplist();
std::string_view abbreviations();
std::string_view stub_verbs();
std::string_view stub_nouns();

/// Non-empty, non-comment lines of a bundled list, trimmed.
std::vector<std::string> lines(std::string_view text);

}  // namespace congen::assets
