#pragma once

#include <string>
#include <string_view>

#include "congen/tagger.hpp"

namespace congen {

/// Rule lemmatizer. Nouns: -s/-es/-ies. Verbs: -s/-es/-ies, -ing and -ed with
/// doubled-consonant and silent-e handling. The bundled exception table is
/// consulted first; other tags pass through. The rules are applied until the
/// result stops changing, so lemmatize is idempotent.
std::string lemmatize(std::string_view token, PosTag tag);

/// Tag-free lemma used where no tagger output exists: a listed irregular
/// form under either tag, else the verb reading if it changes the word,
/// otherwise the noun reading.
std::string lemmatize_any(std::string_view token);

/// True for the auxiliary verbs excluded from concept sets.
bool is_auxiliary(std::string_view word);

}  // namespace congen
