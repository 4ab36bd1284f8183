#include "congen/concepts.hpp"

#include <algorithm>

#include <omp.h>

#include "congen/lemmatizer.hpp"
#include "unicode.hpp"

namespace congen {

ConceptSet::ConceptSet(std::vector<std::string> concepts)
    : concepts_(std::move(concepts)) {
  std::sort(concepts_.begin(), concepts_.end());
  concepts_.erase(std::unique(concepts_.begin(), concepts_.end()),
                  concepts_.end());
}

bool ConceptSet::contains(std::string_view c) const {
  return std::binary_search(concepts_.begin(), concepts_.end(), c);
}

std::string ConceptSet::joined(char sep) const {
  std::string out;
  for (std::size_t i = 0; i < concepts_.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += concepts_[i];
  }
  return out;
}

std::vector<std::string> lemmatized_tokens(const PerceptronModel& model,
                                           std::span<const std::string> tokens) {
  const auto tags = tag(model, tokens);
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.push_back(lemmatize(tokens[i], tags[i]));
  }
  return out;
}

ConceptSet extract_concepts(const PerceptronModel& model,
                            std::span<const std::string> tokens) {
  const auto tags = tag(model, tokens);
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tags[i] != PosTag::kNoun && tags[i] != PosTag::kVerb) continue;
    if (is_auxiliary(tokens[i])) continue;
    auto lemma = lemmatize(tokens[i], tags[i]);
    if (is_auxiliary(lemma)) continue;
    // Single code point lemmas carry no content.
    if (lemma.empty() || unicode::decode(lemma, 0).len == lemma.size()) continue;
    kept.push_back(std::move(lemma));
  }
  return ConceptSet(std::move(kept));
}

std::vector<ConceptSet> extract_concepts_batch_serial(
    const PerceptronModel& model, std::span<const CleanSentence> sentences) {
  std::vector<ConceptSet> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(extract_concepts(model, s));
  return out;
}

std::vector<ConceptSet> extract_concepts_batch(
    const PerceptronModel& model, std::span<const CleanSentence> sentences) {
  std::vector<ConceptSet> out(sentences.size());
  const auto n = static_cast<std::int64_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = extract_concepts(model, sentences[k]);
  }
  return out;
}

}  // namespace congen
