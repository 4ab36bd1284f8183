#pragma once

#include <compare>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "congen/sentence.hpp"
#include "congen/tagger.hpp"

namespace congen {

/// Sorted, duplicate-free list of lowercase lemmas.
class ConceptSet {
 public:
  ConceptSet() = default;
  explicit ConceptSet(std::vector<std::string> concepts);
  ConceptSet(std::initializer_list<std::string> concepts)
      : ConceptSet(std::vector<std::string>(concepts)) {}

  const std::vector<std::string>& concepts() const { return concepts_; }
  std::size_t size() const { return concepts_.size(); }
  bool empty() const { return concepts_.empty(); }
  bool contains(std::string_view c) const;

  auto begin() const { return concepts_.begin(); }
  auto end() const { return concepts_.end(); }

  /// "a b c"
  std::string joined(char sep = ' ') const;

  auto operator<=>(const ConceptSet&) const = default;
  bool operator==(const ConceptSet&) const = default;

 private:
  std::vector<std::string> concepts_;
};

/// Lemmas of every token under the tags the model assigns.
std::vector<std::string> lemmatized_tokens(const PerceptronModel& model,
                                           std::span<const std::string> tokens);

/// Tags the tokens and keeps NOUN/VERB lemmas, minus auxiliaries and
/// single-character lemmas. Empty when the sentence has no content word.
ConceptSet extract_concepts(const PerceptronModel& model,
                            std::span<const std::string> tokens);
inline ConceptSet extract_concepts(const PerceptronModel& model,
                                   const CleanSentence& s) {
  return extract_concepts(model, s.tokens);
}

/// Per-sentence extraction over a batch (OpenMP kernel and serial reference).
std::vector<ConceptSet> extract_concepts_batch(
    const PerceptronModel& model, std::span<const CleanSentence> sentences);
std::vector<ConceptSet> extract_concepts_batch_serial(
    const PerceptronModel& model, std::span<const CleanSentence> sentences);

}  // namespace congen
