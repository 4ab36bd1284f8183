#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "congen/bm25.hpp"
#include "congen/concepts.hpp"
#include "congen/jsonl.hpp"
#include "congen/sentence.hpp"
#include "congen/tagger.hpp"

namespace congen {

/// Concepts -> sentence training pair.
struct ReconRecord {
  ConceptSet concepts;
  std::string text;
  SentenceRef source;

  bool operator==(const ReconRecord&) const = default;
};

struct ReconSummary {
  std::uint64_t sentences = 0;
  std::uint64_t emitted = 0;
  std::uint64_t skipped = 0;     // fewer than two concepts
  std::uint64_t subsampled = 0;  // more than max_concepts, reduced
};

/// Keeps `max_concepts` of `concepts`, chosen by a generator seeded from the
/// sentence's provenance so the choice is reproducible without shared state.
ConceptSet subsample_concepts(const ConceptSet& concepts, std::size_t max_concepts,
                              std::uint64_t doc_id, std::uint32_t sent_idx);

/// One record per sentence with at least two concepts, in input order.
/// max_concepts must lie in [2, 5].
std::vector<ReconRecord> build_recon(std::span<const CleanSentence> sentences,
                                     const PerceptronModel& model,
                                     std::size_t max_concepts,
                                     ReconSummary* summary = nullptr);
std::vector<ReconRecord> build_recon_serial(std::span<const CleanSentence> sentences,
                                            const PerceptronModel& model,
                                            std::size_t max_concepts,
                                            ReconSummary* summary = nullptr);

/// CommonGen-style JSON-lines: {"concepts": [str, ...], "target": ...}.
/// Concepts are lowercased, deduplicated and sorted per line.
std::vector<ConceptSet> load_commongen(std::istream& in);
std::vector<ConceptSet> load_commongen(const std::filesystem::path& path);

/// All 2-subsets of the input sets, deduplicated and sorted.
std::vector<ConceptSet> enumerate_pairs(std::span<const ConceptSet> sets);

/// Distinct input sets of size 3 to 5, sorted. Other sizes are dropped and
/// counted in `dropped`.
std::vector<ConceptSet> enumerate_sets(std::span<const ConceptSet> sets,
                                       std::size_t* dropped = nullptr);

struct AugmentationStats {
  std::uint64_t n_sentences = 0;
  std::map<std::size_t, std::uint64_t> per_size;

  bool operator==(const AugmentationStats&) const = default;
};

AugmentationStats augmentation_stats(std::span<const ConceptSet> records);
/// Counts records of any JSON-lines file carrying a "concepts" array.
AugmentationStats augmentation_stats(std::istream& jsonl);

/// Augmentation counts published for the CommonGen training split.
struct ReferenceCounts {
  static constexpr std::uint64_t kPairs = 59'125;
  static constexpr std::uint64_t kSets = 32'471;
  static constexpr std::uint64_t kSize3 = 24'891;
  static constexpr std::uint64_t kSize4 = 4'206;
  static constexpr std::uint64_t kSize5 = 3'374;
  static constexpr std::uint64_t kPairsPlusSets = 91'596;
};

/// {"concepts": [...]}
Json concepts_json(const ConceptSet& c);
/// {"concepts": [...], "text": ...}
Json to_json(const ReconRecord& r);
ConceptSet concepts_from_json(const Json& j, std::uint64_t line = 0);

}  // namespace congen
