#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "congen/concepts.hpp"
#include "congen/sentence.hpp"

namespace congen {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;

  bool operator==(const Bm25Params&) const = default;
};

struct Posting {
  std::uint32_t ordinal;
  std::uint32_t tf;

  bool operator==(const Posting&) const = default;
};

struct SentenceRef {
  std::uint64_t doc_id;
  std::uint32_t sent_idx;

  bool operator==(const SentenceRef&) const = default;
};

struct ScoredHit {
  std::uint32_t ordinal;
  double score;

  bool operator==(const ScoredHit&) const = default;
};

/// Ranking order: higher score first, lower ordinal on ties.
inline bool ranks_before(const ScoredHit& a, const ScoredHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.ordinal < b.ordinal;
}

/// Immutable Okapi BM25 index over sentences. Ordinals are positions in the
/// build input. IDF is ln((N - df + 0.5) / (df + 0.5) + 1), positive for every
/// df in [1, N].
///
/// On disk: "CGFI", u16 version, then tagged sections (params, stats, term
/// dictionary front-coded, postings delta+varint, id map), little-endian.
class Bm25Index {
 public:
  /// Shards the input by ordinal range across OpenMP threads and merges.
  static Bm25Index build(std::span<const CleanSentence> sentences,
                         const Bm25Params& params = {});
  /// Single-threaded reference build; produces an identical index.
  static Bm25Index build_serial(std::span<const CleanSentence> sentences,
                                const Bm25Params& params = {});

  const Bm25Params& params() const { return params_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(doc_lengths_.size()); }
  double avgdl() const { return avgdl_; }
  std::uint64_t total_length() const { return total_length_; }
  const std::vector<std::string>& terms() const { return terms_; }

  std::optional<std::uint32_t> term_id(std::string_view term) const;
  std::span<const Posting> postings(std::uint32_t term) const {
    return postings_[term];
  }
  std::uint32_t df(std::string_view term) const;
  std::uint32_t doc_length(std::uint32_t ordinal) const {
    return doc_lengths_[ordinal];
  }
  const SentenceRef& ref(std::uint32_t ordinal) const { return id_map_[ordinal]; }

  double idf(std::uint32_t df) const;

  /// Query terms are deduplicated; absent terms contribute nothing.
  double score(std::span<const std::string> query, std::uint32_t ordinal) const;

  /// Top-k by score over all sentences with a positive score. The default
  /// kernel splits the ordinal space across OpenMP threads.
  std::vector<ScoredHit> search(std::span<const std::string> query,
                                std::size_t k) const;
  std::vector<ScoredHit> search_serial(std::span<const std::string> query,
                                       std::size_t k) const;

  /// Sentences whose lemma set holds at least `min_match` of the concepts,
  /// best BM25 match (concepts as the query) first. A token's lemma set is
  /// its noun and verb lemmas.
  std::vector<ScoredHit> concept_match(const ConceptSet& concepts,
                                       std::size_t min_match) const;

  /// Violated structural invariants, empty when the index is consistent.
  std::vector<std::string> check_invariants() const;

  std::string serialize() const;
  static Bm25Index deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static Bm25Index load(const std::filesystem::path& path);

 private:
  void finish();  // builds lookup tables, doc lengths and stats

  Bm25Params params_;
  std::vector<std::string> terms_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<std::uint32_t> doc_lengths_;
  std::vector<SentenceRef> id_map_;
  std::uint64_t total_length_ = 0;
  double avgdl_ = 0.0;

  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> lemma_terms_;
};

// Free-function spellings of the index operations.
inline Bm25Index build_index(std::span<const CleanSentence> sentences,
                             const Bm25Params& params = {}) {
  return Bm25Index::build(sentences, params);
}
inline double bm25_score(const Bm25Index& index,
                         std::span<const std::string> query,
                         std::uint32_t ordinal) {
  return index.score(query, ordinal);
}
inline std::vector<ScoredHit> search(const Bm25Index& index,
                                     std::span<const std::string> query,
                                     std::size_t k) {
  return index.search(query, k);
}
std::vector<std::uint32_t> concept_match_extract(const Bm25Index& index,
                                                 const ConceptSet& concepts,
                                                 std::size_t min_match);

}  // namespace congen
