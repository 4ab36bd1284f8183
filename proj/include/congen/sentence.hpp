#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "congen/dump.hpp"
#include "congen/jsonl.hpp"

namespace congen {

struct CleanSentence {
  std::uint64_t doc_id = 0;
  std::uint32_t sent_idx = 0;
  std::string text;
  std::vector<std::string> tokens;

  bool operator==(const CleanSentence&) const = default;
};

/// Token-count bounds applied to segmented sentences.
struct SentenceFilter {
  std::size_t min_tokens = 3;
  std::size_t max_tokens = 64;
};

/// Strip, segment, tokenize and filter one document. `sent_idx` is the
/// segment's position in the document before filtering.
std::vector<CleanSentence> document_sentences(const RawDocument& doc,
                                              const SentenceFilter& filter);

/// Batch form over many documents, output in input order. The parallel kernel
/// distributes documents over OpenMP threads; the serial one is the reference.
std::vector<CleanSentence> ingest_documents(std::span<const RawDocument> docs,
                                            const SentenceFilter& filter);
std::vector<CleanSentence> ingest_documents_serial(
    std::span<const RawDocument> docs, const SentenceFilter& filter);

Json to_json(const CleanSentence& s);
CleanSentence sentence_from_json(const Json& j, std::uint64_t line = 0);

/// Streams CleanSentences from a JSON-lines file.
class SentenceReader {
 public:
  explicit SentenceReader(std::istream& in) : reader_(in) {}
  std::optional<CleanSentence> next();

 private:
  JsonlReader reader_;
};

std::vector<CleanSentence> read_sentences(const std::filesystem::path& path);

}  // namespace congen
