#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "congen/concepts.hpp"
#include "congen/jsonl.hpp"
#include "congen/tagger.hpp"

namespace congen {

struct GenRequest {
  ConceptSet concepts;
  int max_tokens = 32;
  int num_candidates = 1;

  /// Throws Error unless 2 <= |concepts| <= 5, max_tokens >= |concepts| and
  /// num_candidates >= 1.
  void validate() const;
};

Json to_json(const GenRequest& r);

struct SemiGoldenRecord {
  ConceptSet concepts;
  std::string text;
  double coverage = 0.0;
  std::string generator_id;

  bool operator==(const SemiGoldenRecord&) const = default;
};

Json to_json(const SemiGoldenRecord& r);
SemiGoldenRecord semi_golden_from_json(const Json& j, std::uint64_t line = 0);

class Generator {
 public:
  virtual ~Generator() = default;
  /// Exactly request.num_candidates sentences. Must be callable from several
  /// threads at once.
  virtual std::vector<std::string> generate(const GenRequest& request) = 0;
  virtual std::string id() const = 0;
};

/// Template sentence holding every concept. Concepts found in the bundled
/// verb list fill verb slots (third person), the rest fill noun slots.
/// The seed picks the subject noun and the location phrase.
std::string stub_generate(const ConceptSet& concepts, std::uint64_t seed);

/// Candidate i uses seed + i.
class StubGenerator : public Generator {
 public:
  explicit StubGenerator(std::uint64_t seed = 0) : seed_(seed) {}
  std::vector<std::string> generate(const GenRequest& request) override;
  std::string id() const override { return "stub"; }

 private:
  std::uint64_t seed_;
};

struct HttpOptions {
  std::chrono::milliseconds timeout{30'000};
  int attempts = 3;
  std::chrono::milliseconds backoff{200};  // doubled after each failure
};

/// Client for the generation service:
///   POST {endpoint}/v1/generate {"concepts":[..],"max_tokens":n,"num_candidates":n}
///     -> 200 {"sentences":[..]}
///   GET  {endpoint}/v1/health -> 200 {"status":"ok"}
/// Connection failures, timeouts, 429 and 5xx are retried; anything else
/// malformed is a GeneratorError quoting the response.
class HttpGenerator : public Generator {
 public:
  explicit HttpGenerator(std::string endpoint, HttpOptions options = {});

  std::vector<std::string> generate(const GenRequest& request) override;
  std::string id() const override { return "http:" + endpoint_; }
  bool healthy();

 private:
  std::string endpoint_;
  std::string host_;    // scheme://host:port
  std::string prefix_;  // path prefix without trailing slash
  HttpOptions options_;
};

/// Parses a /v1/generate response body. Throws GeneratorError when the body
/// is not {"sentences":[str,...]} with `expected` entries.
std::vector<std::string> parse_generate_response(std::string_view body,
                                                 std::size_t expected);

/// Fraction of concepts found in the sentence. A concept is found when it
/// equals a token or the token's lemma under the model's tags; without a
/// model the tag-free lemma is used.
double coverage(const ConceptSet& concepts, std::string_view sentence,
                const PerceptronModel* model);

struct AssembleOptions {
  double threshold = 0.99;
  std::size_t in_flight = 4;
  int max_tokens = 32;
  int num_candidates = 1;
};

struct AssembleSummary {
  std::uint64_t queries = 0;    // queries attempted
  std::uint64_t written = 0;
  std::uint64_t rejected = 0;   // best candidate below threshold
  std::uint64_t failed = 0;     // generator errors
  double mean_coverage = 0.0;   // over queries that produced candidates

  bool operator==(const AssembleSummary&) const = default;
};

Json to_json(const AssembleSummary& s);

/// Generates for every query, keeps the best candidate (highest coverage,
/// then shortest) when it reaches the threshold and hands it to `sink` in
/// query order. Failing queries are logged and skipped.
AssembleSummary assemble(std::span<const ConceptSet> queries, Generator& generator,
                         const PerceptronModel* model, const AssembleOptions& options,
                         const std::function<void(const SemiGoldenRecord&)>& sink);

/// Index of the first query still to run given the records already written:
/// one past the query matching the last record, 0 when there is none.
std::size_t resume_position(std::span<const ConceptSet> queries,
                            std::span<const SemiGoldenRecord> written);

}  // namespace congen
