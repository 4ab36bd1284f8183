#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "congen/concepts.hpp"
#include "congen/jsonl.hpp"
#include "congen/tagger.hpp"

namespace congen {

using Tokens = std::vector<std::string>;

struct EvalInstance {
  std::string id;
  Tokens hypothesis;
  std::vector<Tokens> references;  // non-empty
  std::string hypothesis_text;     // untokenized, for coverage
  ConceptSet concepts;
};

enum class Exec { kParallel, kSerial };

// Corpus-level scores. All throw Error on an empty instance list.

/// Corpus BLEU-4: pooled clipped n-gram counts, uniform weights, no
/// smoothing, brevity penalty against the closest reference length (the
/// shorter one on ties).
double bleu4(std::span<const EvalInstance> instances);

/// LCS F1, max over references, mean over instances.
double rouge_l(std::span<const EvalInstance> instances, Exec exec = Exec::kParallel);
double rouge_l_instance(const Tokens& hyp, std::span<const Tokens> refs);

/// METEOR with exact and stem stages only. F = 10PR / (R + 9P),
/// penalty 0.5 * (chunks / matches)^3. Max over references, mean over
/// instances.
double meteor(std::span<const EvalInstance> instances, Exec exec = Exec::kParallel);
double meteor_instance(const Tokens& hyp, std::span<const Tokens> refs);

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
};
/// Greedy left-to-right alignment: per stage, each hypothesis token takes the
/// reference position continuing the previous token's match if it can, else
/// the leftmost free one.
MeteorAlignment meteor_align(const Tokens& hyp, const Tokens& ref);

/// CIDEr: tf-idf cosine for n = 1..4 with document frequencies over the
/// reference sets of this corpus, mean over references, times 10/4 summed
/// over n; mean over instances. One-instance corpora score 0.
double cider(std::span<const EvalInstance> instances, Exec exec = Exec::kParallel);
std::vector<double> cider_instances(std::span<const EvalInstance> instances,
                                    Exec exec = Exec::kParallel);

struct MetricReport {
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;
  double cider = 0.0;
  double coverage = 0.0;  // reported where SPICE would be
  std::size_t n = 0;
};

/// All metrics plus mean concept coverage of the hypotheses.
MetricReport evaluate(std::span<const EvalInstance> instances,
                      const PerceptronModel* model = nullptr);

/// Joins hypothesis lines {"id","concepts","hypothesis"} with reference lines
/// {"id","references"} by id, in hypothesis-file order.
std::vector<EvalInstance> load_eval_instances(const std::filesystem::path& hyp_file,
                                              const std::filesystem::path& ref_file);
MetricReport evaluate(const std::filesystem::path& hyp_file,
                      const std::filesystem::path& ref_file,
                      const PerceptronModel* model = nullptr);

Json to_json(const MetricReport& r);
MetricReport report_from_json(const Json& j);
/// Aligned plain-text table with a header noting the metric variants.
std::string format_table(const MetricReport& r);

}  // namespace congen
