#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "congen/bm25.hpp"
#include "congen/jsonl.hpp"
#include "congen/sentence.hpp"

namespace congen {

namespace fs = std::filesystem;

/// Everything a pipeline run needs. Empty paths are unset.
struct PipelineConfig {
  fs::path dump;
  fs::path sentences;
  fs::path index;
  fs::path treebank;
  fs::path dev_treebank;
  fs::path model;
  fs::path commongen;
  fs::path extracted;
  fs::path recon;
  fs::path pairs;
  fs::path sets;
  fs::path queries;
  fs::path semi_golden;
  fs::path hypotheses;
  fs::path references;
  fs::path report;

  Bm25Params bm25;
  SentenceFilter filter;
  std::size_t min_match = 2;
  std::size_t max_concepts = 5;
  std::size_t per_set_limit = 0;  // 0 keeps every concept-matched sentence
  double threshold = 0.99;
  std::string endpoint;
  bool stub = false;
  std::uint64_t seed = 13;
  int epochs = 5;
  std::size_t in_flight = 4;
  int max_tokens = 32;
  int num_candidates = 1;
};

enum class Stage {
  kIngest,
  kIndex,
  kSearch,
  kTrainTagger,
  kExtractConcepts,
  kBuildRecon,
  kEnumerate,
  kGenerate,
  kEvaluate,
  kStats,
};

std::string stage_name(Stage s);

struct StageFile {
  std::string key;
  fs::path path;
};

/// The files a stage reads and writes under `cfg`. Throws ConfigError naming
/// the first required setting that is unset.
struct StagePlan {
  Stage stage;
  std::vector<StageFile> inputs;
  std::vector<StageFile> outputs;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerateRequest {
  bool pairs = false;
  bool sets = false;
};

StagePlan plan_stage(Stage s, const PipelineConfig& cfg,
                     const EnumerateRequest& enumerate = {});
/// Human-readable plan printed by --dry-run.
std::string describe_plan(const StagePlan& plan);
/// Throws ConfigError if an input is missing, naming the stage producing it.
void check_inputs(const StagePlan& plan);

// Stage runners. Each validates its plan, reads only the inputs and writes
// only the outputs listed there, and returns a JSON summary.
Json run_ingest(const PipelineConfig& cfg);
Json run_index(const PipelineConfig& cfg);
Json run_train_tagger(const PipelineConfig& cfg);
Json run_extract_concepts(const PipelineConfig& cfg);
Json run_build_recon(const PipelineConfig& cfg);
Json run_enumerate(const PipelineConfig& cfg, const EnumerateRequest& what);
Json run_generate(const PipelineConfig& cfg);
Json run_evaluate(const PipelineConfig& cfg, std::string* table = nullptr);

struct SearchRequest {
  std::string query;
  std::size_t k = 10;
  bool concepts = false;  // concept-match extraction instead of ranked search
};
/// One line per hit: rank, score, doc_id, sent_idx and text when the
/// sentence file is configured.
std::string run_search(const PipelineConfig& cfg, const SearchRequest& req);

/// Statistics for any JSON-lines file of concept records.
Json run_stats(const std::vector<fs::path>& files, bool compare_reference);

}  // namespace congen
