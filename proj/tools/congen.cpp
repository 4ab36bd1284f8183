// congen: concept-to-text augmentation pipeline driver.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "congen/error.hpp"
#include "congen/pipeline.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("congen");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("CONGEN_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept real names.
    if (level != spdlog::level::off || std::string(env) == "off") {
      spdlog::set_level(level);
    } else {
      spdlog::warn("ignoring unknown CONGEN_LOG level '{}'", env);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  using congen::Stage;

  CLI::App app{"congen - concept-to-text augmentation pipeline"};
  app.set_config("--config", "", "TOML file of settings; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  congen::PipelineConfig cfg;
  int threads = 0;
  bool dry_run = false;

  auto* paths = "Paths";
  app.add_option("--dump", cfg.dump, "MediaWiki XML dump (.xml, .bz2, .gz)")->group(paths);
  app.add_option("--sentences", cfg.sentences, "Sentence JSON-lines")->group(paths);
  app.add_option("--index", cfg.index, "BM25 index file")->group(paths);
  app.add_option("--treebank", cfg.treebank, "Tagged training corpus")->group(paths);
  app.add_option("--dev-treebank,--dev_treebank", cfg.dev_treebank, "Tagged dev corpus")->group(paths);
  app.add_option("--model", cfg.model, "Tagger model file")->group(paths);
  app.add_option("--commongen", cfg.commongen, "CommonGen-style training JSON-lines")->group(paths);
  app.add_option("--extracted", cfg.extracted, "Concept-matched sentences")->group(paths);
  app.add_option("--recon", cfg.recon, "Reconstruction records output")->group(paths);
  app.add_option("--pairs-file,--pairs_file", cfg.pairs, "Concept-pair queries")->group(paths);
  app.add_option("--sets-file,--sets_file", cfg.sets, "Concept-set queries")->group(paths);
  app.add_option("--queries", cfg.queries, "Generation queries (default: pairs and sets)")->group(paths);
  app.add_option("--semi-golden,--semi_golden", cfg.semi_golden, "Generated records output")->group(paths);
  app.add_option("--hypotheses", cfg.hypotheses, "Hypothesis JSON-lines")->group(paths);
  app.add_option("--references", cfg.references, "Reference JSON-lines")->group(paths);
  app.add_option("--report", cfg.report, "Metric report output (JSON)")->group(paths);

  app.add_option("--k1", cfg.bm25.k1, "BM25 k1")->capture_default_str();
  app.add_option("--b", cfg.bm25.b, "BM25 b")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app.add_option("--min-tokens,--min_tokens", cfg.filter.min_tokens, "Shortest kept sentence")->capture_default_str();
  app.add_option("--max-tokens,--max_tokens", cfg.filter.max_tokens, "Longest kept sentence")->capture_default_str();
  app.add_option("--min-match,--min_match", cfg.min_match, "Concepts a sentence must contain")
      ->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-concepts,--max_concepts", cfg.max_concepts, "Concept cap per record")
      ->capture_default_str()->check(CLI::Range(2, 5));
  app.add_option("--per-set-limit,--per_set_limit", cfg.per_set_limit, "Sentences kept per concept set, 0 = all")
      ->capture_default_str();
  app.add_option("--threshold", cfg.threshold, "Coverage a generated sentence needs")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app.add_option("--endpoint", cfg.endpoint, "Generation service URL");
  app.add_flag("--stub", cfg.stub, "Use the built-in template generator");
  app.add_option("--seed", cfg.seed, "Seed for training and the stub")->capture_default_str();
  app.add_option("--epochs", cfg.epochs, "Tagger training epochs")->capture_default_str();
  app.add_option("--in-flight,--in_flight", cfg.in_flight, "Concurrent generation requests")
      ->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--gen-max-tokens,--gen_max_tokens", cfg.max_tokens, "max_tokens sent to the generator")
      ->capture_default_str();
  app.add_option("--num-candidates,--num_candidates", cfg.num_candidates, "Candidates per query")
      ->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "Worker thread cap (0 = OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--dry-run,--dry_run", dry_run, "Print the execution plan and exit");

  auto* ingest = app.add_subcommand("ingest", "Dump -> cleaned sentences");
  auto* index = app.add_subcommand("index", "Sentences -> BM25 index");

  congen::SearchRequest search_req;
  auto* search = app.add_subcommand("search", "Query the index");
  search->add_option("query", search_req.query, "Query text")->required();
  search->add_option("-k", search_req.k, "Hits to print")->capture_default_str();
  search->add_flag("--concepts", search_req.concepts,
                   "Treat the query as a concept set and apply --min-match");

  auto* train = app.add_subcommand("train-tagger", "Treebank -> tagger model");
  auto* extract = app.add_subcommand("extract-concepts",
                                     "Keep sentences matching CommonGen concept sets");
  auto* recon = app.add_subcommand("build-recon", "Sentences -> concept/sentence records");

  congen::EnumerateRequest enum_req;
  auto* enumerate = app.add_subcommand("enumerate", "CommonGen sets -> pair and set queries");
  enumerate->add_flag("--pairs", enum_req.pairs, "Write 2-subsets to the pairs file");
  enumerate->add_flag("--sets", enum_req.sets, "Write 3-5 sets to the sets file");

  auto* generate = app.add_subcommand("generate", "Queries -> semi-golden sentences");
  auto* evaluate = app.add_subcommand("evaluate", "Score hypotheses against references");

  std::vector<congen::fs::path> stats_files;
  bool stats_reference = false;
  auto* stats = app.add_subcommand("stats", "Count records per concept-set size");
  stats->add_option("files", stats_files, "JSON-lines files with a concepts field")->required();
  stats->add_flag("--published", stats_reference, "Also print the published counts");

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) omp_set_num_threads(threads);

  const std::vector<std::pair<CLI::App*, Stage>> stages = {
      {ingest, Stage::kIngest},          {index, Stage::kIndex},
      {search, Stage::kSearch},          {train, Stage::kTrainTagger},
      {extract, Stage::kExtractConcepts}, {recon, Stage::kBuildRecon},
      {enumerate, Stage::kEnumerate},    {generate, Stage::kGenerate},
      {evaluate, Stage::kEvaluate},      {stats, Stage::kStats}};
  Stage stage = Stage::kStats;
  for (const auto& [sub, s] : stages) {
    if (sub->parsed()) stage = s;
  }

  try {
    if (dry_run) {
      if (stage == Stage::kStats) {
        std::cout << "stage: stats\n";
        for (const auto& f : stats_files) std::cout << "  read   " << f.string() << "\n";
      } else {
        std::cout << congen::describe_plan(congen::plan_stage(stage, cfg, enum_req));
      }
      return 0;
    }
    congen::Json summary;
    switch (stage) {
      case Stage::kIngest: summary = congen::run_ingest(cfg); break;
      case Stage::kIndex: summary = congen::run_index(cfg); break;
      case Stage::kSearch: std::cout << congen::run_search(cfg, search_req); return 0;
      case Stage::kTrainTagger: summary = congen::run_train_tagger(cfg); break;
      case Stage::kExtractConcepts: summary = congen::run_extract_concepts(cfg); break;
      case Stage::kBuildRecon: summary = congen::run_build_recon(cfg); break;
      case Stage::kEnumerate: summary = congen::run_enumerate(cfg, enum_req); break;
      case Stage::kGenerate: summary = congen::run_generate(cfg); break;
      case Stage::kEvaluate: {
        std::string table;
        summary = congen::run_evaluate(cfg, &table);
        std::cout << table;
        return 0;
      }
      case Stage::kStats: summary = congen::run_stats(stats_files, stats_reference); break;
    }
    std::cout << congen::dump_json(summary) << "\n";
  } catch (const congen::ConfigError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{} failed: {}", congen::stage_name(stage), e.what());
    return 1;
  }
  return 0;
}
