#include "congen/pipeline.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "congen/dataset.hpp"
#include "congen/dump.hpp"
#include "congen/error.hpp"
#include "congen/generator.hpp"
#include "congen/metrics.hpp"
#include "congen/tagger.hpp"
#include "congen/text.hpp"

namespace congen {
namespace {

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

const fs::path& require(const fs::path& p, const std::string& key) {
  if (p.empty()) {
    throw ConfigError("missing setting '" + key + "' (pass --" + flag_name(key) +
                      " or set " + key + " = \"...\" in the config file)");
  }
  return p;
}

// The stage that writes each input key.
std::string producer_of(const std::string& key) {
  if (key == "sentences") return "congen ingest";
  if (key == "index") return "congen index";
  if (key == "model") return "congen train-tagger";
  if (key == "extracted") return "congen extract-concepts";
  if (key == "pairs_file" || key == "sets_file" || key == "queries") return "congen enumerate";
  if (key == "semi_golden") return "congen generate";
  return "";
}

// Writes to a sibling temporary and renames on success, so a failed stage
// never leaves a truncated output behind.
class AtomicFile {
 public:
  explicit AtomicFile(fs::path target)
      : target_(std::move(target)), tmp_(target_.string() + ".tmp") {
    if (target_.has_parent_path()) fs::create_directories(target_.parent_path());
    out_ = create_text(tmp_);
  }
  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }
  std::ostream& stream() { return out_; }
  void commit() {
    out_.close();
    if (!out_) throw Error("failed writing " + tmp_.string());
    fs::rename(tmp_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

std::vector<ConceptSet> read_concept_file(const fs::path& p) {
  auto in = open_text(p);
  JsonlReader reader(in);
  std::vector<ConceptSet> out;
  while (auto j = reader.next()) out.push_back(concepts_from_json(*j, reader.line()));
  return out;
}

void write_concept_file(const fs::path& p, const std::vector<ConceptSet>& sets) {
  AtomicFile f(p);
  for (const auto& s : sets) write_json_line(f.stream(), concepts_json(s));
  f.commit();
}

void write_sentences(const fs::path& p, std::span<const CleanSentence> sentences) {
  AtomicFile f(p);
  for (const auto& s : sentences) write_json_line(f.stream(), to_json(s));
  f.commit();
}

const fs::path& recon_input(const PipelineConfig& cfg, std::string* key) {
  if (!cfg.extracted.empty()) {
    *key = "extracted";
    return cfg.extracted;
  }
  *key = "sentences";
  return require(cfg.sentences, "sentences");
}

std::unique_ptr<Generator> make_generator(const PipelineConfig& cfg) {
  if (cfg.stub) return std::make_unique<StubGenerator>(cfg.seed);
  return std::make_unique<HttpGenerator>(cfg.endpoint);
}

}  // namespace

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::kIngest: return "ingest";
    case Stage::kIndex: return "index";
    case Stage::kSearch: return "search";
    case Stage::kTrainTagger: return "train-tagger";
    case Stage::kExtractConcepts: return "extract-concepts";
    case Stage::kBuildRecon: return "build-recon";
    case Stage::kEnumerate: return "enumerate";
    case Stage::kGenerate: return "generate";
    case Stage::kEvaluate: return "evaluate";
    case Stage::kStats: return "stats";
  }
  return "?";
}

StagePlan plan_stage(Stage s, const PipelineConfig& cfg, const EnumerateRequest& enumerate) {
  StagePlan p{s, {}, {}};
  auto in = [&](const fs::path& path, const std::string& key) {
    p.inputs.push_back({key, require(path, key)});
  };
  auto out = [&](const fs::path& path, const std::string& key) {
    p.outputs.push_back({key, require(path, key)});
  };
  switch (s) {
    case Stage::kIngest:
      in(cfg.dump, "dump");
      out(cfg.sentences, "sentences");
      break;
    case Stage::kIndex:
      in(cfg.sentences, "sentences");
      out(cfg.index, "index");
      break;
    case Stage::kSearch:
      in(cfg.index, "index");
      if (!cfg.sentences.empty()) in(cfg.sentences, "sentences");
      break;
    case Stage::kTrainTagger:
      in(cfg.treebank, "treebank");
      if (!cfg.dev_treebank.empty()) in(cfg.dev_treebank, "dev_treebank");
      out(cfg.model, "model");
      break;
    case Stage::kExtractConcepts:
      in(cfg.commongen, "commongen");
      in(cfg.index, "index");
      in(cfg.sentences, "sentences");
      out(cfg.extracted, "extracted");
      break;
    case Stage::kBuildRecon: {
      std::string key;
      const auto& src = recon_input(cfg, &key);
      in(src, key);
      in(cfg.model, "model");
      out(cfg.recon, "recon");
      break;
    }
    case Stage::kEnumerate:
      if (!enumerate.pairs && !enumerate.sets) {
        throw ConfigError("enumerate needs --pairs, --sets or both");
      }
      in(cfg.commongen, "commongen");
      if (enumerate.pairs) out(cfg.pairs, "pairs_file");
      if (enumerate.sets) out(cfg.sets, "sets_file");
      break;
    case Stage::kGenerate:
      if (!cfg.queries.empty()) {
        in(cfg.queries, "queries");
      } else if (cfg.pairs.empty() && cfg.sets.empty()) {
        require(cfg.queries, "queries");
      } else {
        if (!cfg.pairs.empty()) in(cfg.pairs, "pairs_file");
        if (!cfg.sets.empty()) in(cfg.sets, "sets_file");
      }
      if (!cfg.stub && cfg.endpoint.empty()) {
        throw ConfigError("missing setting 'endpoint' (pass --endpoint URL or --stub)");
      }
      if (!cfg.model.empty()) in(cfg.model, "model");
      out(cfg.semi_golden, "semi_golden");
      break;
    case Stage::kEvaluate:
      in(cfg.hypotheses, "hypotheses");
      in(cfg.references, "references");
      if (!cfg.model.empty()) in(cfg.model, "model");
      out(cfg.report, "report");
      break;
    case Stage::kStats:
      break;
  }
  return p;
}

std::string describe_plan(const StagePlan& plan) {
  std::ostringstream os;
  os << "stage: " << stage_name(plan.stage) << "\n";
  for (const auto& f : plan.inputs) {
    os << "  read   " << f.key << " = " << f.path.string()
       << (fs::exists(f.path) ? "" : "  (missing)") << "\n";
  }
  for (const auto& f : plan.outputs) {
    os << "  write  " << f.key << " = " << f.path.string() << "\n";
  }
  return os.str();
}

void check_inputs(const StagePlan& plan) {
  for (const auto& f : plan.inputs) {
    if (fs::exists(f.path)) continue;
    std::string msg = stage_name(plan.stage) + ": input '" + f.key + "' not found at " +
                      f.path.string();
    const auto producer = producer_of(f.key);
    if (!producer.empty()) msg += "; run `" + producer + "` first";
    else msg += " (check --" + flag_name(f.key) + ")";
    throw ConfigError(msg);
  }
}

Json run_ingest(const PipelineConfig& cfg) {
  const auto plan = plan_stage(Stage::kIngest, cfg);
  check_inputs(plan);
  auto in = open_input(cfg.dump);
  DumpReader reader(*in);
  AtomicFile out(cfg.sentences);

  constexpr std::size_t kBatch = 512;
  std::vector<RawDocument> batch;
  std::uint64_t docs = 0, sentences = 0;
  auto flush = [&] {
    for (const auto& s : ingest_documents(batch, cfg.filter)) {
      write_json_line(out.stream(), to_json(s));
      ++sentences;
    }
    batch.clear();
  };
  std::set<std::uint64_t> seen_ids;
  while (auto doc = reader.next()) {
    if (!seen_ids.insert(doc->doc_id).second) {
      throw ParseError("duplicate page id " + std::to_string(doc->doc_id) + " in " +
                       cfg.dump.string());
    }
    ++docs;
    batch.push_back(std::move(*doc));
    if (batch.size() == kBatch) flush();
  }
  flush();
  out.commit();

  Json j;
  j["stage"] = "ingest";
  j["pages"] = reader.pages_seen();
  j["documents"] = docs;
  j["sentences"] = sentences;
  return j;
}

Json run_index(const PipelineConfig& cfg) {
  const auto plan = plan_stage(Stage::kIndex, cfg);
  check_inputs(plan);
  const auto sentences = read_sentences(cfg.sentences);
  const auto index = Bm25Index::build(sentences, cfg.bm25);
  index.save(cfg.index);
  Json j;
  j["stage"] = "index";
  j["sentences"] = index.size();
  j["terms"] = index.terms().size();
  j["avgdl"] = index.avgdl();
  return j;
}

std::string run_search(const PipelineConfig& cfg, const SearchRequest& req) {
  const auto plan = plan_stage(Stage::kSearch, cfg);
  check_inputs(plan);
  const auto index = Bm25Index::load(cfg.index);
  std::vector<CleanSentence> sentences;
  if (!cfg.sentences.empty()) {
    sentences = read_sentences(cfg.sentences);
    if (sentences.size() != index.size()) {
      throw ConfigError("index holds " + std::to_string(index.size()) +
                        " sentences but " + cfg.sentences.string() + " has " +
                        std::to_string(sentences.size()) + "; rerun `congen index`");
    }
  }
  std::vector<ScoredHit> hits;
  if (req.concepts) {
    hits = index.concept_match(ConceptSet(tokenize(req.query)), cfg.min_match);
    if (req.k > 0 && hits.size() > req.k) hits.resize(req.k);
  } else {
    hits = index.search(tokenize(req.query), req.k);
  }
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  for (std::size_t r = 0; r < hits.size(); ++r) {
    const auto& ref = index.ref(hits[r].ordinal);
    os << (r + 1) << '\t' << hits[r].score << '\t' << ref.doc_id << '\t' << ref.sent_idx;
    if (!sentences.empty()) os << '\t' << sentences[hits[r].ordinal].text;
    os << '\n';
  }
  return os.str();
}

Json run_train_tagger(const PipelineConfig& cfg) {
  const auto plan = plan_stage(Stage::kTrainTagger, cfg);
  check_inputs(plan);
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  const auto corpus = read_tagged_corpus(cfg.treebank);
  const auto model = train_tagger(corpus, static_cast<std::uint32_t>(cfg.epochs), cfg.seed);
  model.save(cfg.model);
  Json j;
  j["stage"] = "train-tagger";
  j["sentences"] = corpus.size();
  j["epochs"] = cfg.epochs;
  j["seed"] = cfg.seed;
  j["features"] = model.averaged.size();
  if (!cfg.dev_treebank.empty()) {
    j["dev_accuracy"] = tagging_accuracy(model, read_tagged_corpus(cfg.dev_treebank));
  }
  return j;
}

Json run_extract_concepts(const PipelineConfig& cfg) {
  const auto plan = plan_stage(Stage::kExtractConcepts, cfg);
  check_inputs(plan);
  const auto index = Bm25Index::load(cfg.index);
  const auto sentences = read_sentences(cfg.sentences);
  if (sentences.size() != index.size()) {
    throw ConfigError("index holds " + std::to_string(index.size()) + " sentences but " +
                      cfg.sentences.string() + " has " + std::to_string(sentences.size()) +
                      "; rerun `congen index`");
  }
  auto sets = load_commongen(cfg.commongen);
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());

  std::vector<char> keep(index.size(), 0);
  for (const auto& s : sets) {
    auto hits = index.concept_match(s, cfg.min_match);
    if (cfg.per_set_limit > 0 && hits.size() > cfg.per_set_limit) {
      hits.resize(cfg.per_set_limit);
    }
    for (const auto& h : hits) keep[h.ordinal] = 1;
  }
  std::vector<CleanSentence> out;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) out.push_back(sentences[i]);
  }
  write_sentences(cfg.extracted, out);
  Json j;
  j["stage"] = "extract-concepts";
  j["concept_sets"] = sets.size();
  j["min_match"] = cfg.min_match;
  j["extracted"] = out.size();
  return j;
}

Json run_build_recon(const PipelineConfig& cfg) {
  const auto plan = plan_stage(Stage::kBuildRecon, cfg);
  check_inputs(plan);
  std::string key;
  const auto& input = recon_input(cfg, &key);
  const auto sentences = read_sentences(input);
  const auto model = PerceptronModel::load(cfg.model);
  ReconSummary sum;
  const auto records = build_recon(sentences, model, cfg.max_concepts, &sum);
  AtomicFile out(cfg.recon);
  for (const auto& r : records) write_json_line(out.stream(), to_json(r));
  out.commit();
  Json j;
  j["stage"] = "build-recon";
  j["input"] = key;
  j["sentences"] = sum.sentences;
  j["emitted"] = sum.emitted;
  j["skipped"] = sum.skipped;
  j["subsampled"] = sum.subsampled;
  return j;
}

Json run_enumerate(const PipelineConfig& cfg, const EnumerateRequest& what) {
  const auto plan = plan_stage(Stage::kEnumerate, cfg, what);
  check_inputs(plan);
  const auto sets = load_commongen(cfg.commongen);
  Json j;
  j["stage"] = "enumerate";
  j["input_sets"] = sets.size();
  if (what.pairs) {
    const auto pairs = enumerate_pairs(sets);
    write_concept_file(cfg.pairs, pairs);
    j["pairs"] = pairs.size();
  }
  if (what.sets) {
    std::size_t dropped = 0;
    const auto out = enumerate_sets(sets, &dropped);
    write_concept_file(cfg.sets, out);
    j["sets"] = out.size();
    j["dropped"] = dropped;
  }
  return j;
}

Json run_generate(const PipelineConfig& cfg) {
  const auto plan = plan_stage(Stage::kGenerate, cfg);
  check_inputs(plan);
  std::vector<ConceptSet> queries;
  for (const auto& f : plan.inputs) {
    if (f.key == "model") continue;
    auto part = read_concept_file(f.path);
    queries.insert(queries.end(), part.begin(), part.end());
  }
  std::optional<PerceptronModel> model;
  if (!cfg.model.empty()) model = PerceptronModel::load(cfg.model);

  std::vector<SemiGoldenRecord> existing;
  if (fs::exists(cfg.semi_golden)) {
    auto in = open_text(cfg.semi_golden);
    JsonlReader reader(in);
    while (auto j = reader.next()) existing.push_back(semi_golden_from_json(*j, reader.line()));
  }
  const auto start = resume_position(queries, existing);
  if (start > 0) {
    spdlog::info("resuming after {} existing records at query {}", existing.size(), start);
  }

  auto generator = make_generator(cfg);
  if (auto* http = dynamic_cast<HttpGenerator*>(generator.get()); http && !http->healthy()) {
    spdlog::warn("health check against {} failed; trying anyway", cfg.endpoint);
  }

  if (cfg.semi_golden.has_parent_path()) fs::create_directories(cfg.semi_golden.parent_path());
  auto out = create_text(cfg.semi_golden, /*append=*/true);
  AssembleOptions opts;
  opts.threshold = cfg.threshold;
  opts.in_flight = cfg.in_flight;
  opts.max_tokens = cfg.max_tokens;
  opts.num_candidates = cfg.num_candidates;
  const auto rest = std::span<const ConceptSet>(queries).subspan(start);
  const auto sum = assemble(rest, *generator, model ? &*model : nullptr, opts,
                            [&](const SemiGoldenRecord& r) {
                              write_json_line(out, to_json(r));
                              out.flush();
                            });
  out.close();
  if (!out) throw Error("failed writing " + cfg.semi_golden.string());

  Json j;
  j["stage"] = "generate";
  j["generator"] = generator->id();
  j["total_queries"] = queries.size();
  j["resumed_at"] = start;
  j["summary"] = to_json(sum);
  return j;
}

Json run_evaluate(const PipelineConfig& cfg, std::string* table) {
  const auto plan = plan_stage(Stage::kEvaluate, cfg);
  check_inputs(plan);
  std::optional<PerceptronModel> model;
  if (!cfg.model.empty()) model = PerceptronModel::load(cfg.model);
  const auto report = evaluate(cfg.hypotheses, cfg.references, model ? &*model : nullptr);
  AtomicFile out(cfg.report);
  out.stream() << dump_json(to_json(report), 2) << "\n";
  out.commit();
  if (table) *table = format_table(report);
  auto j = to_json(report);
  j["stage"] = "evaluate";
  return j;
}

Json run_stats(const std::vector<fs::path>& files, bool compare_reference) {
  if (files.empty()) throw ConfigError("stats needs at least one file");
  Json out = Json::array();
  for (const auto& f : files) {
    if (!fs::exists(f)) throw ConfigError("stats: file not found: " + f.string());
    auto in = open_text(f);
    const auto st = augmentation_stats(in);
    Json j;
    j["file"] = f.string();
    j["n_sentences"] = st.n_sentences;
    Json sizes = Json::object();
    for (const auto& [size, count] : st.per_size) sizes[std::to_string(size)] = count;
    j["per_size"] = sizes;
    if (compare_reference) {
      Json ref;
      ref["pairs"] = ReferenceCounts::kPairs;
      ref["sets"] = ReferenceCounts::kSets;
      ref["size3"] = ReferenceCounts::kSize3;
      ref["size4"] = ReferenceCounts::kSize4;
      ref["size5"] = ReferenceCounts::kSize5;
      j["published"] = ref;
    }
    out.push_back(j);
  }
  return out;
}

}  // namespace congen
