// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

#include "congen/bm25.hpp"
#include "congen/dataset.hpp"
#include "congen/generator.hpp"
#include "congen/lemmatizer.hpp"
#include "congen/metrics.hpp"
#include "congen/tagger.hpp"
#include "congen/text.hpp"
#include "toy_pipeline.hpp"

using namespace congen;
using namespace congen::testing;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& name, bool ok, double seconds, const std::string& detail) {
  std::printf("%s %-22s %7.3fs  %s\n", ok ? "PASS" : "FAIL", name.c_str(), seconds,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename F>
void check(const std::string& name, double limit_s, F&& body) {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  if (s >= limit_s) {
    ok = false;
    detail += " (over " + std::to_string(limit_s) + "s limit)";
  }
  report(name, ok, s, detail);
}

EvalInstance inst(const std::string& hyp, const std::vector<std::string>& refs) {
  EvalInstance e;
  e.hypothesis = tokenize(hyp);
  e.hypothesis_text = hyp;
  for (const auto& r : refs) e.references.push_back(tokenize(r));
  return e;
}

bool close(double a, double b, double tol, const std::string& what, std::string& detail) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s=%.9f(want %.9f) ", what.c_str(), a, b);
  detail += buf;
  return std::fabs(a - b) <= tol;
}

bool metric_suite(std::string& d) {
  bool ok = true;
  ok &= close(bleu4(std::vector{inst("a b c d e f g", {"a b c d x y z"})}),
              std::pow(4.0 / 7 * 1.0 / 2 * 2.0 / 5 * 1.0 / 4, 0.25), 1e-6, "bleu", d);
  ok &= close(rouge_l(std::vector{inst("a b c d", {"a c b d"})}), 0.75, 1e-6, "rouge", d);
  ok &= close(meteor(std::vector{inst("a b c", {"a b c"})}), 1.0 - 0.5 / 27, 1e-6, "meteor", d);
  ok &= close(cider(std::vector{inst("a b c d", {"a b c d"}), inst("e f g h", {"e f g h"})}),
              10.0, 1e-6, "cider", d);
  return ok;
}

// Scores every sentence from raw token counts, independently of the index.
std::vector<ScoredHit> brute_force(const std::vector<CleanSentence>& docs,
                                   const std::vector<std::string>& query, std::size_t k,
                                   const Bm25Params& p) {
  const double n = static_cast<double>(docs.size());
  double total = 0;
  std::map<std::string, double> df;
  for (const auto& d : docs) {
    total += static_cast<double>(d.tokens.size());
    for (const auto& t : std::set<std::string>(d.tokens.begin(), d.tokens.end())) df[t] += 1;
  }
  const double avgdl = total / n;
  const std::set<std::string> terms(query.begin(), query.end());
  std::vector<ScoredHit> hits;
  for (std::uint32_t i = 0; i < docs.size(); ++i) {
    double s = 0;
    const double len = static_cast<double>(docs[i].tokens.size());
    for (const auto& t : terms) {
      const double tf = static_cast<double>(std::count(docs[i].tokens.begin(), docs[i].tokens.end(), t));
      if (tf == 0) continue;
      const double idf = std::log((n - df[t] + 0.5) / (df[t] + 0.5) + 1.0);
      s += idf * tf * (p.k1 + 1) / (tf + p.k1 * (1 - p.b + p.b * len / avgdl));
    }
    if (s > 0) hits.push_back({i, s});
  }
  std::sort(hits.begin(), hits.end(), ranks_before);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

bool bm25_exactness(std::string& d) {
  const auto docs = read_sentences(fixture("bm25_corpus.jsonl"));
  const auto index = Bm25Index::build(docs);
  const auto frozen = Json::parse(slurp(fixture("bm25_expected.json")));
  std::ifstream qin(fixture("bm25_queries.jsonl"));
  std::size_t queries = 0, mismatches = 0;
  double worst = 0;
  for (std::string line; std::getline(qin, line); ++queries) {
    const auto query = Json::parse(line)["query"].get<std::vector<std::string>>();
    const auto got = index.search(query, 10);
    const auto want = brute_force(docs, query, 10, index.params());
    const auto& py = frozen["top10"][queries];
    bool same = got.size() == want.size() && got.size() == py.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].ordinal == want[i].ordinal && got[i].ordinal == py[i][0].get<std::uint32_t>();
      worst = std::max({worst, std::fabs(got[i].score - want[i].score),
                        std::fabs(got[i].score - py[i][1].get<double>())});
    }
    mismatches += same ? 0 : 1;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu sentences, %zu queries, order mismatches %zu, max |dscore| %.3g",
                docs.size(), queries, mismatches, worst);
  d = buf;
  return docs.size() == 1000 && queries == 50 && mismatches == 0 && worst <= 1e-9;
}

// Brute force: every 2-subset of every set, and each distinct set of size 3..5.
bool enumeration_oracle(std::string& d) {
  const auto sets = load_commongen(fixture("commongen_200.jsonl"));
  std::set<ConceptSet> pairs, triples;
  for (const auto& s : sets) {
    const auto& c = s.concepts();
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) pairs.insert(ConceptSet{c[i], c[j]});
    if (c.size() >= 3 && c.size() <= 5) triples.insert(s);
  }
  const auto got_pairs = enumerate_pairs(sets);
  const auto got_sets = enumerate_sets(sets);
  const auto frozen = Json::parse(slurp(fixture("commongen_200.expected.json")));
  const bool ok = std::vector<ConceptSet>(pairs.begin(), pairs.end()) == got_pairs &&
                  std::vector<ConceptSet>(triples.begin(), triples.end()) == got_sets &&
                  frozen["pairs"].size() == got_pairs.size() &&
                  frozen["sets"].size() == got_sets.size();
  d = std::to_string(sets.size()) + " input sets, pairs " + std::to_string(got_pairs.size()) +
      "/" + std::to_string(pairs.size()) + ", sets " + std::to_string(got_sets.size()) + "/" +
      std::to_string(triples.size());
  return ok;
}

std::string pct(std::uint64_t got, std::uint64_t want) {
  char buf[96];
  const double dev = 100.0 * (static_cast<double>(got) - static_cast<double>(want)) /
                     static_cast<double>(want);
  std::snprintf(buf, sizeof buf, "%llu vs %llu (%+.2f%%)%s", static_cast<unsigned long long>(got),
                static_cast<unsigned long long>(want), dev,
                std::fabs(dev) > 1.0 ? " DISCREPANCY" : "");
  return buf;
}

// Informational only: deviations are reported, never failed.
bool commongen_counts(std::string& d) {
  const char* env = std::getenv("CONGEN_COMMONGEN_TRAIN");
  if (!env || !std::filesystem::exists(env)) {
    d = "not run: CommonGen training file not provided (set CONGEN_COMMONGEN_TRAIN)";
    return true;
  }
  const auto sets = load_commongen(std::filesystem::path(env));
  const auto pairs = enumerate_pairs(sets);
  const auto st = augmentation_stats(enumerate_sets(sets));
  auto size = [&](std::size_t n) { return st.per_size.count(n) ? st.per_size.at(n) : 0; };
  d = "pairs " + pct(pairs.size(), ReferenceCounts::kPairs) + "; size3 " +
      pct(size(3), ReferenceCounts::kSize3) + "; size4 " + pct(size(4), ReferenceCounts::kSize4) +
      "; size5 " + pct(size(5), ReferenceCounts::kSize5) +
      "; counts after lowercasing and exact-set dedup, no lemmatization";
  return true;
}

bool tagger_regression(std::string& d) {
  const auto train = read_tagged_corpus(data_file("treebank/train.tsv"));
  const auto dev = read_tagged_corpus(data_file("treebank/dev.tsv"));
  const auto a = train_tagger(train, 5, 13);
  const auto b = train_tagger(train, 5, 13);
  const double acc = tagging_accuracy(a, dev);
  const bool same = a.serialize() == b.serialize();
  d = "dev accuracy " + std::to_string(acc) + ", identical models " + (same ? "yes" : "no");
  return acc >= 0.90 && same;
}

// Re-checks every output record of a finished toy run.
std::size_t recheck(const std::filesystem::path& dir, std::size_t* records, double* mean) {
  const auto model = PerceptronModel::load(dir / "tagger.bin");
  std::size_t bad = 0;
  std::set<ConceptSet> queries;
  for (const char* f : {"pairs.jsonl", "sets.jsonl"}) {
    std::ifstream in(dir / f);
    for (std::string line; std::getline(in, line);) {
      const auto c = concepts_from_json(Json::parse(line));
      bad += (c.size() < 2 || c.size() > 5) ? 1 : 0;
      queries.insert(c);
    }
  }
  std::ifstream sg(dir / "semi_golden.jsonl");
  double sum = 0;
  *records = 0;
  std::uint64_t line_no = 0;
  for (std::string line; std::getline(sg, line);) {
    const auto r = semi_golden_from_json(Json::parse(line), ++line_no);
    const double cov = coverage(r.concepts, r.text, &model);
    bad += queries.count(r.concepts) ? 0 : 1;
    bad += (cov != r.coverage || cov < 0.99) ? 1 : 0;
    bad += r.generator_id == "stub" ? 0 : 1;
    sum += cov;
    ++*records;
  }
  *mean = *records ? sum / static_cast<double>(*records) : 0.0;

  std::ifstream rec(dir / "recon.jsonl");
  for (std::string line; std::getline(rec, line);) {
    const auto j = Json::parse(line);
    const auto c = concepts_from_json(j);
    const auto toks = tokenize(j["text"].get<std::string>());
    const auto lemmas = lemmatized_tokens(model, toks);
    const std::set<std::string> have(lemmas.begin(), lemmas.end());
    bad += (c.size() < 2 || c.size() > 5) ? 1 : 0;
    for (const auto& x : c) bad += have.count(x) ? 0 : 1;
  }
  return bad;
}

bool end_to_end(std::string& d) {
  TempDir dir;
  const auto r = run_toy_pipeline(dir.path());
  if (r.exit_code != 0) {
    d = "pipeline failed: " + r.err.substr(0, 300);
    return false;
  }
  std::size_t records = 0;
  double mean = 0;
  const auto bad = recheck(dir.path(), &records, &mean);
  d = std::to_string(records) + " records, mean coverage " + std::to_string(mean) +
      ", violations " + std::to_string(bad);
  return records > 0 && mean == 1.0 && bad == 0;
}

bool determinism(std::string& d) {
  TempDir a, b;
  for (const auto* dir : {&a, &b}) {
    const auto r = run_toy_pipeline(dir->path());
    if (r.exit_code != 0) {
      d = "pipeline failed: " + r.err.substr(0, 300);
      return false;
    }
  }
  std::size_t differ = 0;
  for (const auto& f : toy_outputs()) {
    if (slurp(a / f) != slurp(b / f)) {
      d += f + " differs; ";
      ++differ;
    }
  }
  d += std::to_string(toy_outputs().size() - differ) + "/" + std::to_string(toy_outputs().size()) +
       " outputs byte-identical";
  return differ == 0;
}

}  // namespace

int main() {
  check("metric-oracles", 1.0, metric_suite);
  check("bm25-exactness", 5.0, bm25_exactness);
  check("enumeration-oracle", 1.0, enumeration_oracle);
  check("commongen-counts", 600.0, commongen_counts);
  check("tagger-regression", 30.0, tagger_regression);
  check("end-to-end-stub", 60.0, end_to_end);
  check("determinism", 120.0, determinism);
  return failures == 0 ? 0 : 1;
}
