#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "congen/bm25.hpp"
#include "congen/error.hpp"
#include "congen/lemmatizer.hpp"
#include "test_util.hpp"

using namespace congen;
using congen::testing::fixture;
using congen::testing::slurp;

namespace {

std::vector<CleanSentence> corpus(const std::vector<std::vector<std::string>>& docs) {
  std::vector<CleanSentence> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::string text;
    for (const auto& t : docs[i]) text += (text.empty() ? "" : " ") + t;
    out.push_back({i + 1, 0, text, docs[i]});
  }
  return out;
}

std::vector<CleanSentence> toy() { return corpus({{"a", "b"}, {"b", "c"}, {"c", "c", "c"}}); }

std::vector<CleanSentence> fixture_corpus() {
  return read_sentences(fixture("bm25_corpus.jsonl"));
}

std::vector<std::vector<std::string>> fixture_queries() {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(slurp(fixture("bm25_queries.jsonl")));
  for (std::string line; std::getline(in, line);) {
    out.push_back(Json::parse(line)["query"].get<std::vector<std::string>>());
  }
  return out;
}

// Full-scan ranker straight from the formula, sharing nothing with the index.
std::vector<ScoredHit> brute_force(const std::vector<CleanSentence>& docs,
                                   std::vector<std::string> query, std::size_t k,
                                   Bm25Params p = {}) {
  std::sort(query.begin(), query.end());
  query.erase(std::unique(query.begin(), query.end()), query.end());
  const double n = static_cast<double>(docs.size());
  double total = 0;
  std::map<std::string, int> df;
  for (const auto& d : docs) {
    total += static_cast<double>(d.tokens.size());
    for (const auto& t : std::set<std::string>(d.tokens.begin(), d.tokens.end())) ++df[t];
  }
  const double avgdl = total / n;
  std::vector<ScoredHit> hits;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double s = 0;
    for (const auto& q : query) {
      const auto tf = static_cast<double>(std::count(docs[i].tokens.begin(), docs[i].tokens.end(), q));
      if (tf == 0) continue;
      const double idf = std::log((n - df[q] + 0.5) / (df[q] + 0.5) + 1.0);
      const double dl = static_cast<double>(docs[i].tokens.size());
      s += idf * tf * (p.k1 + 1) / (tf + p.k1 * (1 - p.b + p.b * dl / avgdl));
    }
    if (s > 0) hits.push_back({static_cast<std::uint32_t>(i), s});
  }
  std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
    return a.score != b.score ? a.score > b.score : a.ordinal < b.ordinal;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

void expect_same_ranking(const std::vector<ScoredHit>& got,
                         const std::vector<ScoredHit>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].ordinal, want[i].ordinal) << "rank " << i;
    EXPECT_NEAR(got[i].score, want[i].score, 1e-9) << "rank " << i;
  }
}

}  // namespace

TEST(Bm25, ToyStats) {
  const auto idx = build_index(toy());
  EXPECT_EQ(idx.size(), 3u);
  EXPECT_DOUBLE_EQ(idx.avgdl(), 7.0 / 3.0);
  EXPECT_EQ(idx.df("c"), 2u);
  EXPECT_EQ(idx.df("a"), 1u);
  EXPECT_EQ(idx.df("zzz"), 0u);
  EXPECT_TRUE(idx.check_invariants().empty());
}

TEST(Bm25, SingleSentence) {
  const auto idx = build_index(corpus({{"x", "y", "z", "x"}}));
  EXPECT_DOUBLE_EQ(idx.avgdl(), 4.0);
  for (const auto& t : idx.terms()) EXPECT_EQ(idx.df(t), 1u);
}

TEST(Bm25, EmptyInputIsAnError) {
  EXPECT_THROW(build_index(std::vector<CleanSentence>{}), Error);
}

TEST(Bm25, ToyScoreFrozen) {
  // Direct formula evaluation (N=3, df=2, tf=3, dl=3, avgdl=7/3), frozen.
  const auto idx = build_index(toy());
  const std::vector<std::string> q = {"c"};
  EXPECT_NEAR(bm25_score(idx, q, 2), 0.6959669125369546, 1e-12);
  EXPECT_NEAR(idx.idf(2), std::log(1.6), 1e-15);
}

TEST(Bm25, AbsentAndZeroTfContributeNothing) {
  const auto idx = build_index(corpus({{"a", "b"}, {"a", "c"}}));
  const std::vector<std::string> q = {"b", "nothere"};
  const std::vector<std::string> only_b = {"b"};
  EXPECT_EQ(bm25_score(idx, q, 1), 0.0);
  EXPECT_EQ(bm25_score(idx, q, 0), bm25_score(idx, only_b, 0));
  EXPECT_TRUE(search(idx, std::vector<std::string>{"nothere"}, 5).empty());
}

TEST(Bm25, QueryIsASet) {
  const auto idx = build_index(toy());
  const std::vector<std::string> once = {"c"};
  const std::vector<std::string> twice = {"c", "c"};
  EXPECT_EQ(bm25_score(idx, once, 2), bm25_score(idx, twice, 2));
}

TEST(Bm25, TermFrequencySaturates) {
  std::vector<std::vector<std::string>> docs = {{"q", "a", "b", "c", "d", "e", "f", "g"}};
  for (int i = 0; i < 6; ++i) docs.push_back({"x", "y", "z", "w"});
  for (int tf = 2; tf <= 8; tf *= 2) {
    std::vector<std::string> d(tf, "q");
    d.resize(8, "pad");
    docs.push_back(d);
  }
  const auto idx = build_index(corpus(docs));
  const std::vector<std::string> q = {"q"};
  const double s1 = bm25_score(idx, q, 0);
  const double s2 = bm25_score(idx, q, 7);
  const double s4 = bm25_score(idx, q, 8);
  const double s8 = bm25_score(idx, q, 9);
  EXPECT_LT(s1, s2);
  EXPECT_LT(s2, s4);
  EXPECT_LT(s4, s8);
  EXPECT_GT(s2 - s1, s4 - s2);
  EXPECT_GT(s4 - s2, s8 - s4);
}

TEST(Bm25, ToySearch) {
  const auto idx = build_index(toy());
  const auto hits = search(idx, std::vector<std::string>{"c"}, 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].ordinal, 2u);
  EXPECT_EQ(hits[1].ordinal, 1u);
  EXPECT_TRUE(search(idx, std::vector<std::string>{"c"}, 0).empty());
  EXPECT_EQ(search(idx, std::vector<std::string>{"b", "c"}, 99).size(), 3u);
}

TEST(Bm25, FixtureStatsMatchCountingOracle) {
  const auto expected = Json::parse(slurp(fixture("bm25_expected.json")));
  const auto idx = build_index(fixture_corpus());
  EXPECT_EQ(idx.size(), expected["n"].get<std::uint32_t>());
  EXPECT_EQ(idx.total_length(), expected["total_length"].get<std::uint64_t>());
  ASSERT_EQ(idx.terms().size(), expected["df"].size());
  for (const auto& [term, df] : expected["df"].items()) {
    EXPECT_EQ(idx.df(term), df.get<std::uint32_t>()) << term;
  }
}

TEST(Bm25, FixtureSearchMatchesFrozenOracle) {
  const auto expected = Json::parse(slurp(fixture("bm25_expected.json")));
  const auto idx = build_index(fixture_corpus());
  const auto queries = fixture_queries();
  for (std::size_t q = 0; q < queries.size(); ++q) {
    std::vector<ScoredHit> want;
    for (const auto& h : expected["top10"][q]) {
      want.push_back({h[0].get<std::uint32_t>(), h[1].get<double>()});
    }
    expect_same_ranking(search(idx, queries[q], 10), want);
  }
}

TEST(Bm25, SearchEqualsBruteForce) {
  const auto docs = fixture_corpus();
  for (const Bm25Params p : {Bm25Params{}, Bm25Params{2.0, 0.3}, Bm25Params{0.5, 1.0}}) {
    const auto idx = build_index(docs, p);
    for (const auto& q : fixture_queries()) {
      for (std::size_t k : {1u, 10u, 1000u}) {
        expect_same_ranking(idx.search(q, k), brute_force(docs, q, k, p));
        expect_same_ranking(idx.search_serial(q, k), brute_force(docs, q, k, p));
      }
    }
  }
}

TEST(Bm25, ParallelBuildEqualsSerial) {
  const auto docs = fixture_corpus();
  EXPECT_EQ(Bm25Index::build(docs).serialize(), Bm25Index::build_serial(docs).serialize());
}

TEST(Bm25, SerializationRoundTrip) {
  const auto docs = fixture_corpus();
  const auto idx = build_index(docs, {1.5, 0.6});
  const auto back = Bm25Index::deserialize(idx.serialize());
  EXPECT_EQ(back.params(), idx.params());
  EXPECT_EQ(back.serialize(), idx.serialize());
  EXPECT_TRUE(back.check_invariants().empty());
  for (std::uint32_t o = 0; o < idx.size(); ++o) {
    EXPECT_EQ(back.ref(o), idx.ref(o));
    EXPECT_EQ(back.doc_length(o), idx.doc_length(o));
  }
  std::mt19937 gen(3);
  const auto& terms = idx.terms();
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> q;
    for (int j = 0; j < 3; ++j) q.push_back(terms[gen() % terms.size()]);
    const auto o = static_cast<std::uint32_t>(gen() % idx.size());
    EXPECT_EQ(back.score(q, o), idx.score(q, o));
  }
}

TEST(Bm25, SaveLoadFile) {
  congen::testing::TempDir dir;
  const auto idx = build_index(toy());
  idx.save(dir / "i.bin");
  EXPECT_EQ(Bm25Index::load(dir / "i.bin").serialize(), idx.serialize());
}

TEST(Bm25, CorruptFilesAreRejected) {
  const auto bytes = build_index(toy()).serialize();
  EXPECT_THROW(Bm25Index::deserialize("XXXX"), ParseError);
  EXPECT_THROW(Bm25Index::deserialize(bytes.substr(0, bytes.size() - 3)), ParseError);
  auto wrong_version = bytes;
  wrong_version[4] = 9;
  EXPECT_THROW(Bm25Index::deserialize(wrong_version), ParseError);
  EXPECT_THROW(Bm25Index::deserialize(bytes + "x"), ParseError);
}

TEST(ConceptMatch, Examples) {
  const auto idx = build_index(corpus({{"the", "dog", "runs"}, {"a", "dog", "sleeps"}}));
  EXPECT_EQ(concept_match_extract(idx, ConceptSet{"dog", "run"}, 2),
            std::vector<std::uint32_t>{0});
  EXPECT_THROW(concept_match_extract(idx, ConceptSet{}, 2), Error);
}

TEST(ConceptMatch, MembershipEqualsBruteForce) {
  const auto docs = fixture_corpus();
  const auto idx = build_index(docs);
  const std::vector<ConceptSet> queries = {
      {"dog", "run"}, {"ball", "kick", "player"}, {"catch", "fish", "river"},
      {"the", "with", "and", "near"}, {"ride", "horse", "field", "tree", "snow"}};
  for (const auto& c : queries) {
    for (std::size_t m = 1; m <= c.size() + 1; ++m) {
      std::vector<std::uint32_t> want;
      for (std::size_t i = 0; i < docs.size(); ++i) {
        std::set<std::string> lemmas;
        for (const auto& t : docs[i].tokens) {
          lemmas.insert(lemmatize(t, PosTag::kNoun));
          lemmas.insert(lemmatize(t, PosTag::kVerb));
        }
        std::size_t hit = 0;
        for (const auto& x : c) hit += lemmas.count(x);
        if (hit >= m) want.push_back(static_cast<std::uint32_t>(i));
      }
      auto got = concept_match_extract(idx, c, m);
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, want) << c.joined(',') << " m=" << m;
    }
  }
}

TEST(ConceptMatch, MonotoneInMinMatch) {
  const auto idx = build_index(fixture_corpus());
  const ConceptSet c{"ball", "dog", "run", "the", "park"};
  std::vector<std::uint32_t> prev;
  for (std::size_t m = 1; m <= 6; ++m) {
    auto cur = concept_match_extract(idx, c, m);
    std::sort(cur.begin(), cur.end());
    if (m > 1) EXPECT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
    prev = cur;
  }
}
