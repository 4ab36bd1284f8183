#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "congen/error.hpp"
#include "congen/metrics.hpp"
#include "congen/text.hpp"
#include "test_util.hpp"

using namespace congen;
using congen::testing::fixture;
using congen::testing::slurp;
using congen::testing::TempDir;

namespace {

Tokens toks(const std::string& s) { return tokenize(s); }

EvalInstance inst(const std::string& hyp, std::vector<std::string> refs,
                  const std::string& id = "x") {
  EvalInstance e;
  e.id = id;
  e.hypothesis_text = hyp;
  e.hypothesis = toks(hyp);
  for (const auto& r : refs) e.references.push_back(toks(r));
  return e;
}

std::vector<EvalInstance> golden_instances() {
  return load_eval_instances(fixture("metrics_hyp.jsonl"), fixture("metrics_ref.jsonl"));
}

std::vector<EvalInstance> random_instances(std::mt19937& gen, std::size_t n) {
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f", "dog", "dogs", "run", "runs"};
  auto sentence = [&](std::size_t max_len) {
    Tokens t;
    const auto len = gen() % (max_len + 1);
    for (std::size_t i = 0; i < len; ++i) t.push_back(vocab[gen() % vocab.size()]);
    return t;
  };
  std::vector<EvalInstance> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = std::to_string(i);
    out[i].hypothesis = sentence(8);
    const auto nr = 1 + gen() % 3;
    for (std::size_t r = 0; r < nr; ++r) out[i].references.push_back(sentence(8));
  }
  return out;
}

}  // namespace

TEST(Bleu, MicroExample) {
  const std::vector<EvalInstance> in = {inst("a b c d e f g", {"a b c d x y z"})};
  EXPECT_NEAR(bleu4(in), 0.4111336169005197, 1e-12);
}

TEST(Bleu, TrivialCases) {
  const std::vector<EvalInstance> same = {inst("a b c d e", {"a b c d e"}),
                                          inst("f g h i", {"x y", "f g h i"})};
  EXPECT_DOUBLE_EQ(bleu4(same), 1.0);
  const std::vector<EvalInstance> none = {inst("a b c d", {"a b c x d"})};
  EXPECT_EQ(bleu4(none), 0.0);
  EXPECT_THROW(bleu4(std::vector<EvalInstance>{}), Error);
}

TEST(Bleu, BrevityPenalty) {
  // hyp 4 tokens, closest ref 8 -> BP = exp(1 - 8/4)
  const std::vector<EvalInstance> in = {inst("a b c d", {"a b c d e f g h"})};
  EXPECT_NEAR(bleu4(in), std::exp(1.0 - 2.0), 1e-12);
}

TEST(RougeL, Examples) {
  EXPECT_DOUBLE_EQ(rouge_l_instance(toks("a b c d"), std::vector<Tokens>{toks("a c b d")}), 0.75);
  EXPECT_DOUBLE_EQ(rouge_l_instance(toks("a b"), std::vector<Tokens>{toks("a b")}), 1.0);
  EXPECT_EQ(rouge_l_instance(toks("a b"), std::vector<Tokens>{toks("c d")}), 0.0);
  EXPECT_EQ(rouge_l_instance({}, std::vector<Tokens>{toks("c d")}), 0.0);
}

TEST(Meteor, Examples) {
  EXPECT_NEAR(meteor_instance(toks("a b c"), std::vector<Tokens>{toks("a b c")}),
              1.0 - 0.5 / 27.0, 1e-12);
  EXPECT_EQ(meteor_instance(toks("a b c"), std::vector<Tokens>{toks("x y z")}), 0.0);
  const auto stem = meteor_align(toks("dogs"), toks("dog"));
  EXPECT_EQ(stem.matches, 1u);
  EXPECT_EQ(stem.chunks, 1u);
}

TEST(Meteor, AlignmentPrefersContinuation) {
  // "the" can match either position; taking the one after "cat" keeps a single chunk.
  const auto a = meteor_align(toks("cat the mat"), toks("the cat the mat"));
  EXPECT_EQ(a.matches, 3u);
  EXPECT_EQ(a.chunks, 1u);
  const auto b = meteor_align(toks("c b a"), toks("a b c"));
  EXPECT_EQ(b.matches, 3u);
  EXPECT_EQ(b.chunks, 3u);
}

TEST(Cider, Examples) {
  const std::vector<EvalInstance> two = {inst("a b c d", {"a b c d"}), inst("e f g h", {"e f g h"})};
  EXPECT_NEAR(cider(two), 10.0, 1e-9);
  for (double s : cider_instances(two)) EXPECT_NEAR(s, 10.0, 1e-9);
  const std::vector<EvalInstance> disjoint = {inst("a b c d", {"w x y z"}), inst("e f g h", {"e f g h"})};
  EXPECT_EQ(cider_instances(disjoint)[0], 0.0);
  const std::vector<EvalInstance> one = {inst("a b c d", {"a b c d"})};
  EXPECT_EQ(cider(one), 0.0);
}

TEST(Evaluate, GoldenFixture) {
  const auto golden = report_from_json(Json::parse(slurp(fixture("metrics_golden.json"))));
  const auto r = evaluate(fixture("metrics_hyp.jsonl"), fixture("metrics_ref.jsonl"));
  EXPECT_NEAR(r.bleu4, golden.bleu4, 1e-6);
  EXPECT_NEAR(r.rouge_l, golden.rouge_l, 1e-6);
  EXPECT_NEAR(r.meteor, golden.meteor, 1e-6);
  EXPECT_NEAR(r.cider, golden.cider, 1e-6);
  EXPECT_NEAR(r.coverage, golden.coverage, 1e-6);
  EXPECT_EQ(r.n, golden.n);
}

TEST(Evaluate, IdentityIsMaximal) {
  auto in = golden_instances();
  for (auto& e : in) {
    e.hypothesis = e.references.back();
    e.hypothesis_text = "";
  }
  const auto r = evaluate(in);
  EXPECT_DOUBLE_EQ(r.bleu4, 1.0);
  EXPECT_DOUBLE_EQ(r.rouge_l, 1.0);
}

TEST(Evaluate, TableAndJson) {
  const auto r = evaluate(fixture("metrics_hyp.jsonl"), fixture("metrics_ref.jsonl"));
  const auto back = report_from_json(to_json(r));
  EXPECT_EQ(back.bleu4, r.bleu4);
  EXPECT_EQ(back.n, r.n);
  const auto table = format_table(r);
  for (const char* label : {"BLEU-4", "ROUGE-L", "METEOR", "CIDEr", "coverage"}) {
    EXPECT_NE(table.find(label), std::string::npos) << label;
  }
}

TEST(Evaluate, IdMismatchListsMissingIds) {
  TempDir dir;
  {
    std::ofstream h(dir / "h.jsonl");
    h << R"({"id":"a","concepts":["dog","run"],"hypothesis":"A dog runs."})" "\n"
      << R"({"id":"b","concepts":["cat","sit"],"hypothesis":"A cat sits."})" "\n";
    std::ofstream r(dir / "r.jsonl");
    r << R"({"id":"a","references":["The dog runs."]})" "\n"
      << R"({"id":"c","references":["x"]})" "\n";
  }
  try {
    load_eval_instances(dir / "h.jsonl", dir / "r.jsonl");
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("b"), std::string::npos);
    EXPECT_NE(msg.find("c"), std::string::npos);
  }
}

TEST(Evaluate, EmptyFilesAreErrors) {
  TempDir dir;
  std::ofstream(dir / "h.jsonl").close();
  std::ofstream(dir / "r.jsonl").close();
  EXPECT_THROW(evaluate(dir / "h.jsonl", dir / "r.jsonl"), Error);
}

TEST(MetricProperties, RangesOnRandomInput) {
  std::mt19937 gen(99);
  const auto in = random_instances(gen, 1000);
  for (double v : {bleu4(in), rouge_l(in), meteor(in)}) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  for (double v : cider_instances(in)) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 10.0 + 1e-9);
  }
}

TEST(MetricProperties, PermutationInvariance) {
  std::mt19937 gen(5);
  auto in = random_instances(gen, 200);
  const auto base = evaluate(in);
  std::shuffle(in.begin(), in.end(), gen);
  const auto shuffled = evaluate(in);
  EXPECT_NEAR(shuffled.bleu4, base.bleu4, 1e-12);
  EXPECT_NEAR(shuffled.rouge_l, base.rouge_l, 1e-12);
  EXPECT_NEAR(shuffled.meteor, base.meteor, 1e-12);
  EXPECT_NEAR(shuffled.cider, base.cider, 1e-12);
}

TEST(MetricProperties, TruncationLowersBleu) {
  auto in = golden_instances();
  const double before = bleu4(in);
  for (auto& e : in) e.hypothesis.pop_back();
  EXPECT_LT(bleu4(in), before);
}

TEST(MetricProperties, AddingReferenceNeverLowersRouge) {
  std::mt19937 gen(8);
  auto in = random_instances(gen, 300);
  const auto extra = random_instances(gen, 300);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double before = rouge_l_instance(in[i].hypothesis, in[i].references);
    in[i].references.push_back(extra[i].hypothesis);
    EXPECT_GE(rouge_l_instance(in[i].hypothesis, in[i].references), before);
  }
}

TEST(MetricProperties, ParallelMatchesSerial) {
  std::mt19937 gen(21);
  const auto in = random_instances(gen, 500);
  EXPECT_EQ(rouge_l(in, Exec::kParallel), rouge_l(in, Exec::kSerial));
  EXPECT_EQ(meteor(in, Exec::kParallel), meteor(in, Exec::kSerial));
  EXPECT_EQ(cider_instances(in, Exec::kParallel), cider_instances(in, Exec::kSerial));
  EXPECT_EQ(cider(in, Exec::kParallel), cider(in, Exec::kSerial));
}
