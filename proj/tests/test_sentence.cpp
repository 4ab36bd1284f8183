#include <gtest/gtest.h>

#include "congen/dump.hpp"
#include "congen/error.hpp"
#include "congen/sentence.hpp"
#include "congen/text.hpp"
#include "test_util.hpp"

using namespace congen;
using congen::testing::fixture;

namespace {

std::vector<RawDocument> toy_docs() {
  auto in = open_input(fixture("toy_dump.xml"));
  DumpReader reader(*in);
  std::vector<RawDocument> out;
  while (auto d = reader.next()) out.push_back(std::move(*d));
  return out;
}

}  // namespace

TEST(Sentence, DocumentSentences) {
  RawDocument doc{5, "T",
                  "'''Rex''' is a [[dog]]. Hi. The dog runs in the park.<ref>x</ref>"};
  const auto s = document_sentences(doc, SentenceFilter{});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].text, "Rex is a dog.");
  EXPECT_EQ(s[0].sent_idx, 0u);
  // "Hi." is filtered out but keeps its index.
  EXPECT_EQ(s[1].sent_idx, 2u);
  EXPECT_EQ(s[1].tokens, tokenize(s[1].text));
}

TEST(Sentence, InvariantsOnToyDump) {
  const auto sentences = ingest_documents(toy_docs(), SentenceFilter{});
  ASSERT_GT(sentences.size(), 500u);
  for (const auto& s : sentences) {
    EXPECT_EQ(s.tokens, tokenize(s.text));
    EXPECT_FALSE(contains_markup(s.text)) << s.text;
    EXPECT_GE(s.tokens.size(), 3u);
    EXPECT_LE(s.tokens.size(), 64u);
  }
}

TEST(Sentence, ParallelMatchesSerial) {
  const auto docs = toy_docs();
  EXPECT_EQ(ingest_documents(docs, SentenceFilter{}),
            ingest_documents_serial(docs, SentenceFilter{}));
}

TEST(Sentence, FilterBounds) {
  RawDocument doc{1, "T", "One two three four five. One two."};
  EXPECT_EQ(document_sentences(doc, {2, 4}).size(), 1u);
  EXPECT_EQ(document_sentences(doc, {2, 5}).size(), 2u);
}

TEST(Sentence, JsonRoundTrip) {
  CleanSentence s{42, 3, "Café time.", {"café", "time"}};
  EXPECT_EQ(sentence_from_json(to_json(s)), s);
  EXPECT_THROW(sentence_from_json(Json::parse(R"({"doc_id":1})"), 7), ParseError);
}
