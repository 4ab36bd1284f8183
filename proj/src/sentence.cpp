#include "congen/sentence.hpp"

#include <omp.h>

#include "congen/error.hpp"
#include "congen/text.hpp"

namespace congen {

std::vector<CleanSentence> document_sentences(const RawDocument& doc,
                                              const SentenceFilter& filter) {
  std::vector<CleanSentence> out;
  const auto plain = strip_markup(doc.body);
  const auto segments = segment_sentences(plain);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    auto tokens = tokenize(segments[i]);
    if (tokens.size() < filter.min_tokens || tokens.size() > filter.max_tokens) {
      continue;
    }
    out.push_back(CleanSentence{doc.doc_id, static_cast<std::uint32_t>(i),
                                segments[i], std::move(tokens)});
  }
  return out;
}

std::vector<CleanSentence> ingest_documents_serial(
    std::span<const RawDocument> docs, const SentenceFilter& filter) {
  std::vector<CleanSentence> out;
  for (const auto& doc : docs) {
    auto part = document_sentences(doc, filter);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<CleanSentence> ingest_documents(std::span<const RawDocument> docs,
                                            const SentenceFilter& filter) {
  std::vector<std::vector<CleanSentence>> parts(docs.size());
  const auto n = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    parts[static_cast<std::size_t>(i)] =
        document_sentences(docs[static_cast<std::size_t>(i)], filter);
  }
  std::vector<CleanSentence> out;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

Json to_json(const CleanSentence& s) {
  Json j;
  j["doc_id"] = s.doc_id;
  j["sent_idx"] = s.sent_idx;
  j["text"] = s.text;
  j["tokens"] = s.tokens;
  return j;
}

CleanSentence sentence_from_json(const Json& j, std::uint64_t line) {
  const auto where = "line " + std::to_string(line) + ": ";
  for (const char* key : {"doc_id", "sent_idx", "text"}) {
    if (!j.contains(key)) {
      throw ParseError(where + "missing field \"" + key + "\"", line);
    }
  }
  try {
    CleanSentence s;
    s.doc_id = j.at("doc_id").get<std::uint64_t>();
    s.sent_idx = j.at("sent_idx").get<std::uint32_t>();
    s.text = j.at("text").get<std::string>();
    if (j.contains("tokens")) {
      s.tokens = j.at("tokens").get<std::vector<std::string>>();
    } else {
      s.tokens = tokenize(s.text);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + "bad sentence record (" + e.what() + ")", line);
  }
}

std::optional<CleanSentence> SentenceReader::next() {
  auto j = reader_.next();
  if (!j) return std::nullopt;
  return sentence_from_json(*j, reader_.line());
}

std::vector<CleanSentence> read_sentences(const std::filesystem::path& path) {
  auto in = open_text(path);
  SentenceReader reader(in);
  std::vector<CleanSentence> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

}  // namespace congen
