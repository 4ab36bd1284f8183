#include "congen/dataset.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <omp.h>
#include <spdlog/spdlog.h>

#include "congen/error.hpp"
#include "congen/rng.hpp"
#include "congen/text.hpp"

namespace congen {
namespace {

void check_max_concepts(std::size_t max_concepts) {
  if (max_concepts < 2 || max_concepts > 5) {
    throw Error("max_concepts must be in [2, 5], got " +
                std::to_string(max_concepts));
  }
}

// nullopt when the sentence is skipped.
std::optional<ReconRecord> recon_one(const CleanSentence& s,
                                     const PerceptronModel& model,
                                     std::size_t max_concepts, bool& reduced) {
  auto concepts = extract_concepts(model, s);
  reduced = false;
  if (concepts.size() < 2) return std::nullopt;
  if (concepts.size() > max_concepts) {
    concepts = subsample_concepts(concepts, max_concepts, s.doc_id, s.sent_idx);
    reduced = true;
  }
  return ReconRecord{std::move(concepts), s.text, {s.doc_id, s.sent_idx}};
}

}  // namespace

ConceptSet subsample_concepts(const ConceptSet& concepts, std::size_t max_concepts,
                              std::uint64_t doc_id, std::uint32_t sent_idx) {
  if (concepts.size() <= max_concepts) return concepts;
  std::mt19937_64 gen(splitmix64(doc_id) ^ splitmix64(0x5EED0000ULL + sent_idx));
  std::vector<std::string> pool = concepts.concepts();
  // Partial Fisher-Yates: the first max_concepts slots are the sample.
  for (std::size_t i = 0; i < max_concepts; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(gen, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(max_concepts);
  return ConceptSet(std::move(pool));
}

std::vector<ReconRecord> build_recon_serial(std::span<const CleanSentence> sentences,
                                            const PerceptronModel& model,
                                            std::size_t max_concepts,
                                            ReconSummary* summary) {
  check_max_concepts(max_concepts);
  std::vector<ReconRecord> out;
  ReconSummary sum;
  for (const auto& s : sentences) {
    bool reduced = false;
    ++sum.sentences;
    if (auto r = recon_one(s, model, max_concepts, reduced)) {
      out.push_back(std::move(*r));
      ++sum.emitted;
      sum.subsampled += reduced ? 1 : 0;
    } else {
      ++sum.skipped;
    }
  }
  if (summary) *summary = sum;
  return out;
}

std::vector<ReconRecord> build_recon(std::span<const CleanSentence> sentences,
                                     const PerceptronModel& model,
                                     std::size_t max_concepts,
                                     ReconSummary* summary) {
  check_max_concepts(max_concepts);
  std::vector<std::optional<ReconRecord>> slots(sentences.size());
  std::vector<char> reduced(sentences.size(), 0);
  const auto n = static_cast<std::int64_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    bool r = false;
    slots[k] = recon_one(sentences[k], model, max_concepts, r);
    reduced[k] = r ? 1 : 0;
  }
  std::vector<ReconRecord> out;
  ReconSummary sum;
  sum.sentences = sentences.size();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (slots[k]) {
      out.push_back(std::move(*slots[k]));
      ++sum.emitted;
      sum.subsampled += reduced[k];
    } else {
      ++sum.skipped;
    }
  }
  if (summary) *summary = sum;
  return out;
}

ConceptSet concepts_from_json(const Json& j, std::uint64_t line) {
  const auto where = "line " + std::to_string(line) + ": ";
  if (!j.is_object() || !j.contains("concepts")) {
    throw ParseError(where + "missing field \"concepts\"", line);
  }
  const auto& arr = j.at("concepts");
  if (!arr.is_array()) throw ParseError(where + "\"concepts\" is not a list", line);
  std::vector<std::string> out;
  for (const auto& c : arr) {
    if (!c.is_string()) throw ParseError(where + "concept is not a string", line);
    out.push_back(to_lower(c.get<std::string>()));
  }
  ConceptSet set(std::move(out));
  if (set.empty()) throw ParseError(where + "empty concept list", line);
  return set;
}

std::vector<ConceptSet> load_commongen(std::istream& in) {
  JsonlReader reader(in);
  std::vector<ConceptSet> out;
  while (auto j = reader.next()) out.push_back(concepts_from_json(*j, reader.line()));
  return out;
}

std::vector<ConceptSet> load_commongen(const std::filesystem::path& path) {
  auto in = open_text(path);
  return load_commongen(in);
}

std::vector<ConceptSet> enumerate_pairs(std::span<const ConceptSet> sets) {
  std::set<ConceptSet> pairs;
  for (const auto& s : sets) {
    if (s.size() < 2) {
      throw Error("enumerate_pairs needs sets of size >= 2, got {" + s.joined(',') + "}");
    }
    const auto& c = s.concepts();
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        pairs.insert(ConceptSet{c[i], c[j]});
      }
    }
  }
  return {pairs.begin(), pairs.end()};
}

std::vector<ConceptSet> enumerate_sets(std::span<const ConceptSet> sets,
                                       std::size_t* dropped) {
  std::set<ConceptSet> unique;
  std::size_t n_dropped = 0;
  for (const auto& s : sets) {
    if (s.size() < 3 || s.size() > 5) {
      ++n_dropped;
      continue;
    }
    unique.insert(s);
  }
  if (n_dropped > 0) {
    spdlog::warn("enumerate_sets: dropped {} input sets outside sizes 3-5", n_dropped);
  }
  if (dropped) *dropped = n_dropped;
  return {unique.begin(), unique.end()};
}

AugmentationStats augmentation_stats(std::span<const ConceptSet> records) {
  AugmentationStats st;
  for (const auto& r : records) {
    ++st.n_sentences;
    ++st.per_size[r.size()];
  }
  return st;
}

AugmentationStats augmentation_stats(std::istream& jsonl) {
  JsonlReader reader(jsonl);
  AugmentationStats st;
  while (auto j = reader.next()) {
    const auto c = concepts_from_json(*j, reader.line());
    ++st.n_sentences;
    ++st.per_size[c.size()];
  }
  return st;
}

Json concepts_json(const ConceptSet& c) {
  Json j;
  j["concepts"] = c.concepts();
  return j;
}

Json to_json(const ReconRecord& r) {
  Json j;
  j["concepts"] = r.concepts.concepts();
  j["text"] = r.text;
  return j;
}

}  // namespace congen
