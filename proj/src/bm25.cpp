#include "congen/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <omp.h>

#include "congen/binary_io.hpp"
#include "congen/error.hpp"
#include "congen/lemmatizer.hpp"

namespace congen {
namespace {

constexpr std::string_view kIndexMagic = "CGFI";
constexpr std::uint16_t kIndexVersion = 1;

enum Section : std::uint8_t {
  kParams = 1,
  kStats = 2,
  kDictionary = 3,
  kPostings = 4,
  kIdMap = 5,
};

using TermPostings = std::map<std::string, std::vector<Posting>, std::less<>>;

void index_range(std::span<const CleanSentence> sentences, std::size_t begin,
                 std::size_t end, TermPostings& out) {
  std::vector<std::string_view> sorted;
  for (std::size_t d = begin; d < end; ++d) {
    const auto& toks = sentences[d].tokens;
    sorted.assign(toks.begin(), toks.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      auto it = out.find(sorted[i]);
      if (it == out.end()) it = out.emplace(std::string(sorted[i]), std::vector<Posting>{}).first;
      it->second.push_back(
          Posting{static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(j - i)});
      i = j;
    }
  }
}

void check_buildable(std::span<const CleanSentence> sentences) {
  if (sentences.empty()) throw Error("cannot build an index from no sentences");
  if (sentences.size() > UINT32_MAX) throw Error("too many sentences for one index");
}

// Keeps the k best hits of `hits` in ranking order.
void keep_top_k(std::vector<ScoredHit>& hits, std::size_t k) {
  if (hits.size() > k) {
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k),
                      hits.end(), ranks_before);
    hits.resize(k);
  } else {
    std::sort(hits.begin(), hits.end(), ranks_before);
  }
}

std::vector<std::string> unique_terms(std::span<const std::string> query) {
  std::vector<std::string> q(query.begin(), query.end());
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  return q;
}

void write_section(ByteWriter& out, Section id, const ByteWriter& payload) {
  out.u8(id);
  out.u64(payload.size());
  out.bytes(payload.data());
}

std::string_view read_section(ByteReader& r, Section expected) {
  const auto id = r.u8();
  if (id != expected) {
    throw ParseError("index section " + std::to_string(expected) +
                         " expected, found " + std::to_string(id),
                     0, static_cast<std::int64_t>(r.pos()));
  }
  return r.bytes(r.u64());
}

}  // namespace

Bm25Index Bm25Index::build_serial(std::span<const CleanSentence> sentences,
                                  const Bm25Params& params) {
  check_buildable(sentences);
  TermPostings all;
  index_range(sentences, 0, sentences.size(), all);
  Bm25Index idx;
  idx.params_ = params;
  for (auto& [term, list] : all) {
    idx.terms_.push_back(term);
    idx.postings_.push_back(std::move(list));
  }
  idx.id_map_.reserve(sentences.size());
  for (const auto& s : sentences) idx.id_map_.push_back({s.doc_id, s.sent_idx});
  idx.doc_lengths_.resize(sentences.size());
  idx.finish();
  return idx;
}

Bm25Index Bm25Index::build(std::span<const CleanSentence> sentences,
                           const Bm25Params& params) {
  check_buildable(sentences);
  const std::size_t n = sentences.size();
  const std::size_t shards =
      std::max<std::size_t>(1, std::min<std::size_t>(omp_get_max_threads() * 4, n / 256 + 1));
  std::vector<TermPostings> parts(shards);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(shards); ++s) {
    const auto k = static_cast<std::size_t>(s);
    index_range(sentences, n * k / shards, n * (k + 1) / shards, parts[k]);
  }
  // K-way merge; shards cover increasing ordinal ranges, so appending each
  // shard's list in shard order keeps every posting list sorted.
  Bm25Index idx;
  idx.params_ = params;
  std::vector<TermPostings::iterator> cursors;
  for (auto& p : parts) cursors.push_back(p.begin());
  while (true) {
    const std::string* next = nullptr;
    for (std::size_t k = 0; k < shards; ++k) {
      if (cursors[k] != parts[k].end() && (next == nullptr || cursors[k]->first < *next)) {
        next = &cursors[k]->first;
      }
    }
    if (next == nullptr) break;
    const std::string term = *next;
    std::vector<Posting> merged;
    for (std::size_t k = 0; k < shards; ++k) {
      if (cursors[k] != parts[k].end() && cursors[k]->first == term) {
        auto& list = cursors[k]->second;
        merged.insert(merged.end(), list.begin(), list.end());
        ++cursors[k];
      }
    }
    idx.terms_.push_back(term);
    idx.postings_.push_back(std::move(merged));
  }
  idx.id_map_.reserve(n);
  for (const auto& s : sentences) idx.id_map_.push_back({s.doc_id, s.sent_idx});
  idx.doc_lengths_.resize(n);
  idx.finish();
  return idx;
}

void Bm25Index::finish() {
  std::fill(doc_lengths_.begin(), doc_lengths_.end(), 0);
  term_ids_.clear();
  lemma_terms_.clear();
  for (std::uint32_t t = 0; t < terms_.size(); ++t) {
    term_ids_.emplace(terms_[t], t);
    for (const auto& p : postings_[t]) doc_lengths_[p.ordinal] += p.tf;
    auto noun = lemmatize(terms_[t], PosTag::kNoun);
    auto verb = lemmatize(terms_[t], PosTag::kVerb);
    lemma_terms_[noun].push_back(t);
    if (verb != noun) lemma_terms_[verb].push_back(t);
  }
  total_length_ = 0;
  for (auto len : doc_lengths_) total_length_ += len;
  avgdl_ = doc_lengths_.empty()
               ? 0.0
               : static_cast<double>(total_length_) / doc_lengths_.size();
}

std::optional<std::uint32_t> Bm25Index::term_id(std::string_view term) const {
  const auto it = term_ids_.find(std::string(term));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Bm25Index::df(std::string_view term) const {
  const auto id = term_id(term);
  return id ? static_cast<std::uint32_t>(postings_[*id].size()) : 0;
}

double Bm25Index::idf(std::uint32_t df) const {
  const double n = size();
  const double d = df;
  return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

double Bm25Index::score(std::span<const std::string> query,
                        std::uint32_t ordinal) const {
  if (ordinal >= size()) throw Error("ordinal out of range");
  const double norm = params_.k1 * (1.0 - params_.b +
                                    params_.b * doc_lengths_[ordinal] / avgdl_);
  double total = 0.0;
  for (const auto& term : unique_terms(query)) {
    const auto id = term_id(term);
    if (!id) continue;
    const auto& list = postings_[*id];
    const auto it = std::lower_bound(
        list.begin(), list.end(), ordinal,
        [](const Posting& p, std::uint32_t o) { return p.ordinal < o; });
    if (it == list.end() || it->ordinal != ordinal) continue;
    const double tf = it->tf;
    total += idf(static_cast<std::uint32_t>(list.size())) * tf *
             (params_.k1 + 1.0) / (tf + norm);
  }
  return total;
}

std::vector<ScoredHit> Bm25Index::search_serial(std::span<const std::string> query,
                                                std::size_t k) const {
  if (k == 0) return {};
  std::vector<double> acc(size(), 0.0);
  std::vector<char> touched(size(), 0);
  for (const auto& term : unique_terms(query)) {
    const auto id = term_id(term);
    if (!id) continue;
    const auto& list = postings_[*id];
    const double w = idf(static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      const double tf = p.tf;
      const double norm = params_.k1 * (1.0 - params_.b +
                                        params_.b * doc_lengths_[p.ordinal] / avgdl_);
      acc[p.ordinal] += w * tf * (params_.k1 + 1.0) / (tf + norm);
      touched[p.ordinal] = 1;
    }
  }
  std::vector<ScoredHit> hits;
  for (std::uint32_t o = 0; o < size(); ++o) {
    if (touched[o] && acc[o] > 0.0) hits.push_back({o, acc[o]});
  }
  keep_top_k(hits, k);
  return hits;
}

std::vector<ScoredHit> Bm25Index::search(std::span<const std::string> query,
                                         std::size_t k) const {
  if (k == 0) return {};
  const auto terms = unique_terms(query);
  std::vector<std::uint32_t> ids;
  for (const auto& t : terms) {
    if (auto id = term_id(t)) ids.push_back(*id);
  }
  if (ids.empty()) return {};
  const std::uint32_t n = size();
  const int shards = std::max(1, std::min<int>(omp_get_max_threads(),
                                               static_cast<int>(n / 1024) + 1));
  std::vector<std::vector<ScoredHit>> local(static_cast<std::size_t>(shards));
#pragma omp parallel for schedule(static, 1)
  for (int s = 0; s < shards; ++s) {
    const auto lo = static_cast<std::uint32_t>(std::uint64_t{n} * s / shards);
    const auto hi = static_cast<std::uint32_t>(std::uint64_t{n} * (s + 1) / shards);
    std::vector<double> acc(hi - lo, 0.0);
    std::vector<char> touched(hi - lo, 0);
    for (const auto id : ids) {
      const auto& list = postings_[id];
      const double w = idf(static_cast<std::uint32_t>(list.size()));
      auto it = std::lower_bound(
          list.begin(), list.end(), lo,
          [](const Posting& p, std::uint32_t o) { return p.ordinal < o; });
      for (; it != list.end() && it->ordinal < hi; ++it) {
        const double tf = it->tf;
        const double norm = params_.k1 * (1.0 - params_.b +
                                          params_.b * doc_lengths_[it->ordinal] / avgdl_);
        acc[it->ordinal - lo] += w * tf * (params_.k1 + 1.0) / (tf + norm);
        touched[it->ordinal - lo] = 1;
      }
    }
    auto& mine = local[static_cast<std::size_t>(s)];
    for (std::uint32_t o = lo; o < hi; ++o) {
      if (touched[o - lo] && acc[o - lo] > 0.0) mine.push_back({o, acc[o - lo]});
    }
    keep_top_k(mine, k);
  }
  std::vector<ScoredHit> hits;
  for (auto& l : local) hits.insert(hits.end(), l.begin(), l.end());
  keep_top_k(hits, k);
  return hits;
}

std::vector<ScoredHit> Bm25Index::concept_match(const ConceptSet& concepts,
                                                std::size_t min_match) const {
  if (concepts.empty()) throw Error("concept set is empty");
  if (min_match == 0) throw Error("min_match must be at least 1");
  std::vector<std::uint32_t> all;
  for (const auto& c : concepts) {
    const auto it = lemma_terms_.find(c);
    if (it == lemma_terms_.end()) continue;
    std::vector<std::uint32_t> ords;
    for (const auto t : it->second) {
      for (const auto& p : postings_[t]) ords.push_back(p.ordinal);
    }
    std::sort(ords.begin(), ords.end());
    ords.erase(std::unique(ords.begin(), ords.end()), ords.end());
    all.insert(all.end(), ords.begin(), ords.end());
  }
  std::sort(all.begin(), all.end());
  std::vector<ScoredHit> hits;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    if (j - i >= min_match) hits.push_back({all[i], score(concepts.concepts(), all[i])});
    i = j;
  }
  std::sort(hits.begin(), hits.end(), ranks_before);
  return hits;
}

std::vector<std::uint32_t> concept_match_extract(const Bm25Index& index,
                                                 const ConceptSet& concepts,
                                                 std::size_t min_match) {
  std::vector<std::uint32_t> out;
  for (const auto& h : index.concept_match(concepts, min_match)) {
    out.push_back(h.ordinal);
  }
  return out;
}

std::vector<std::string> Bm25Index::check_invariants() const {
  std::vector<std::string> bad;
  if (postings_.size() != terms_.size()) bad.emplace_back("term/postings count mismatch");
  if (!std::is_sorted(terms_.begin(), terms_.end()) ||
      std::adjacent_find(terms_.begin(), terms_.end()) != terms_.end()) {
    bad.emplace_back("term dictionary not strictly sorted");
  }
  std::vector<std::uint64_t> sums(size(), 0);
  for (std::size_t t = 0; t < postings_.size(); ++t) {
    const auto& list = postings_[t];
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i > 0 && list[i].ordinal <= list[i - 1].ordinal) {
        bad.push_back("posting list of \"" + terms_[t] + "\" not increasing");
        break;
      }
      if (list[i].ordinal >= size() || list[i].tf == 0) {
        bad.push_back("bad posting in \"" + terms_[t] + "\"");
        break;
      }
      sums[list[i].ordinal] += list[i].tf;
    }
  }
  for (std::uint32_t d = 0; d < size(); ++d) {
    if (sums[d] != doc_lengths_[d]) {
      bad.push_back("tf sum != doc length for ordinal " + std::to_string(d));
      break;
    }
  }
  if (id_map_.size() != doc_lengths_.size()) bad.emplace_back("id map size mismatch");
  if (size() > 0) {
    const double expect = static_cast<double>(total_length_) / size();
    if (std::abs(avgdl_ - expect) > 1e-12 * std::max(1.0, expect)) {
      bad.emplace_back("avgdl inconsistent with document lengths");
    }
  }
  return bad;
}

std::string Bm25Index::serialize() const {
  ByteWriter out;
  out.bytes(kIndexMagic);
  out.u16(kIndexVersion);

  ByteWriter params;
  params.f64(params_.k1);
  params.f64(params_.b);
  write_section(out, kParams, params);

  ByteWriter stats;
  stats.u64(size());
  stats.u64(total_length_);
  stats.f64(avgdl_);
  write_section(out, kStats, stats);

  ByteWriter dict;
  dict.u64(terms_.size());
  std::string_view prev;
  for (const auto& term : terms_) {
    std::size_t shared = 0;
    while (shared < prev.size() && shared < term.size() && prev[shared] == term[shared]) {
      ++shared;
    }
    dict.varint(shared);
    dict.str(std::string_view(term).substr(shared));
    prev = term;
  }
  write_section(out, kDictionary, dict);

  ByteWriter posts;
  for (const auto& list : postings_) {
    posts.varint(list.size());
    std::uint32_t last = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      posts.varint(i == 0 ? list[i].ordinal : list[i].ordinal - last);
      posts.varint(list[i].tf);
      last = list[i].ordinal;
    }
  }
  write_section(out, kPostings, posts);

  ByteWriter ids;
  for (const auto& ref : id_map_) {
    ids.varint(ref.doc_id);
    ids.varint(ref.sent_idx);
  }
  write_section(out, kIdMap, ids);
  return out.take();
}

Bm25Index Bm25Index::deserialize(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.bytes(4) != kIndexMagic) throw ParseError("not an index file (bad magic)");
  if (const auto v = r.u16(); v != kIndexVersion) {
    throw ParseError("unsupported index version " + std::to_string(v));
  }
  Bm25Index idx;
  {
    ByteReader s(read_section(r, kParams));
    idx.params_.k1 = s.f64();
    idx.params_.b = s.f64();
  }
  std::uint64_t n = 0;
  double stored_avgdl = 0.0;
  std::uint64_t stored_total = 0;
  {
    ByteReader s(read_section(r, kStats));
    n = s.u64();
    stored_total = s.u64();
    stored_avgdl = s.f64();
  }
  {
    ByteReader s(read_section(r, kDictionary));
    const auto count = s.u64();
    std::string prev;
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto shared = s.varint();
      if (shared > prev.size()) throw ParseError("corrupt term dictionary");
      std::string term = prev.substr(0, shared) + s.str();
      idx.terms_.push_back(term);
      prev = std::move(term);
    }
  }
  {
    ByteReader s(read_section(r, kPostings));
    idx.postings_.resize(idx.terms_.size());
    for (auto& list : idx.postings_) {
      const auto df = s.varint();
      list.reserve(df);
      std::uint64_t ord = 0;
      for (std::uint64_t i = 0; i < df; ++i) {
        const auto delta = s.varint();
        if (i > 0 && delta == 0) throw ParseError("posting list not increasing");
        ord = i == 0 ? delta : ord + delta;
        if (ord >= n) throw ParseError("posting ordinal out of range");
        list.push_back(Posting{static_cast<std::uint32_t>(ord),
                               static_cast<std::uint32_t>(s.varint())});
      }
    }
  }
  {
    ByteReader s(read_section(r, kIdMap));
    idx.id_map_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto doc = s.varint();
      idx.id_map_.push_back({doc, static_cast<std::uint32_t>(s.varint())});
    }
  }
  if (!r.done()) throw ParseError("trailing bytes in index file");
  idx.doc_lengths_.resize(n);
  idx.finish();
  if (idx.total_length_ != stored_total || idx.avgdl_ != stored_avgdl) {
    throw ParseError("index statistics do not match postings");
  }
  return idx;
}

void Bm25Index::save(const std::filesystem::path& path) const {
  write_file(path.string(), serialize());
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
  return deserialize(read_file(path.string()));
}

}  // namespace congen
