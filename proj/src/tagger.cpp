#include "congen/tagger.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "congen/binary_io.hpp"
#include "congen/error.hpp"
#include "congen/rng.hpp"
#include "congen/text.hpp"
#include "unicode.hpp"

namespace congen {
namespace {

constexpr std::array<std::string_view, kNumTags> kTagNames = {
    "NOUN", "VERB", "ADJ", "ADV",  "PRON",  "DET",
    "ADP",  "NUM",  "CONJ", "PRT", "PUNCT", "X"};

constexpr std::string_view kModelMagic = "CGPT";
constexpr std::uint16_t kModelVersion = 1;

constexpr std::string_view kStart = "-START-";
constexpr std::string_view kStart2 = "-START2-";
constexpr std::string_view kEnd = "-END-";

// Code-point prefix / suffix of up to n characters.
std::string prefix(std::string_view w, std::size_t n) {
  std::size_t pos = 0;
  for (std::size_t k = 0; k < n && pos < w.size(); ++k) {
    pos += unicode::decode(w, pos).len;
  }
  return std::string(w.substr(0, pos));
}

std::string suffix(std::string_view w, std::size_t n) {
  std::vector<std::size_t> starts;
  for (std::size_t pos = 0; pos < w.size();) {
    starts.push_back(pos);
    pos += unicode::decode(w, pos).len;
  }
  if (starts.size() <= n) return std::string(w);
  return std::string(w.substr(starts[starts.size() - n]));
}

std::size_t argmax(const TagWeights& scores) {
  std::size_t best = 0;
  for (std::size_t t = 1; t < kNumTags; ++t) {
    if (scores[t] > scores[best]) best = t;
  }
  return best;
}

TagWeights score(const std::unordered_map<std::string, TagWeights>& table,
                 const std::vector<std::string>& features) {
  TagWeights scores{};
  for (const auto& f : features) {
    const auto it = table.find(f);
    if (it == table.end()) continue;
    for (std::size_t t = 0; t < kNumTags; ++t) scores[t] += it->second[t];
  }
  return scores;
}

// Lazy averaging state (Collins): totals accumulate weight * time. An update
// made while seeing instance k counts toward instances k..N.
struct Trainer {
  std::unordered_map<std::string, TagWeights> weights;
  std::unordered_map<std::string, TagWeights> totals;
  std::unordered_map<std::string, std::array<std::uint64_t, kNumTags>> stamps;
  std::uint64_t instances = 0;

  void bump(const std::string& f, std::size_t tag, double delta) {
    auto& w = weights[f];
    auto& tot = totals[f];
    auto& st = stamps[f];
    tot[tag] += static_cast<double>(instances - st[tag]) * w[tag];
    st[tag] = instances;
    w[tag] += delta;
  }

  void update(std::size_t truth, std::size_t guess,
              const std::vector<std::string>& features) {
    if (truth != guess) {
      for (const auto& f : features) {
        bump(f, truth, 1.0);
        bump(f, guess, -1.0);
      }
    }
    ++instances;
  }

  std::unordered_map<std::string, TagWeights> average() const {
    std::unordered_map<std::string, TagWeights> avg;
    const double n = static_cast<double>(std::max<std::uint64_t>(instances, 1));
    for (const auto& [f, w] : weights) {
      const auto& tot = totals.at(f);
      const auto& st = stamps.at(f);
      TagWeights a{};
      bool nonzero = false;
      for (std::size_t t = 0; t < kNumTags; ++t) {
        const double total =
            tot[t] + static_cast<double>(instances - st[t]) * w[t];
        a[t] = total / n;
        nonzero = nonzero || a[t] != 0.0;
      }
      if (nonzero) avg.emplace(f, a);
    }
    return avg;
  }
};

std::string_view tag_context(std::span<const PosTag> tags, std::size_t i,
                             std::size_t back) {
  if (i < back) return back == 1 ? kStart : (i == 0 ? kStart2 : kStart);
  return tag_name(tags[i - back]);
}

void write_table(ByteWriter& w,
                 const std::unordered_map<std::string, TagWeights>& table) {
  std::vector<const std::string*> keys;
  keys.reserve(table.size());
  for (const auto& kv : table) keys.push_back(&kv.first);
  std::sort(keys.begin(), keys.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  w.u64(keys.size());
  std::string prev;
  for (const auto* k : keys) {
    // Front-coded against the previous key.
    std::size_t shared = 0;
    while (shared < prev.size() && shared < k->size() &&
           prev[shared] == (*k)[shared]) {
      ++shared;
    }
    w.varint(shared);
    w.str(std::string_view(*k).substr(shared));
    for (double v : table.at(*k)) w.f64(v);
    prev = *k;
  }
}

std::unordered_map<std::string, TagWeights> read_table(ByteReader& r) {
  std::unordered_map<std::string, TagWeights> table;
  const auto n = r.u64();
  table.reserve(n);
  std::string prev;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto shared = r.varint();
    if (shared > prev.size()) throw ParseError("corrupt model feature table");
    std::string key = prev.substr(0, shared) + r.str();
    TagWeights w{};
    for (auto& v : w) v = r.f64();
    table.emplace(key, w);
    prev = std::move(key);
  }
  return table;
}

}  // namespace

std::string_view tag_name(PosTag t) {
  return kTagNames[static_cast<std::size_t>(t)];
}

std::optional<PosTag> parse_tag(std::string_view name) {
  for (std::size_t i = 0; i < kNumTags; ++i) {
    if (kTagNames[i] == name) return static_cast<PosTag>(i);
  }
  return std::nullopt;
}

std::vector<TaggedSentence> read_tagged_corpus(std::istream& in) {
  std::vector<TaggedSentence> out;
  TaggedSentence cur;
  std::string line;
  std::uint64_t line_no = 0;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = {};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError("line " + std::to_string(line_no) +
                           ": expected \"token<TAB>tag\"",
                       line_no);
    }
    const auto tag_text = line.substr(tab + 1);
    const auto tag = parse_tag(tag_text);
    if (!tag) {
      throw ParseError("line " + std::to_string(line_no) + ": unknown tag \"" +
                           tag_text + "\"",
                       line_no);
    }
    cur.tokens.push_back(line.substr(0, tab));
    cur.tags.push_back(*tag);
  }
  flush();
  return out;
}

std::vector<TaggedSentence> read_tagged_corpus(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + p.string());
  return read_tagged_corpus(in);
}

std::vector<std::string> tagger_features(std::span<const std::string> tokens,
                                         std::size_t i, std::string_view prev,
                                         std::string_view prev2) {
  const std::string& raw = tokens[i];
  const auto word = to_lower(raw);
  std::vector<std::string> f;
  f.reserve(16);
  f.emplace_back("bias");
  f.push_back("w " + word);
  for (std::size_t n = 1; n <= 3; ++n) {
    f.push_back("p" + std::to_string(n) + " " + prefix(word, n));
    f.push_back("s" + std::to_string(n) + " " + suffix(word, n));
  }
  f.push_back("t-1 " + std::string(prev));
  f.push_back("t-2 " + std::string(prev2) + " " + std::string(prev));
  f.push_back("w-1 " + (i == 0 ? std::string(kStart) : to_lower(tokens[i - 1])));
  f.push_back("w+1 " + (i + 1 == tokens.size() ? std::string(kEnd)
                                               : to_lower(tokens[i + 1])));
  if (std::any_of(raw.begin(), raw.end(),
                  [](char c) { return c >= '0' && c <= '9'; })) {
    f.emplace_back("has-digit");
  }
  if (raw.find('-') != std::string::npos) f.emplace_back("has-hyphen");
  if (!raw.empty() && unicode::is_upper(unicode::decode(raw, 0).cp)) {
    f.emplace_back("capitalized");
  }
  return f;
}

PerceptronModel train_tagger(std::span<const TaggedSentence> corpus,
                             std::uint32_t epochs, std::uint64_t seed) {
  if (corpus.empty()) throw Error("training corpus is empty");
  for (const auto& s : corpus) {
    if (s.tokens.size() != s.tags.size()) {
      throw Error("token/tag count mismatch in training corpus");
    }
  }
  Trainer trainer;
  std::mt19937_64 gen(seed);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::uint32_t e = 0; e < epochs; ++e) {
    seeded_shuffle(order, gen);
    for (const auto idx : order) {
      const auto& sent = corpus[idx];
      std::vector<PosTag> guesses;
      guesses.reserve(sent.tokens.size());
      for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
        const auto features =
            tagger_features(sent.tokens, i, tag_context(guesses, i, 1),
                            tag_context(guesses, i, 2));
        const auto guess = argmax(score(trainer.weights, features));
        trainer.update(static_cast<std::size_t>(sent.tags[i]), guess, features);
        guesses.push_back(static_cast<PosTag>(guess));
      }
    }
  }
  PerceptronModel model;
  model.averaged = trainer.average();
  for (auto& [f, w] : trainer.weights) {
    if (std::any_of(w.begin(), w.end(), [](double v) { return v != 0.0; })) {
      model.weights.emplace(f, w);
    }
  }
  model.epochs = epochs;
  model.seed = seed;
  model.instances = trainer.instances;
  return model;
}

std::vector<PosTag> tag(const PerceptronModel& model,
                        std::span<const std::string> tokens, WeightSet which) {
  const auto& table =
      which == WeightSet::kAveraged ? model.averaged : model.weights;
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto features = tagger_features(tokens, i, tag_context(tags, i, 1),
                                          tag_context(tags, i, 2));
    tags.push_back(static_cast<PosTag>(argmax(score(table, features))));
  }
  return tags;
}

double tagging_accuracy(const PerceptronModel& model,
                        std::span<const TaggedSentence> gold,
                        WeightSet which) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const auto& s : gold) {
    const auto predicted = tag(model, s.tokens, which);
    for (std::size_t i = 0; i < s.tags.size(); ++i) {
      correct += predicted[i] == s.tags[i] ? 1 : 0;
    }
    total += s.tags.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

std::string PerceptronModel::serialize() const {
  ByteWriter w;
  w.bytes(kModelMagic);
  w.u16(kModelVersion);
  w.u8(static_cast<std::uint8_t>(kNumTags));
  for (auto name : kTagNames) w.str(name);
  w.u32(epochs);
  w.u64(seed);
  w.u64(instances);
  write_table(w, averaged);
  write_table(w, weights);
  return w.take();
}

PerceptronModel PerceptronModel::deserialize(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.bytes(4) != kModelMagic) throw ParseError("not a tagger model (bad magic)");
  if (const auto v = r.u16(); v != kModelVersion) {
    throw ParseError("unsupported tagger model version " + std::to_string(v));
  }
  const auto ntags = r.u8();
  if (ntags != kNumTags) throw ParseError("tagger model has a different tag set");
  for (auto name : kTagNames) {
    if (r.str() != name) throw ParseError("tagger model has a different tag set");
  }
  PerceptronModel m;
  m.epochs = r.u32();
  m.seed = r.u64();
  m.instances = r.u64();
  m.averaged = read_table(r);
  m.weights = read_table(r);
  if (!r.done()) throw ParseError("trailing bytes in tagger model");
  return m;
}

void PerceptronModel::save(const std::filesystem::path& path) const {
  write_file(path.string(), serialize());
}

PerceptronModel PerceptronModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path.string()));
}

}  // namespace congen
