#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace congen {

/// Universal 12-tag set. Enumeration order is the tie-break order.
enum class PosTag : std::uint8_t {
  kNoun,
  kVerb,
  kAdj,
  kAdv,
  kPron,
  kDet,
  kAdp,
  kNum,
  kConj,
  kPrt,
  kPunct,
  kX,
};

inline constexpr std::size_t kNumTags = 12;

std::string_view tag_name(PosTag t);
std::optional<PosTag> parse_tag(std::string_view name);

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<PosTag> tags;
};

/// Reads "token<TAB>tag" lines, blank line between sentences. Unknown tags
/// and malformed lines raise ParseError naming the line.
std::vector<TaggedSentence> read_tagged_corpus(std::istream& in);
std::vector<TaggedSentence> read_tagged_corpus(const std::filesystem::path& p);

using TagWeights = std::array<double, kNumTags>;

/// Averaged perceptron POS model. `weights` are the final online weights,
/// `averaged` their running average over every training instance; only the
/// averaged table is used by `tag`.
struct PerceptronModel {
  std::unordered_map<std::string, TagWeights> weights;
  std::unordered_map<std::string, TagWeights> averaged;
  std::uint32_t epochs = 0;
  std::uint64_t seed = 0;
  std::uint64_t instances = 0;

  std::string serialize() const;
  static PerceptronModel deserialize(std::string_view bytes);

  void save(const std::filesystem::path& path) const;
  static PerceptronModel load(const std::filesystem::path& path);
};

PerceptronModel train_tagger(std::span<const TaggedSentence> corpus,
                             std::uint32_t epochs, std::uint64_t seed);

enum class WeightSet { kAveraged, kFinal };

/// Greedy left-to-right decoding. Output has the same length as `tokens`.
std::vector<PosTag> tag(const PerceptronModel& model,
                        std::span<const std::string> tokens,
                        WeightSet which = WeightSet::kAveraged);

/// Token accuracy of the model against gold tags.
double tagging_accuracy(const PerceptronModel& model,
                        std::span<const TaggedSentence> gold,
                        WeightSet which = WeightSet::kAveraged);

/// Feature strings for position `i` given the two previous tags; exposed for
/// tests.
std::vector<std::string> tagger_features(std::span<const std::string> tokens,
                                         std::size_t i, std::string_view prev,
                                         std::string_view prev2);

}  // namespace congen
