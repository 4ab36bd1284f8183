#include "congen/generator.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <future>
#include <set>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "congen/assets.hpp"
#include "congen/error.hpp"
#include "congen/lemmatizer.hpp"
#include "congen/text.hpp"

namespace congen {
namespace {

constexpr std::array<std::string_view, 5> kLocations = {
    "in the scene", "in the park", "on the street", "at home", "near the water"};

const std::unordered_set<std::string>& stub_verb_set() {
  static const auto set = [] {
    const auto v = assets::lines(assets::stub_verbs());
    return std::unordered_set<std::string>(v.begin(), v.end());
  }();
  return set;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string third_person(std::string_view verb) {
  std::string v(verb);
  if (ends_with(v, "s") || ends_with(v, "x") || ends_with(v, "z") ||
      ends_with(v, "ch") || ends_with(v, "sh") || ends_with(v, "o")) {
    return v + "es";
  }
  if (v.size() >= 2 && v.back() == 'y' && !is_vowel(v[v.size() - 2])) {
    v.pop_back();
    return v + "ies";
  }
  return v + "s";
}

std::string join_and(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::string excerpt(std::string_view body) {
  constexpr std::size_t kMax = 200;
  if (body.size() <= kMax) return std::string(body);
  return std::string(body.substr(0, kMax)) + "...";
}

bool transient_status(int status) { return status == 429 || status >= 500; }

}  // namespace

void GenRequest::validate() const {
  if (concepts.size() < 2 || concepts.size() > 5) {
    throw Error("generation request needs 2 to 5 concepts, got " +
                std::to_string(concepts.size()));
  }
  if (max_tokens < static_cast<int>(concepts.size())) {
    throw Error("max_tokens " + std::to_string(max_tokens) +
                " is smaller than the concept count");
  }
  if (num_candidates < 1) throw Error("num_candidates must be >= 1");
}

Json to_json(const GenRequest& r) {
  Json j;
  j["concepts"] = r.concepts.concepts();
  j["max_tokens"] = r.max_tokens;
  j["num_candidates"] = r.num_candidates;
  return j;
}

Json to_json(const SemiGoldenRecord& r) {
  Json j;
  j["concepts"] = r.concepts.concepts();
  j["text"] = r.text;
  j["coverage"] = r.coverage;
  j["generator_id"] = r.generator_id;
  return j;
}

SemiGoldenRecord semi_golden_from_json(const Json& j, std::uint64_t line) {
  const auto where = "line " + std::to_string(line) + ": ";
  SemiGoldenRecord r;
  try {
    r.concepts = ConceptSet(j.at("concepts").get<std::vector<std::string>>());
    r.text = j.at("text").get<std::string>();
    r.coverage = j.at("coverage").get<double>();
    r.generator_id = j.at("generator_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + "bad semi-golden record: " + e.what(), line);
  }
  return r;
}

std::string stub_generate(const ConceptSet& concepts, std::uint64_t seed) {
  const auto& verb_set = stub_verb_set();
  std::vector<std::string> nouns;
  std::vector<std::string> verbs;
  for (const auto& c : concepts) {
    (verb_set.contains(c) ? verbs : nouns).push_back(c);
  }

  std::string subject = "Someone";
  std::vector<std::string> objects;
  if (!nouns.empty()) {
    const auto s = static_cast<std::size_t>(seed % nouns.size());
    subject = std::string(is_vowel(nouns[s][0]) ? "An " : "A ") + nouns[s];
    for (std::size_t i = 0; i < nouns.size(); ++i) {
      if (i != s) objects.push_back("the " + nouns[i]);
    }
  }

  std::string predicate;
  if (!verbs.empty()) {
    std::vector<std::string> inflected;
    for (const auto& v : verbs) inflected.push_back(third_person(v));
    predicate = join_and(inflected);
    if (!objects.empty()) predicate += " " + join_and(objects);
  } else if (objects.empty()) {
    predicate = "is";
  } else {
    predicate = "is next to " + join_and(objects);
  }

  const auto n = std::max<std::uint64_t>(nouns.size(), 1);
  const auto location = kLocations[(seed / n) % kLocations.size()];
  return subject + " " + predicate + " " + std::string(location) + ".";
}

std::vector<std::string> StubGenerator::generate(const GenRequest& request) {
  request.validate();
  std::vector<std::string> out;
  for (int i = 0; i < request.num_candidates; ++i) {
    out.push_back(stub_generate(request.concepts, seed_ + static_cast<std::uint64_t>(i)));
  }
  return out;
}

HttpGenerator::HttpGenerator(std::string endpoint, HttpOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  const auto scheme = endpoint_.find("://");
  if (scheme == std::string::npos || endpoint_.substr(0, scheme) != "http") {
    throw Error("endpoint must be an http:// URL, got '" + endpoint_ + "'");
  }
  const auto path = endpoint_.find('/', scheme + 3);
  host_ = endpoint_.substr(0, path);
  if (path != std::string::npos) prefix_ = endpoint_.substr(path);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (host_.size() == scheme + 3) throw Error("endpoint has no host: '" + endpoint_ + "'");
  if (options_.attempts < 1) options_.attempts = 1;
}

std::vector<std::string> parse_generate_response(std::string_view body,
                                                 std::size_t expected) {
  const auto bad = [&](const std::string& why) {
    return GeneratorError("protocol violation: " + why + "; response: " + excerpt(body));
  };
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw bad("body is not JSON");
  if (!j.is_object() || !j.contains("sentences")) throw bad("missing \"sentences\"");
  const auto& arr = j.at("sentences");
  if (!arr.is_array()) throw bad("\"sentences\" is not a list");
  std::vector<std::string> out;
  for (const auto& s : arr) {
    if (!s.is_string()) throw bad("sentence is not a string");
    out.push_back(s.get<std::string>());
  }
  if (out.size() != expected) {
    throw bad("expected " + std::to_string(expected) + " sentences, got " +
              std::to_string(out.size()));
  }
  return out;
}

std::vector<std::string> HttpGenerator::generate(const GenRequest& request) {
  request.validate();
  const auto body = to_json(request).dump();
  auto delay = options_.backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.attempts; ++attempt) {
    // A client per call keeps concurrent requests independent.
    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    auto res = client.Post(prefix_ + "/v1/generate", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (transient_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + excerpt(res->body);
    } else if (res->status != 200) {
      throw GeneratorError("protocol violation: HTTP " + std::to_string(res->status) +
                           "; response: " + excerpt(res->body));
    } else {
      return parse_generate_response(res->body,
                                     static_cast<std::size_t>(request.num_candidates));
    }
    spdlog::debug("generate attempt {}/{} failed: {}", attempt, options_.attempts,
                  last_error);
    if (attempt < options_.attempts) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
  throw GeneratorError("generator at " + endpoint_ + " failed after " +
                       std::to_string(options_.attempts) + " attempts: " + last_error);
}

bool HttpGenerator::healthy() {
  httplib::Client client(host_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  auto res = client.Get(prefix_ + "/v1/health");
  if (!res || res->status != 200) return false;
  const auto j = nlohmann::json::parse(res->body, nullptr, false);
  return j.is_object() && j.value("status", "") == "ok";
}

double coverage(const ConceptSet& concepts, std::string_view sentence,
                const PerceptronModel* model) {
  if (concepts.empty()) throw Error("coverage of an empty concept set");
  const auto tokens = tokenize(sentence);
  std::set<std::string, std::less<>> found(tokens.begin(), tokens.end());
  if (model) {
    for (auto& l : lemmatized_tokens(*model, tokens)) found.insert(std::move(l));
  } else {
    for (const auto& t : tokens) found.insert(lemmatize_any(t));
  }
  std::size_t hits = 0;
  for (const auto& c : concepts) hits += found.contains(c) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(concepts.size());
}

Json to_json(const AssembleSummary& s) {
  Json j;
  j["queries"] = s.queries;
  j["written"] = s.written;
  j["rejected"] = s.rejected;
  j["failed"] = s.failed;
  j["mean_coverage"] = s.mean_coverage;
  return j;
}

AssembleSummary assemble(std::span<const ConceptSet> queries, Generator& generator,
                         const PerceptronModel* model, const AssembleOptions& options,
                         const std::function<void(const SemiGoldenRecord&)>& sink) {
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0)) {
    throw Error("coverage threshold must lie in [0, 1]");
  }
  const auto window = std::max<std::size_t>(options.in_flight, 1);
  const auto id = generator.id();

  auto launch = [&](std::size_t i) {
    return std::async(std::launch::async, [&, i] {
      GenRequest req{queries[i], options.max_tokens, options.num_candidates};
      req.validate();
      return generator.generate(req);
    });
  };

  AssembleSummary sum;
  double coverage_total = 0.0;
  std::uint64_t scored = 0;
  std::deque<std::future<std::vector<std::string>>> pending;
  std::size_t next = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    while (next < queries.size() && pending.size() < window) pending.push_back(launch(next++));
    auto fut = std::move(pending.front());
    pending.pop_front();
    ++sum.queries;

    std::vector<std::string> candidates;
    try {
      candidates = fut.get();
    } catch (const std::exception& e) {
      ++sum.failed;
      spdlog::warn("query {} {{{}}} skipped: {}", i, queries[i].joined(','), e.what());
      continue;
    }

    std::size_t best = 0;
    double best_cov = -1.0;
    std::size_t best_len = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double cov = coverage(queries[i], candidates[c], model);
      const auto len = tokenize(candidates[c]).size();
      if (cov > best_cov || (cov == best_cov && len < best_len)) {
        best = c;
        best_cov = cov;
        best_len = len;
      }
    }
    if (candidates.empty()) {
      ++sum.failed;
      spdlog::warn("query {} {{{}}} skipped: no candidates", i, queries[i].joined(','));
      continue;
    }
    coverage_total += best_cov;
    ++scored;
    if (best_cov < options.threshold) {
      ++sum.rejected;
      spdlog::info("query {} {{{}}} rejected: coverage {:.3f} < {:.3f}", i,
                   queries[i].joined(','), best_cov, options.threshold);
      continue;
    }
    sink(SemiGoldenRecord{queries[i], candidates[best], best_cov, id});
    ++sum.written;
  }
  sum.mean_coverage = scored ? coverage_total / static_cast<double>(scored) : 0.0;
  return sum;
}

std::size_t resume_position(std::span<const ConceptSet> queries,
                            std::span<const SemiGoldenRecord> written) {
  if (written.empty()) return 0;
  const auto& last = written.back().concepts;
  const auto it = std::find(queries.begin(), queries.end(), last);
  if (it == queries.end()) {
    throw Error("existing output ends with {" + last.joined(',') +
                "}, which is not in the query list; cannot resume");
  }
  return static_cast<std::size_t>(it - queries.begin()) + 1;
}

}  // namespace congen
