#include "congen/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "congen/error.hpp"
#include "congen/generator.hpp"
#include "congen/lemmatizer.hpp"
#include "congen/text.hpp"

namespace congen {
namespace {

constexpr int kMaxN = 4;
using NgramCounts = std::map<std::string, int>;

void require_nonempty(std::span<const EvalInstance> instances) {
  if (instances.empty()) throw Error("metrics need at least one instance");
}

NgramCounts ngrams(const Tokens& tokens, int n) {
  NgramCounts out;
  if (tokens.size() < static_cast<std::size_t>(n)) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++out[key];
  }
  return out;
}

template <typename F>
double corpus_mean(std::span<const EvalInstance> instances, Exec exec, F score) {
  require_nonempty(instances);
  std::vector<double> scores(instances.size());
  const auto n = static_cast<std::int64_t>(instances.size());
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) scores[i] = score(instances[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) scores[i] = score(instances[i]);
  }
  double total = 0.0;
  for (double s : scores) total += s;
  return total / static_cast<double>(scores.size());
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// One alignment stage; hyp_to_ref entries of -1 are unmatched.
void align_stage(const Tokens& hyp_keys, const Tokens& ref_keys,
                 std::vector<long>& hyp_to_ref, std::vector<char>& ref_used) {
  for (std::size_t i = 0; i < hyp_keys.size(); ++i) {
    if (hyp_to_ref[i] >= 0) continue;
    long pick = -1;
    if (i > 0 && hyp_to_ref[i - 1] >= 0) {
      const auto j = static_cast<std::size_t>(hyp_to_ref[i - 1] + 1);
      if (j < ref_keys.size() && !ref_used[j] && ref_keys[j] == hyp_keys[i]) {
        pick = static_cast<long>(j);
      }
    }
    for (std::size_t j = 0; pick < 0 && j < ref_keys.size(); ++j) {
      if (!ref_used[j] && ref_keys[j] == hyp_keys[i]) pick = static_cast<long>(j);
    }
    if (pick >= 0) {
      hyp_to_ref[i] = pick;
      ref_used[static_cast<std::size_t>(pick)] = 1;
    }
  }
}

Tokens stems(const Tokens& t) {
  Tokens out;
  out.reserve(t.size());
  for (const auto& w : t) out.push_back(lemmatize_any(w));
  return out;
}

double cosine(const std::map<std::string, double>& a,
              const std::map<std::string, double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [g, w] : a) {
    na += w * w;
    if (auto it = b.find(g); it != b.end()) dot += w * it->second;
  }
  for (const auto& [g, w] : b) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

double bleu4(std::span<const EvalInstance> instances) {
  require_nonempty(instances);
  std::array<std::uint64_t, kMaxN> matched{}, total{};
  std::uint64_t hyp_len = 0, ref_len = 0;
  for (const auto& inst : instances) {
    if (inst.references.empty()) throw Error("instance " + inst.id + " has no references");
    hyp_len += inst.hypothesis.size();
    std::size_t closest = inst.references.front().size();
    for (const auto& r : inst.references) {
      const auto d = [&](std::size_t len) {
        return len > inst.hypothesis.size() ? len - inst.hypothesis.size()
                                            : inst.hypothesis.size() - len;
      };
      if (d(r.size()) < d(closest) || (d(r.size()) == d(closest) && r.size() < closest)) {
        closest = r.size();
      }
    }
    ref_len += closest;
    for (int n = 1; n <= kMaxN; ++n) {
      const auto hyp = ngrams(inst.hypothesis, n);
      NgramCounts max_ref;
      for (const auto& r : inst.references) {
        for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
      }
      for (const auto& [g, c] : hyp) {
        total[n - 1] += c;
        if (auto it = max_ref.find(g); it != max_ref.end()) {
          matched[n - 1] += std::min(c, it->second);
        }
      }
    }
  }
  double log_sum = 0.0;
  for (int n = 0; n < kMaxN; ++n) {
    if (matched[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched[n]) / static_cast<double>(total[n]));
  }
  const double bp = hyp_len > ref_len
                        ? 1.0
                        : std::exp(1.0 - static_cast<double>(ref_len) /
                                             static_cast<double>(hyp_len));
  return bp * std::exp(log_sum / kMaxN);
}

double rouge_l_instance(const Tokens& hyp, std::span<const Tokens> refs) {
  double best = 0.0;
  if (hyp.empty()) return 0.0;
  for (const auto& r : refs) {
    if (r.empty()) continue;
    const auto lcs = static_cast<double>(lcs_length(hyp, r));
    if (lcs == 0.0) continue;
    const double p = lcs / static_cast<double>(hyp.size());
    const double rec = lcs / static_cast<double>(r.size());
    best = std::max(best, 2.0 * p * rec / (p + rec));
  }
  return best;
}

double rouge_l(std::span<const EvalInstance> instances, Exec exec) {
  return corpus_mean(instances, exec, [](const EvalInstance& inst) {
    return rouge_l_instance(inst.hypothesis, inst.references);
  });
}

MeteorAlignment meteor_align(const Tokens& hyp, const Tokens& ref) {
  std::vector<long> hyp_to_ref(hyp.size(), -1);
  std::vector<char> ref_used(ref.size(), 0);
  align_stage(hyp, ref, hyp_to_ref, ref_used);
  align_stage(stems(hyp), stems(ref), hyp_to_ref, ref_used);

  MeteorAlignment a;
  long prev_hyp = -2, prev_ref = -2;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (hyp_to_ref[i] < 0) continue;
    ++a.matches;
    const auto h = static_cast<long>(i);
    if (h != prev_hyp + 1 || hyp_to_ref[i] != prev_ref + 1) ++a.chunks;
    prev_hyp = h;
    prev_ref = hyp_to_ref[i];
  }
  return a;
}

double meteor_instance(const Tokens& hyp, std::span<const Tokens> refs) {
  double best = 0.0;
  for (const auto& r : refs) {
    const auto a = meteor_align(hyp, r);
    if (a.matches == 0) continue;
    const double m = static_cast<double>(a.matches);
    const double p = m / static_cast<double>(hyp.size());
    const double rec = m / static_cast<double>(r.size());
    const double f = 10.0 * p * rec / (rec + 9.0 * p);
    const double frag = static_cast<double>(a.chunks) / m;
    best = std::max(best, f * (1.0 - 0.5 * frag * frag * frag));
  }
  return best;
}

double meteor(std::span<const EvalInstance> instances, Exec exec) {
  return corpus_mean(instances, exec, [](const EvalInstance& inst) {
    return meteor_instance(inst.hypothesis, inst.references);
  });
}

std::vector<double> cider_instances(std::span<const EvalInstance> instances, Exec exec) {
  require_nonempty(instances);
  const auto count = instances.size();

  // Document frequency: instances whose reference set contains the n-gram.
  std::array<std::unordered_map<std::string, std::uint32_t>, kMaxN> df;
  for (const auto& inst : instances) {
    for (int n = 1; n <= kMaxN; ++n) {
      std::set<std::string> seen;
      for (const auto& r : inst.references) {
        for (const auto& [g, c] : ngrams(r, n)) seen.insert(g);
      }
      for (const auto& g : seen) ++df[n - 1][g];
    }
  }
  const double log_n = std::log(static_cast<double>(count));
  const auto tfidf = [&](const Tokens& t, int n) {
    std::map<std::string, double> v;
    for (const auto& [g, c] : ngrams(t, n)) {
      const auto it = df[n - 1].find(g);
      const double d = it == df[n - 1].end() ? 1.0 : static_cast<double>(it->second);
      v[g] = static_cast<double>(c) * (log_n - std::log(d));
    }
    return v;
  };
  const auto score = [&](const EvalInstance& inst) {
    double total = 0.0;
    for (int n = 1; n <= kMaxN; ++n) {
      const auto h = tfidf(inst.hypothesis, n);
      double sum = 0.0;
      for (const auto& r : inst.references) sum += cosine(h, tfidf(r, n));
      total += sum / static_cast<double>(inst.references.size());
    }
    return total * 10.0 / kMaxN;
  };

  std::vector<double> out(count);
  const auto n = static_cast<std::int64_t>(count);
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) out[i] = score(instances[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) out[i] = score(instances[i]);
  }
  return out;
}

double cider(std::span<const EvalInstance> instances, Exec exec) {
  const auto scores = cider_instances(instances, exec);
  double total = 0.0;
  for (double s : scores) total += s;
  return total / static_cast<double>(scores.size());
}

MetricReport evaluate(std::span<const EvalInstance> instances,
                      const PerceptronModel* model) {
  require_nonempty(instances);
  MetricReport r;
  r.n = instances.size();
  r.bleu4 = bleu4(instances);
  r.rouge_l = rouge_l(instances);
  r.meteor = meteor(instances);
  r.cider = cider(instances);
  double cov = 0.0;
  for (const auto& inst : instances) {
    cov += inst.concepts.empty() ? 0.0 : coverage(inst.concepts, inst.hypothesis_text, model);
  }
  r.coverage = cov / static_cast<double>(instances.size());
  return r;
}

std::vector<EvalInstance> load_eval_instances(const std::filesystem::path& hyp_file,
                                              const std::filesystem::path& ref_file) {
  std::map<std::string, std::vector<Tokens>> refs;
  {
    auto in = open_text(ref_file);
    JsonlReader reader(in);
    while (auto j = reader.next()) {
      const auto where = ref_file.string() + ":" + std::to_string(reader.line()) + ": ";
      try {
        auto id = j->at("id").get<std::string>();
        std::vector<Tokens> toks;
        for (const auto& s : j->at("references")) toks.push_back(tokenize(s.get<std::string>()));
        if (toks.empty()) throw ParseError(where + "empty reference list", reader.line());
        if (!refs.emplace(id, std::move(toks)).second) {
          throw ParseError(where + "duplicate id " + id, reader.line());
        }
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + e.what(), reader.line());
      }
    }
  }

  std::vector<EvalInstance> out;
  std::set<std::string> hyp_ids;
  {
    auto in = open_text(hyp_file);
    JsonlReader reader(in);
    while (auto j = reader.next()) {
      const auto where = hyp_file.string() + ":" + std::to_string(reader.line()) + ": ";
      EvalInstance inst;
      try {
        inst.id = j->at("id").get<std::string>();
        inst.hypothesis_text = j->at("hypothesis").get<std::string>();
        if (j->contains("concepts")) {
          std::vector<std::string> c;
          for (const auto& s : j->at("concepts")) c.push_back(to_lower(s.get<std::string>()));
          inst.concepts = ConceptSet(std::move(c));
        }
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + e.what(), reader.line());
      }
      if (!hyp_ids.insert(inst.id).second) {
        throw ParseError(where + "duplicate id " + inst.id, reader.line());
      }
      inst.hypothesis = tokenize(inst.hypothesis_text);
      out.push_back(std::move(inst));
    }
  }

  std::string missing_refs, missing_hyps;
  for (const auto& id : hyp_ids) {
    if (!refs.contains(id)) missing_refs += (missing_refs.empty() ? "" : ", ") + id;
  }
  for (const auto& [id, r] : refs) {
    if (!hyp_ids.contains(id)) missing_hyps += (missing_hyps.empty() ? "" : ", ") + id;
  }
  if (!missing_refs.empty() || !missing_hyps.empty()) {
    std::string msg = "hypothesis and reference ids differ";
    if (!missing_refs.empty()) msg += "; missing from " + ref_file.string() + ": " + missing_refs;
    if (!missing_hyps.empty()) msg += "; missing from " + hyp_file.string() + ": " + missing_hyps;
    throw Error(msg);
  }
  if (out.empty()) throw Error("no instances in " + hyp_file.string());
  for (auto& inst : out) inst.references = refs.at(inst.id);
  return out;
}

MetricReport evaluate(const std::filesystem::path& hyp_file,
                      const std::filesystem::path& ref_file,
                      const PerceptronModel* model) {
  const auto instances = load_eval_instances(hyp_file, ref_file);
  return evaluate(instances, model);
}

Json to_json(const MetricReport& r) {
  Json j;
  j["bleu4"] = r.bleu4;
  j["rouge_l"] = r.rouge_l;
  j["meteor"] = r.meteor;
  j["cider"] = r.cider;
  j["coverage"] = r.coverage;
  j["n"] = r.n;
  return j;
}

MetricReport report_from_json(const Json& j) {
  MetricReport r;
  r.bleu4 = j.at("bleu4").get<double>();
  r.rouge_l = j.at("rouge_l").get<double>();
  r.meteor = j.at("meteor").get<double>();
  r.cider = j.at("cider").get<double>();
  r.coverage = j.at("coverage").get<double>();
  r.n = j.at("n").get<std::size_t>();
  return r;
}

std::string format_table(const MetricReport& r) {
  std::string out;
  out += "# METEOR: exact and stem stages only, no synonym stage\n";
  out += "# CIDEr: original formulation, 0-10 per instance\n";
  out += "# coverage: concept coverage, reported in place of SPICE\n";
  const std::pair<const char*, std::string> rows[] = {
      {"BLEU-4", fmt_double(r.bleu4)},     {"ROUGE-L", fmt_double(r.rouge_l)},
      {"METEOR", fmt_double(r.meteor)},    {"CIDEr", fmt_double(r.cider)},
      {"coverage", fmt_double(r.coverage)}, {"n", std::to_string(r.n)}};
  for (const auto& [name, value] : rows) {
    char line[96];
    std::snprintf(line, sizeof line, "%-10s %12s\n", name, value.c_str());
    out += line;
  }
  return out;
}

}  // namespace congen
