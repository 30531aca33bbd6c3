#include "tokalign/eval.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "tokalign/errors.hpp"
#include "tokalign/metrics.hpp"

namespace tokalign {

using nlohmann::json;

std::string_view to_string(Arm arm) { return arm == Arm::aligned ? "aligned" : "unaligned"; }

void validate(const EvalOptions& o) {
  if (o.arms.empty()) throw ContractViolation("eval: no arm selected");
  if (o.score_bytes == 0) throw ContractViolation("eval: score window must be positive");
  if (o.fuzzy_words == 0) throw ContractViolation("eval: fuzzy word count must be positive");
  for (const auto& m : o.metrics)
    if (std::find(kAllMetrics.begin(), kAllMetrics.end(), m) == kAllMetrics.end())
      throw ContractViolation("eval: unknown metric '" + m + "'");
  validate(o.align);
  validate(o.sampler);
}

std::map<std::string, double> score_continuation(ByteView continuation, ByteView reference,
                                                 const Vocabulary& vocab,
                                                 const EvalOptions& o) {
  const ByteView gen_window = continuation.substr(0, o.score_bytes);
  const Bytes ref_window(reference.substr(0, o.score_bytes));
  std::map<std::string, double> out;
  std::optional<metrics::FuzzyScores> fuzzy;
  for (const auto& m : o.metrics) {
    if (m == "em") {
      out[m] = metrics::exact_match(gen_window, std::span<const Bytes>(&ref_window, 1));
    } else if (m == "es") {
      out[m] = metrics::edit_similarity(gen_window, ref_window);
    } else if (m == "fta") {
      out[m] = metrics::first_token_accuracy(continuation, reference, vocab);
    } else {
      if (!fuzzy) fuzzy = metrics::fuzzy_first_n_words(continuation, reference, o.fuzzy_words);
      out[m] = m == "fuzzy_es" ? fuzzy->edit_similarity : fuzzy->rouge_l;
    }
  }
  return out;
}

namespace {

GenerationResult run_arm(Arm arm, const LogitsProvider& provider, const Vocabulary& vocab,
                         const ByteTrie& trie, MaskCache& cache, const Bytes& prompt,
                         const EvalOptions& o, std::uint64_t seed) {
  SamplerConfig sampler = o.sampler;
  sampler.seed = seed;
  if (arm == Arm::unaligned || prompt.empty()) return generate(provider, vocab, prompt, sampler);
  try {
    return aligned_generate(provider, vocab, trie, cache, prompt, o.align, sampler);
  } catch (const DeadEndError&) {
    GenerationResult r;
    r.prompt = prompt;
    r.dead_end = true;
    return r;
  }
}

}  // namespace

std::vector<EvalRecord> run_eval(std::span<const ScenarioExample> examples,
                                 const LogitsProvider& provider, const Vocabulary& vocab,
                                 const ByteTrie& trie, MaskCache& cache, const EvalOptions& o) {
  validate(o);
  detail::check_sizes(provider, vocab);
  std::vector<EvalRecord> records;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    const std::uint64_t seed = o.sampler.seed ^ static_cast<std::uint64_t>(i);
    struct Variant {
      std::string dataset;
      const Bytes* prompt;
      Bytes reference;
    };
    std::vector<Variant> variants;
    variants.push_back({std::string(to_string(ex.scenario)), &ex.prompt, ex.ground_truth});
    if (o.include_baseline) {
      variants.push_back({std::string(to_string(ex.scenario)) + "_baseline", &ex.baseline_prompt,
                          ex.prompt.substr(ex.baseline_prompt.size()) + ex.ground_truth});
    }
    for (const auto& v : variants) {
      for (Arm arm : o.arms) {
        const auto result = run_arm(arm, provider, vocab, trie, cache, *v.prompt, o, seed);
        EvalRecord rec;
        rec.example_id = ex.id;
        rec.dataset = v.dataset;
        rec.arm = arm;
        rec.prompt = *v.prompt;
        rec.continuation = result.continuation();
        rec.reference = v.reference;
        rec.alignment_steps = result.alignment_steps;
        rec.dead_end = result.dead_end;
        rec.scores = score_continuation(rec.continuation, rec.reference, vocab, o);
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

ScoreReport summarize(std::span<const EvalRecord> records, const EvalOptions& o) {
  ScoreReport report;
  report.metrics = o.metrics;
  report.arms = o.arms;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.dataset, r.arm);
    ++report.counts[key];
    if (r.dead_end) ++report.dead_ends[key];
    auto& sums = report.means[key];
    for (const auto& [m, v] : r.scores) sums[m] += v;
  }
  for (auto& [key, sums] : report.means)
    for (auto& [m, v] : sums) v /= static_cast<double>(report.counts[key]);
  return report;
}

std::vector<std::string> ScoreReport::datasets() const {
  std::set<std::string> names;
  for (const auto& [key, _] : counts) names.insert(key.first);
  // Scenario order, each followed by its baseline.
  std::vector<std::string> out;
  for (Scenario s : kAllScenarios) {
    for (std::string name : {std::string(to_string(s)), std::string(to_string(s)) + "_baseline"}) {
      if (names.erase(name)) out.push_back(name);
    }
  }
  out.insert(out.end(), names.begin(), names.end());
  return out;
}

std::optional<double> ScoreReport::delta(const std::string& dataset,
                                         const std::string& metric) const {
  const auto a = means.find({dataset, Arm::aligned});
  const auto u = means.find({dataset, Arm::unaligned});
  if (a == means.end() || u == means.end()) return std::nullopt;
  const auto ma = a->second.find(metric);
  const auto mu = u->second.find(metric);
  if (ma == a->second.end() || mu == u->second.end()) return std::nullopt;
  return ma->second - mu->second;
}

json ScoreReport::to_json() const {
  json rows = json::array();
  for (const auto& dataset : datasets()) {
    json row{{"dataset", dataset}};
    for (Arm arm : arms) {
      const auto key = std::make_pair(dataset, arm);
      const auto it = means.find(key);
      if (it == means.end()) continue;
      json entry = it->second;
      entry["n"] = counts.at(key);
      entry["dead_ends"] = dead_ends.count(key) ? dead_ends.at(key) : 0;
      row[std::string(to_string(arm))] = entry;
    }
    json d = json::object();
    for (const auto& m : metrics)
      if (auto v = delta(dataset, m)) d[m] = *v;
    if (!d.empty()) row["delta"] = d;
    rows.push_back(row);
  }
  json arm_names = json::array();
  for (Arm a : arms) arm_names.push_back(std::string(to_string(a)));
  return json{{"metrics", metrics}, {"arms", arm_names}, {"rows", rows}};
}

std::string ScoreReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "dataset,arm,metric,value\n";
  for (const auto& dataset : datasets()) {
    for (Arm arm : arms) {
      const auto it = means.find({dataset, arm});
      if (it == means.end()) continue;
      for (const auto& m : metrics)
        out << dataset << ',' << to_string(arm) << ',' << m << ',' << it->second.at(m) << '\n';
    }
    for (const auto& m : metrics)
      if (auto v = delta(dataset, m)) out << dataset << ",delta," << m << ',' << *v << '\n';
  }
  return out.str();
}

json to_json(const EvalRecord& r) {
  return json{{"example_id", r.example_id},
              {"dataset", r.dataset},
              {"arm", std::string(to_string(r.arm))},
              {"prompt_b64", base64_encode(r.prompt)},
              {"continuation_b64", base64_encode(r.continuation)},
              {"reference_b64", base64_encode(r.reference)},
              {"alignment_steps", r.alignment_steps},
              {"dead_end", r.dead_end},
              {"scores", r.scores}};
}

}  // namespace tokalign
