#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "tokalign/align.hpp"
#include "tokalign/scenarios.hpp"

namespace tokalign {

enum class Arm { aligned, unaligned };
std::string_view to_string(Arm arm);

inline const std::vector<std::string> kAllMetrics = {"em", "es", "fta", "fuzzy_es", "fuzzy_rouge"};

struct EvalOptions {
  AlignConfig align;
  SamplerConfig sampler;
  std::vector<Arm> arms = {Arm::aligned, Arm::unaligned};
  // Also score the word-boundary control prompt of each example.
  bool include_baseline = true;
  // em and es compare the first score_bytes bytes of continuation and reference.
  std::size_t score_bytes = 32;
  std::size_t fuzzy_words = 50;
  std::vector<std::string> metrics = kAllMetrics;
};

// Throws ContractViolation for unknown metric names, no arms, or a zero window.
void validate(const EvalOptions& options);

// One generation in one arm. `dataset` is the scenario name, with a
// "_baseline" suffix for the control prompt.
struct EvalRecord {
  std::string example_id;
  std::string dataset;
  Arm arm = Arm::aligned;
  Bytes prompt;
  Bytes continuation;
  Bytes reference;
  std::size_t alignment_steps = 0;
  bool dead_end = false;
  std::map<std::string, double> scores;
};

struct ScoreReport {
  std::vector<std::string> metrics;
  std::vector<Arm> arms;
  // (dataset, arm) -> metric -> mean
  std::map<std::pair<std::string, Arm>, std::map<std::string, double>> means;
  std::map<std::pair<std::string, Arm>, std::size_t> counts;
  std::map<std::pair<std::string, Arm>, std::size_t> dead_ends;

  std::vector<std::string> datasets() const;
  // aligned - unaligned; nullopt unless both arms ran.
  std::optional<double> delta(const std::string& dataset, const std::string& metric) const;

  nlohmann::json to_json() const;
  // Rows: dataset,arm,metric,value; arm "delta" holds aligned - unaligned.
  std::string to_csv() const;
};

// Scores one continuation against one reference with the selected metrics.
std::map<std::string, double> score_continuation(ByteView continuation, ByteView reference,
                                                 const Vocabulary& vocab,
                                                 const EvalOptions& options);

// Example i runs with sampler seed (options.sampler.seed ^ i) in every arm,
// so arms are independent of each other and of the order they run in. A
// dead end counts as a generation with an empty continuation. Records come
// back ordered by example, then prompt variant, then arm.
std::vector<EvalRecord> run_eval(std::span<const ScenarioExample> examples,
                                 const LogitsProvider& provider, const Vocabulary& vocab,
                                 const ByteTrie& trie, MaskCache& cache,
                                 const EvalOptions& options);

ScoreReport summarize(std::span<const EvalRecord> records, const EvalOptions& options);

nlohmann::json to_json(const EvalRecord& record);

}  // namespace tokalign
