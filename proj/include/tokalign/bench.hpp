#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "tokalign/align.hpp"
#include "tokalign/scenarios.hpp"

namespace tokalign {

// Deterministic code-like vocabulary of exactly `size` tokens: the 256
// single bytes, whitespace runs, punctuation clusters, then random words
// with and without a leading space. No merges (greedy encoding).
// Throws ContractViolation for size < 256.
Vocabulary synthetic_vocabulary(std::size_t size, std::uint64_t seed);

// Linear-scan reference for ByteTrie::matching_tokens.
void naive_matching_tokens(const Vocabulary& vocab, ByteView prefix, TokenMask& out);
TokenMask naive_matching_tokens(const Vocabulary& vocab, ByteView prefix);

// Percentiles use the nearest-rank method. Microseconds.
struct LatencyStats {
  std::size_t samples = 0;
  double p50 = 0, p90 = 0, p99 = 0, mean = 0, max = 0;
};
LatencyStats latency_stats(std::vector<double> samples_us);

struct LookupBenchOptions {
  std::size_t queries = 10000;
  std::size_t warmup = 1000;
  std::uint64_t seed = 0;
};

struct LookupBench {
  std::size_t vocab_size = 0;
  std::size_t trie_nodes = 0;
  double build_ms = 0;
  LookupBenchOptions options;
  LatencyStats trie;
  LatencyStats naive;
  LatencyStats trie_space;
  LatencyStats cached_space;
};

// Query mix: half truncated tokens, half concatenations of two or three
// tokens cut at a random length, so both compatibility directions occur.
std::vector<Bytes> lookup_queries(const Vocabulary& vocab, std::size_t count, std::uint64_t seed);

// Times trie and naive lookups on the same queries, then the single-space
// prefix through the trie and through a fresh MaskCache.
LookupBench bench_lookup(const Vocabulary& vocab, const LookupBenchOptions& options);

// Prompts ending on a token boundary of the document's own encoding, with at
// least `min_tokens` tokens. Up to `per_doc` per document, chosen with
// seed XOR document index.
std::vector<Bytes> boundary_prompts(std::span<const Document> corpus, const Vocabulary& vocab,
                                    std::size_t min_tokens, std::size_t per_doc,
                                    std::uint64_t seed);

struct StepHistogram {
  std::map<std::size_t, std::size_t> counts;
  std::size_t prompts = 0;
  std::size_t dead_ends = 0;
  // Most frequent step count, smallest on ties; 0 when empty.
  std::size_t mode() const;
};

// Runs the alignment phase only (max_new_tokens = 0) over every prompt.
StepHistogram step_histogram(const LogitsProvider& provider, const Vocabulary& vocab,
                             const ByteTrie& trie, MaskCache& cache,
                             std::span<const Bytes> prompts, const AlignConfig& align,
                             const SamplerConfig& sampler);

nlohmann::json to_json(const LatencyStats& stats);
nlohmann::json to_json(const LookupBench& bench);
nlohmann::json to_json(const StepHistogram& hist);

}  // namespace tokalign
