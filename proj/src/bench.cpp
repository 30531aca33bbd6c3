#include "tokalign/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "tokalign/errors.hpp"

namespace tokalign {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

std::size_t below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng.next_u64() % n); }

}  // namespace

Vocabulary synthetic_vocabulary(std::size_t size, std::uint64_t seed) {
  if (size < 256) throw ContractViolation("synthetic vocabulary needs at least 256 tokens");
  std::vector<Bytes> tokens;
  std::unordered_set<Bytes> seen;
  auto add = [&](Bytes t) {
    if (tokens.size() < size && seen.insert(t).second) tokens.push_back(std::move(t));
  };
  for (int b = 0; b < 256; ++b) add(Bytes(1, static_cast<char>(b)));
  for (std::size_t n = 2; n <= 16; ++n) {
    add(Bytes(n, ' '));
    add(Bytes(n, '\t'));
    add("\n" + Bytes(n, ' '));
    add(Bytes(n, '\n'));
  }
  const std::string punct = "()[]{}:;,.=+-*/<>!&|'\"#";
  for (char a : punct)
    for (char b : punct) add(Bytes{a, b});
  Rng rng(seed);
  const std::string lower = "abcdefghijklmnopqrstuvwxyz";
  const std::string ident = lower + "_0123456789";
  while (tokens.size() < size) {
    const std::size_t len = 2 + below(rng, 9);
    Bytes word;
    word += lower[below(rng, lower.size())];
    while (word.size() < len) word += ident[below(rng, ident.size())];
    if (rng.next_u64() & 1) word.insert(word.begin(), ' ');
    add(std::move(word));
  }
  return Vocabulary(std::move(tokens));
}

void naive_matching_tokens(const Vocabulary& vocab, ByteView prefix, TokenMask& out) {
  out.resize_and_clear(vocab.size());
  for (TokenId id = 0; id < vocab.size(); ++id)
    if (!vocab.is_special(id) && prefix_compatible(vocab.bytes(id), prefix)) out.set(id);
}

TokenMask naive_matching_tokens(const Vocabulary& vocab, ByteView prefix) {
  TokenMask mask(vocab.size());
  naive_matching_tokens(vocab, prefix, mask);
  return mask;
}

LatencyStats latency_stats(std::vector<double> s) {
  LatencyStats st;
  st.samples = s.size();
  if (s.empty()) return st;
  std::sort(s.begin(), s.end());
  auto rank = [&](double q) {
    const auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(s.size())));
    return s[std::clamp<std::size_t>(r, 1, s.size()) - 1];
  };
  st.p50 = rank(0.50);
  st.p90 = rank(0.90);
  st.p99 = rank(0.99);
  st.mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  st.max = s.back();
  return st;
}

std::vector<Bytes> lookup_queries(const Vocabulary& vocab, std::size_t count, std::uint64_t seed) {
  std::vector<TokenId> regular;
  for (TokenId id = 0; id < vocab.size(); ++id)
    if (!vocab.is_special(id)) regular.push_back(id);
  if (regular.empty()) throw ValidationError("vocabulary has no regular tokens");
  Rng rng(seed);
  std::vector<Bytes> out;
  out.reserve(count);
  while (out.size() < count) {
    Bytes q;
    if (out.size() % 2 == 0) {
      q = vocab.bytes(regular[below(rng, regular.size())]);
    } else {
      const std::size_t parts = 2 + below(rng, 2);
      for (std::size_t i = 0; i < parts; ++i) q += vocab.bytes(regular[below(rng, regular.size())]);
    }
    q.resize(1 + below(rng, q.size()));
    out.push_back(std::move(q));
  }
  return out;
}

LookupBench bench_lookup(const Vocabulary& vocab, const LookupBenchOptions& o) {
  LookupBench b;
  b.options = o;
  b.vocab_size = vocab.size();
  const auto build_start = Clock::now();
  const ByteTrie trie(vocab);
  b.build_ms = micros_since(build_start) / 1000.0;
  b.trie_nodes = trie.node_count();

  const auto warm = lookup_queries(vocab, o.warmup, o.seed ^ 0x5eedULL);
  const auto queries = lookup_queries(vocab, o.queries, o.seed);
  TokenMask mask(vocab.size());
  for (const auto& q : warm) {
    trie.matching_tokens_into(q, mask);
    naive_matching_tokens(vocab, q, mask);
  }

  auto time_all = [&](auto&& fn) {
    std::vector<double> samples;
    samples.reserve(queries.size());
    for (const auto& q : queries) {
      const auto t = Clock::now();
      fn(q);
      samples.push_back(micros_since(t));
    }
    return latency_stats(std::move(samples));
  };
  b.trie = time_all([&](const Bytes& q) { trie.matching_tokens_into(q, mask); });
  b.naive = time_all([&](const Bytes& q) { naive_matching_tokens(vocab, q, mask); });

  const Bytes space = " ";
  b.trie_space = time_all([&](const Bytes&) { trie.matching_tokens_into(space, mask); });
  MaskCache cache(trie);
  std::size_t bits = 0;
  b.cached_space = time_all([&](const Bytes&) { bits += cache.lookup(space)->words().size(); });
  if (bits == 0) throw ContractViolation("cached mask lookup returned nothing");
  return b;
}

std::vector<Bytes> boundary_prompts(std::span<const Document> corpus, const Vocabulary& vocab,
                                    std::size_t min_tokens, std::size_t per_doc,
                                    std::uint64_t seed) {
  std::vector<Bytes> prompts;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto ids = vocab.encode(corpus[d].text);
    if (ids.size() <= min_tokens) continue;
    std::vector<std::size_t> cuts;
    for (std::size_t k = min_tokens; k < ids.size(); ++k) cuts.push_back(k);
    Rng rng(seed ^ static_cast<std::uint64_t>(d));
    const std::size_t take = std::min(per_doc, cuts.size());
    for (std::size_t i = 0; i < take; ++i) {
      std::swap(cuts[i], cuts[i + below(rng, cuts.size() - i)]);
      prompts.push_back(vocab.decode(std::span<const TokenId>(ids.data(), cuts[i])));
    }
  }
  return prompts;
}

std::size_t StepHistogram::mode() const {
  std::size_t best = 0, best_count = 0;
  for (const auto& [steps, n] : counts)
    if (n > best_count) best = steps, best_count = n;
  return best;
}

StepHistogram step_histogram(const LogitsProvider& provider, const Vocabulary& vocab,
                             const ByteTrie& trie, MaskCache& cache,
                             std::span<const Bytes> prompts, const AlignConfig& align,
                             const SamplerConfig& sampler) {
  SamplerConfig cfg = sampler;
  cfg.max_new_tokens = 0;
  StepHistogram h;
  for (const auto& p : prompts) {
    if (p.empty()) continue;
    ++h.prompts;
    try {
      const auto r = aligned_generate(provider, vocab, trie, cache, p, align, cfg);
      if (r.dead_end) ++h.dead_ends;
      ++h.counts[r.alignment_steps];
    } catch (const DeadEndError&) {
      ++h.dead_ends;
    }
  }
  return h;
}

json to_json(const LatencyStats& s) {
  return json{{"samples", s.samples}, {"p50_us", s.p50}, {"p90_us", s.p90},
              {"p99_us", s.p99},      {"mean_us", s.mean}, {"max_us", s.max}};
}

json to_json(const LookupBench& b) {
  return json{{"vocab_size", b.vocab_size},
              {"trie_nodes", b.trie_nodes},
              {"build_ms", b.build_ms},
              {"warmup", b.options.warmup},
              {"queries", b.options.queries},
              {"trie", to_json(b.trie)},
              {"naive", to_json(b.naive)},
              {"trie_space", to_json(b.trie_space)},
              {"cached_space", to_json(b.cached_space)}};
}

json to_json(const StepHistogram& h) {
  json counts = json::object();
  for (const auto& [steps, n] : h.counts) counts[std::to_string(steps)] = n;
  return json{{"prompts", h.prompts}, {"dead_ends", h.dead_ends}, {"counts", counts},
              {"mode", h.mode()}};
}

}  // namespace tokalign
