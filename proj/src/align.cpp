#include "tokalign/align.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "tokalign/errors.hpp"

namespace tokalign {
namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

}  // namespace

void validate(const AlignConfig& cfg) {
  if (cfg.backtrack_tokens < 1) throw ContractViolation("backtrack_tokens must be >= 1");
  if (cfg.step_limit() < cfg.backtrack_tokens)
    throw ContractViolation("max_alignment_steps must be >= backtrack_tokens");
}

AlignmentState backtrack_split(std::span<const TokenId> ids, const Vocabulary& vocab,
                               std::size_t backtrack_tokens) {
  if (backtrack_tokens < 1) throw ContractViolation("backtrack count must be >= 1");
  if (ids.empty()) throw ContractViolation("cannot backtrack an empty token sequence");
  const std::size_t b = std::min(backtrack_tokens, ids.size());
  AlignmentState state;
  state.context.assign(ids.begin(), ids.end() - static_cast<std::ptrdiff_t>(b));
  state.prefix = vocab.decode(ids.subspan(ids.size() - b));
  return state;
}

std::vector<double> apply_mask(std::span<const double> dist, const TokenMask& mask) {
  if (dist.size() != mask.size())
    throw ContractViolation("distribution and mask widths differ");
  std::vector<double> out(dist.size(), 0.0);
  double total = 0.0;
  mask.for_each_set([&](std::size_t i) {
    out[i] = dist[i];
    total += dist[i];
  });
  if (total > 0.0) {
    for (auto& p : out) p /= total;
  } else {
    const double uniform = 1.0 / static_cast<double>(mask.count());
    mask.for_each_set([&](std::size_t i) { out[i] = uniform; });
  }
  return out;
}

std::vector<double> align_step(const AlignmentState& state, std::span<const double> dist,
                               const ByteTrie& trie, MaskCache& cache) {
  if (state.prefix.empty()) throw ContractViolation("align_step needs a non-empty prefix");
  check_distribution(dist, trie.vocab_size());
  const MaskHandle mask = cached_mask(cache, trie, state.prefix);
  if (mask->none()) throw EmptyMaskError(state.prefix);
  return apply_mask(dist, *mask);
}

AlignmentState advance(AlignmentState state, TokenId chosen, const Vocabulary& vocab) {
  if (state.prefix.empty()) throw ContractViolation("advance called after alignment finished");
  if (vocab.is_special(chosen)) throw ContractViolation("special token chosen during alignment");
  const Bytes& token = vocab.bytes(chosen);
  if (!prefix_compatible(token, state.prefix))
    throw ContractViolation("token \"" + escape_bytes(token) +
                            "\" is incompatible with alignment prefix \"" +
                            escape_bytes(state.prefix) + "\"");
  state.prefix.erase(0, std::min(token.size(), state.prefix.size()));
  state.context.push_back(chosen);
  ++state.steps_taken;
  return state;
}

GenerationResult aligned_generate(const LogitsProvider& provider, const Vocabulary& vocab,
                                  const ByteTrie& trie, MaskCache& cache, ByteView prompt,
                                  const AlignConfig& align, const SamplerConfig& sampler) {
  validate(align);
  validate(sampler);
  detail::check_sizes(provider, vocab);
  if (prompt.empty()) throw ContractViolation("aligned generation needs a non-empty prompt");
  if (trie.vocab_size() != vocab.size()) throw ContractViolation("trie and vocabulary differ");

  GenerationResult result;
  result.prompt = Bytes(prompt);
  Rng rng(sampler.seed);

  const auto align_start = Clock::now();
  const std::vector<TokenId> ids = vocab.encode(prompt);
  AlignmentState state = backtrack_split(ids, vocab, align.backtrack_tokens);
  result.output = vocab.decode(state.context);

  while (!state.prefix.empty()) {
    if (state.steps_taken >= align.step_limit())
      throw DeadEndError(state.prefix, state.steps_taken,
                         "alignment exceeded " + std::to_string(align.step_limit()) + " steps");
    const auto dist = provider.next_distribution(state.context);
    check_distribution(dist, vocab.size());

    const auto lookup_start = Clock::now();
    const MaskHandle mask = cached_mask(cache, trie, state.prefix);
    result.timings_us.per_lookup_max_us =
        std::max(result.timings_us.per_lookup_max_us, micros_since(lookup_start));

    if (mask->none()) {
      if (align.fallback == FallbackPolicy::error)
        throw DeadEndError(state.prefix, state.steps_taken,
                           "no token matches the remaining alignment prefix \"" +
                               escape_bytes(state.prefix) + "\"");
      for (const char c : state.prefix) {
        const auto byte_token = vocab.single_byte_token(static_cast<unsigned char>(c));
        if (!byte_token)
          throw DeadEndError(state.prefix, state.steps_taken,
                             "no single-byte token for remaining prefix byte \"" +
                                 escape_bytes(ByteView(&c, 1)) + "\"");
      }
      for (const char c : state.prefix) {
        const TokenId id = *vocab.single_byte_token(static_cast<unsigned char>(c));
        state.context.push_back(id);
        result.token_ids.push_back(id);
      }
      result.output += state.prefix;
      state.prefix.clear();
      result.dead_end = true;
      break;
    }

    result.mask_sizes.push_back(mask->count());
    const auto masked = apply_mask(dist, *mask);
    const TokenId chosen = sample(masked, sampler, rng);
    result.token_ids.push_back(chosen);
    result.output += vocab.bytes(chosen);
    state = advance(std::move(state), chosen, vocab);
  }
  result.alignment_steps = state.steps_taken;
  result.timings_us.alignment_us = micros_since(align_start);

  detail::decode_free(provider, vocab, state.context, result, sampler, rng);
  return result;
}

}  // namespace tokalign
