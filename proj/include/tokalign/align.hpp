#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tokalign/bytes.hpp"
#include "tokalign/generation.hpp"
#include "tokalign/mask_cache.hpp"
#include "tokalign/provider.hpp"
#include "tokalign/sampling.hpp"
#include "tokalign/trie.hpp"
#include "tokalign/vocab.hpp"

namespace tokalign {

enum class FallbackPolicy { error, emit_raw_bytes };

struct AlignConfig {
  std::size_t backtrack_tokens = 3;
  FallbackPolicy fallback = FallbackPolicy::error;
  // 0 selects 4 * backtrack_tokens + 16.
  std::size_t max_alignment_steps = 0;

  std::size_t step_limit() const {
    return max_alignment_steps != 0 ? max_alignment_steps : 4 * backtrack_tokens + 16;
  }
};

// Throws ContractViolation when backtrack_tokens < 1 or the step limit is
// below backtrack_tokens.
void validate(const AlignConfig& cfg);

// Loop state of alignment: the model context and the prompt bytes still to
// be reproduced. decode(context) + prefix stays equal to the prompt plus any
// bytes generated beyond it.
struct AlignmentState {
  std::vector<TokenId> context;
  Bytes prefix;
  std::size_t steps_taken = 0;
};

// Moves the last min(B, ids.size()) tokens into the alignment prefix.
// Throws ContractViolation for empty ids or B == 0.
AlignmentState backtrack_split(std::span<const TokenId> ids, const Vocabulary& vocab,
                               std::size_t backtrack_tokens);

// Zeroes every token incompatible with state.prefix and renormalizes. When
// the compatible tokens carry no mass at all, returns the uniform
// distribution over them. Throws EmptyMaskError when nothing is compatible
// and ContractViolation for an empty prefix or a dist that does not sum to 1.
std::vector<double> align_step(const AlignmentState& state, std::span<const double> dist,
                               const ByteTrie& trie, MaskCache& cache);

// Masked renormalization behind align_step, for callers holding the mask.
std::vector<double> apply_mask(std::span<const double> dist, const TokenMask& mask);

// Consumes the chosen token's bytes from the prefix. Bytes beyond the prefix
// are ordinary generated output. Throws ContractViolation when the token is
// not compatible with the prefix or the prefix is already empty.
AlignmentState advance(AlignmentState state, TokenId chosen, const Vocabulary& vocab);

// Encode, backtrack, masked decoding until the prefix is consumed, then
// unconstrained decoding under `sampler`. `sampler.max_new_tokens` bounds the
// unconstrained phase only.
//
// On a dead end the `error` policy throws DeadEndError. `emit_raw_bytes`
// appends the remaining prefix as single-byte tokens, marks the result as a
// dead end and continues; it throws DeadEndError if some byte has no
// single-byte token.
GenerationResult aligned_generate(const LogitsProvider& provider, const Vocabulary& vocab,
                                  const ByteTrie& trie, MaskCache& cache, ByteView prompt,
                                  const AlignConfig& align, const SamplerConfig& sampler);

}  // namespace tokalign
