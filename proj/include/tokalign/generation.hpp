#pragma once

#include <cstddef>
#include <vector>

#include "tokalign/bytes.hpp"
#include "tokalign/provider.hpp"
#include "tokalign/sampling.hpp"
#include "tokalign/vocab.hpp"

namespace tokalign {

struct PhaseTimings {
  double alignment_us = 0.0;
  double free_us = 0.0;
  double per_lookup_max_us = 0.0;
};

// Outcome of one generation session.
//
// `output` is the prompt followed by everything generated after it. It
// always starts with `prompt` unless alignment hit a dead end. `token_ids`
// lists the sampled tokens (alignment steps first). A sampled special token
// ends the session and contributes no bytes.
struct GenerationResult {
  Bytes prompt;
  Bytes output;
  std::vector<TokenId> token_ids;
  std::size_t alignment_steps = 0;
  std::vector<std::size_t> mask_sizes;
  PhaseTimings timings_us;
  bool dead_end = false;

  // Bytes after the prompt; empty when output does not extend the prompt.
  Bytes continuation() const;
};

// Unaligned decoding: encodes the whole prompt and samples until
// max_new_tokens, a special token, or a stop sequence inside the generated
// bytes. Throws ValidationError when provider and vocabulary sizes differ.
GenerationResult generate(const LogitsProvider& provider, const Vocabulary& vocab,
                          ByteView prompt, const SamplerConfig& cfg);

namespace detail {

void check_sizes(const LogitsProvider& provider, const Vocabulary& vocab);

// True once any stop sequence occurs in output[generated_from:].
bool stop_reached(const Bytes& output, std::size_t generated_from, const SamplerConfig& cfg);

// Unconstrained loop shared by both arms. Appends to `context`,
// `result.token_ids` and `result.output`.
void decode_free(const LogitsProvider& provider, const Vocabulary& vocab,
                 std::vector<TokenId>& context, GenerationResult& result,
                 const SamplerConfig& cfg, Rng& rng);

}  // namespace detail
}  // namespace tokalign
