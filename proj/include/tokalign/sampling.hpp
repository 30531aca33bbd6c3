#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tokalign/bytes.hpp"
#include "tokalign/vocab.hpp"

namespace tokalign {

enum class SamplingMode { greedy, nucleus };

struct SamplerConfig {
  SamplingMode mode = SamplingMode::greedy;
  double top_p = 1.0;        // nucleus only, in (0, 1]
  double temperature = 1.0;  // nucleus only, > 0
  std::uint64_t seed = 0;
  std::size_t max_new_tokens = 32;
  std::vector<Bytes> stop_sequences;
};

// Throws ContractViolation for top_p outside (0, 1] or temperature <= 0.
void validate(const SamplerConfig& cfg);

// Session random source: std::mt19937_64 seeded with the 64-bit seed. A draw
// takes the top 53 bits of one engine output, so u = (x >> 11) * 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Final distribution the sampler draws from: one-hot on the argmax (lowest id
// on ties) for greedy; for nucleus, temperature in the log domain (zeros stay
// zero), then the smallest descending-probability prefix with cumulative
// mass >= top_p (equal probabilities ordered by id), renormalized.
// Throws ContractViolation for an empty, negative or all-zero input.
std::vector<double> sampling_distribution(std::span<const double> dist, const SamplerConfig& cfg);

// Greedy consumes no randomness. Nucleus draws one u and walks the kept set
// in id order until the cumulative mass exceeds u.
TokenId sample(std::span<const double> dist, const SamplerConfig& cfg, Rng& rng);

}  // namespace tokalign
