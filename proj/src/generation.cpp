#include "tokalign/generation.hpp"

#include <chrono>

#include "tokalign/errors.hpp"

namespace tokalign {

Bytes GenerationResult::continuation() const {
  if (!starts_with(output, prompt)) return {};
  return output.substr(prompt.size());
}

namespace detail {

void check_sizes(const LogitsProvider& provider, const Vocabulary& vocab) {
  if (provider.vocab_size() != vocab.size())
    throw ValidationError("provider covers " + std::to_string(provider.vocab_size()) +
                          " tokens but the vocabulary has " + std::to_string(vocab.size()));
}

bool stop_reached(const Bytes& output, std::size_t generated_from, const SamplerConfig& cfg) {
  if (output.size() <= generated_from) return false;
  const ByteView generated = ByteView(output).substr(generated_from);
  for (const Bytes& stop : cfg.stop_sequences)
    if (!stop.empty() && generated.find(stop) != ByteView::npos) return true;
  return false;
}

void decode_free(const LogitsProvider& provider, const Vocabulary& vocab,
                 std::vector<TokenId>& context, GenerationResult& result,
                 const SamplerConfig& cfg, Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t step = 0; step < cfg.max_new_tokens; ++step) {
    if (stop_reached(result.output, result.prompt.size(), cfg)) break;
    const auto dist = provider.next_distribution(context);
    check_distribution(dist, vocab.size());
    const TokenId next = sample(dist, cfg, rng);
    result.token_ids.push_back(next);
    if (vocab.is_special(next)) break;
    context.push_back(next);
    result.output += vocab.bytes(next);
  }
  result.timings_us.free_us +=
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

GenerationResult generate(const LogitsProvider& provider, const Vocabulary& vocab,
                          ByteView prompt, const SamplerConfig& cfg) {
  detail::check_sizes(provider, vocab);
  validate(cfg);
  GenerationResult result;
  result.prompt = Bytes(prompt);
  result.output = Bytes(prompt);
  std::vector<TokenId> context = vocab.encode(prompt);
  Rng rng(cfg.seed);
  detail::decode_free(provider, vocab, context, result, cfg, rng);
  return result;
}

}  // namespace tokalign
