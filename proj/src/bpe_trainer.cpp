#include "tokalign/bpe_trainer.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "tokalign/errors.hpp"

namespace tokalign {

Vocabulary train_tiny_bpe(std::span<const Bytes> corpus, std::size_t target_size,
                          const BpeTrainOptions& options) {
  const std::size_t learned_target = target_size - std::min(target_size, options.specials.size());
  if (target_size < 256 + options.specials.size())
    throw ValidationError("target size " + std::to_string(target_size) +
                          " is below the 256-byte base alphabet plus specials");
  std::map<Bytes, std::size_t> unit_counts;
  for (const Bytes& doc : corpus)
    for (const ByteView unit : pretokenize(doc, options.pretokenize)) ++unit_counts[Bytes(unit)];
  if (unit_counts.empty()) throw ValidationError("training corpus is empty");

  std::vector<Bytes> tokens;
  tokens.reserve(learned_target + options.specials.size());
  for (int b = 0; b < 256; ++b) tokens.emplace_back(1, static_cast<char>(b));
  std::unordered_map<Bytes, TokenId> by_bytes;
  for (TokenId id = 0; id < 256; ++id) by_bytes.emplace(tokens[id], id);

  struct Word {
    std::vector<TokenId> parts;
    std::size_t count;
  };
  std::vector<Word> words;
  words.reserve(unit_counts.size());
  for (const auto& [unit, count] : unit_counts) {
    Word w{{}, count};
    for (const char c : unit) w.parts.push_back(static_cast<unsigned char>(c));
    words.push_back(std::move(w));
  }

  std::vector<Merge> merges;
  std::unordered_map<std::uint64_t, std::size_t> pair_counts;
  while (tokens.size() < learned_target) {
    pair_counts.clear();
    for (const Word& w : words)
      for (std::size_t k = 0; k + 1 < w.parts.size(); ++k)
        pair_counts[(std::uint64_t(w.parts[k]) << 32) | w.parts[k + 1]] += w.count;
    if (pair_counts.empty()) break;

    std::uint64_t best = 0;
    std::size_t best_count = 0;
    Bytes best_merged;
    for (const auto& [key, count] : pair_counts) {
      const TokenId a = static_cast<TokenId>(key >> 32);
      const TokenId b = static_cast<TokenId>(key & 0xffffffffu);
      if (count < best_count) continue;
      Bytes merged = tokens[a] + tokens[b];
      if (count == best_count) {
        const TokenId best_a = static_cast<TokenId>(best >> 32);
        if (merged > best_merged) continue;
        if (merged == best_merged && tokens[a].size() >= tokens[best_a].size()) continue;
      }
      best = key;
      best_count = count;
      best_merged = std::move(merged);
    }
    const TokenId a = static_cast<TokenId>(best >> 32);
    const TokenId b = static_cast<TokenId>(best & 0xffffffffu);
    TokenId merged_id;
    if (const auto it = by_bytes.find(best_merged); it != by_bytes.end()) {
      merged_id = it->second;
    } else {
      merged_id = static_cast<TokenId>(tokens.size());
      tokens.push_back(best_merged);
      by_bytes.emplace(best_merged, merged_id);
    }
    merges.push_back({tokens[a], tokens[b]});
    for (Word& w : words) {
      std::vector<TokenId>& p = w.parts;
      std::size_t out = 0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (k + 1 < p.size() && p[k] == a && p[k + 1] == b) {
          p[out++] = merged_id;
          ++k;
        } else {
          p[out++] = p[k];
        }
      }
      p.resize(out);
    }
  }

  std::vector<TokenId> special_ids;
  for (const Bytes& s : options.specials) {
    special_ids.push_back(static_cast<TokenId>(tokens.size()));
    tokens.push_back(s);
  }
  return Vocabulary(std::move(tokens), std::move(merges), std::move(special_ids),
                    options.pretokenize);
}

}  // namespace tokalign
