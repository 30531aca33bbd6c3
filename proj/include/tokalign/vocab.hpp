#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tokalign/bytes.hpp"

namespace tokalign {

using TokenId = std::uint32_t;

struct Merge {
  Bytes left;
  Bytes right;
  friend bool operator==(const Merge&, const Merge&) = default;
};

// Splits text into units that merges never cross.
//
// Units are runs of word bytes, runs of punctuation bytes and whitespace.
// With `space_prefix`, a single space directly before a word or punctuation
// run joins that unit (" like"); inside a whitespace run only the final space
// is taken, so "    x" splits as "   " + " x". With `whitespace_runs`, a
// whitespace run is one unit; otherwise every whitespace byte stands alone.
struct PretokenizeOptions {
  bool space_prefix = true;
  bool whitespace_runs = true;
  friend bool operator==(const PretokenizeOptions&, const PretokenizeOptions&) = default;
};

std::vector<ByteView> pretokenize(ByteView text, const PretokenizeOptions& options);

// Token-id <-> byte-sequence mapping with optional BPE merges.
//
// Ids are dense in [0, size()). Special tokens (end-of-sequence and the like)
// carry bytes for display only: they are never produced by encode() and
// never take part in alignment. Immutable after construction.
class Vocabulary {
 public:
  // Throws ValidationError when an invariant is violated: empty token,
  // duplicate bytes among non-special tokens, special id out of range, or a
  // merge whose sides or result are not tokens.
  explicit Vocabulary(std::vector<Bytes> tokens, std::vector<Merge> merges = {},
                      std::vector<TokenId> specials = {},
                      std::optional<PretokenizeOptions> pretokenizer = std::nullopt);

  std::size_t size() const noexcept { return tokens_.size(); }
  const Bytes& bytes(TokenId id) const;
  bool is_special(TokenId id) const { return id < special_.size() && special_[id]; }
  std::optional<TokenId> find(ByteView bytes) const;
  std::optional<TokenId> single_byte_token(unsigned char byte) const {
    const auto id = byte_token_[byte];
    return id < 0 ? std::nullopt : std::optional<TokenId>(static_cast<TokenId>(id));
  }
  bool covers_all_bytes() const noexcept;

  const std::vector<Bytes>& tokens() const noexcept { return tokens_; }
  const std::vector<Merge>& merges() const noexcept { return merges_; }
  const std::vector<TokenId>& specials() const noexcept { return specials_; }
  const std::optional<PretokenizeOptions>& pretokenizer() const noexcept { return pretokenizer_; }
  std::size_t max_token_length() const noexcept { return max_len_; }

  // BPE merges when present (lowest rank first, leftmost on ties), greedy
  // longest match otherwise. Throws EncodingError on an uncoverable byte.
  std::vector<TokenId> encode(ByteView text) const;
  // Throws ValidationError naming the position of an unknown id.
  Bytes decode(std::span<const TokenId> ids) const;

 private:
  struct MergeRule {
    std::uint32_t rank;
    TokenId merged;
  };
  static std::uint64_t pair_key(TokenId a, TokenId b) {
    return (std::uint64_t(a) << 32) | std::uint64_t(b);
  }
  void encode_bpe(ByteView piece, std::size_t base, std::vector<TokenId>& out) const;
  void encode_greedy(ByteView piece, std::size_t base, std::vector<TokenId>& out) const;

  std::vector<Bytes> tokens_;
  std::vector<Merge> merges_;
  std::vector<TokenId> specials_;
  std::vector<bool> special_;
  std::optional<PretokenizeOptions> pretokenizer_;
  std::unordered_map<Bytes, TokenId> by_bytes_;
  std::unordered_map<std::uint64_t, MergeRule> merge_rules_;
  int byte_token_[256];
  std::size_t max_len_ = 0;
};

// JSON vocabulary file. Token and merge bytes are written as plain text when
// they are valid UTF-8 and as base64 otherwise.
Vocabulary parse_vocabulary(std::string_view json_text);
Vocabulary load_vocabulary(const std::filesystem::path& path);
std::string serialize_vocabulary(const Vocabulary& vocab);
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);

}  // namespace tokalign
