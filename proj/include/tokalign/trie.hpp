#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tokalign/bytes.hpp"
#include "tokalign/token_mask.hpp"
#include "tokalign/vocab.hpp"

namespace tokalign {

// Immutable byte trie over the non-special tokens of a vocabulary.
//
// Tokens are kept in byte-lexicographic order, so the tokens below any node
// form one contiguous run of that order. Each node stores its run as a
// [begin, end) pair; a query therefore walks |prefix| edges and then marks
// one precomputed run. Since non-special token bytes are unique, at most one
// token ends exactly at a node.
class ByteTrie {
 public:
  using NodeId = std::uint32_t;
  static constexpr TokenId kNoToken = 0xffffffffu;

  // Throws ValidationError when the vocabulary has no non-special token.
  explicit ByteTrie(const Vocabulary& vocab);

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t token_count() const noexcept { return order_.size(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  // Bit i set iff token i starts with `prefix` or `prefix` starts with token i.
  // An empty prefix selects every non-special token.
  TokenMask matching_tokens(ByteView prefix) const;
  void matching_tokens_into(ByteView prefix, TokenMask& out) const;

  // Structural access, used by tests and the serializer.
  NodeId root() const noexcept { return 0; }
  std::optional<NodeId> child(NodeId node, unsigned char label) const;
  std::optional<NodeId> find_node(ByteView path) const;
  std::vector<unsigned char> child_labels(NodeId node) const;
  TokenId exact_token(NodeId node) const { return nodes_.at(node).exact; }
  std::span<const TokenId> subtree_tokens(NodeId node) const;
  std::size_t depth() const;

  // Checks the subtree runs against the exact-end tokens and children.
  // Throws ValidationError on inconsistency; run once by the constructor.
  void verify() const;

  // Versioned little-endian binary form. `load` rejects files built for a
  // different vocabulary (fingerprint mismatch).
  void save(std::ostream& out) const;
  static ByteTrie load(std::istream& in, const Vocabulary& vocab);

  static std::uint64_t fingerprint(const Vocabulary& vocab);

 private:
  struct Node {
    std::uint32_t first_edge = 0;
    std::uint32_t edge_count = 0;
    TokenId exact = kNoToken;
    std::uint32_t sub_begin = 0;
    std::uint32_t sub_end = 0;
  };

  ByteTrie() = default;
  void build(NodeId node, std::uint32_t lo, std::uint32_t hi, std::size_t depth,
             const Vocabulary& vocab);

  std::size_t vocab_size_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::vector<Node> nodes_;
  std::vector<unsigned char> edge_labels_;
  std::vector<NodeId> edge_targets_;
  std::vector<TokenId> order_;
};

}  // namespace tokalign
