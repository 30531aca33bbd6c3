#include "tokalign/trie.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <istream>
#include <ostream>

#include "tokalign/errors.hpp"

namespace tokalign {

ByteTrie::ByteTrie(const Vocabulary& vocab)
    : vocab_size_(vocab.size()), fingerprint_(fingerprint(vocab)) {
  order_.reserve(vocab.size());
  for (TokenId id = 0; id < vocab.size(); ++id)
    if (!vocab.is_special(id)) order_.push_back(id);
  if (order_.empty()) throw ValidationError("cannot build a trie without non-special tokens");
  std::sort(order_.begin(), order_.end(), [&](TokenId a, TokenId b) {
    return vocab.tokens()[a] < vocab.tokens()[b];
  });
  nodes_.emplace_back();
  build(0, 0, static_cast<std::uint32_t>(order_.size()), 0, vocab);
  verify();
}

void ByteTrie::build(NodeId node, std::uint32_t lo, std::uint32_t hi, std::size_t depth,
                     const Vocabulary& vocab) {
  const auto& tokens = vocab.tokens();
  nodes_[node].sub_begin = lo;
  nodes_[node].sub_end = hi;
  // All tokens in [lo, hi) share the first `depth` bytes; the one that ends
  // here, if any, sorts first.
  if (lo < hi && tokens[order_[lo]].size() == depth) {
    nodes_[node].exact = order_[lo];
    ++lo;
  }
  struct Group {
    unsigned char label;
    std::uint32_t lo, hi;
  };
  std::vector<Group> groups;
  for (std::uint32_t i = lo; i < hi;) {
    const auto label = static_cast<unsigned char>(tokens[order_[i]][depth]);
    std::uint32_t j = i + 1;
    while (j < hi && static_cast<unsigned char>(tokens[order_[j]][depth]) == label) ++j;
    groups.push_back({label, i, j});
    i = j;
  }
  nodes_[node].first_edge = static_cast<std::uint32_t>(edge_labels_.size());
  nodes_[node].edge_count = static_cast<std::uint32_t>(groups.size());
  const auto first_child = static_cast<NodeId>(nodes_.size());
  for (const Group& g : groups) {
    edge_labels_.push_back(g.label);
    edge_targets_.push_back(static_cast<NodeId>(nodes_.size()));
    nodes_.emplace_back();
  }
  for (std::size_t k = 0; k < groups.size(); ++k)
    build(first_child + static_cast<NodeId>(k), groups[k].lo, groups[k].hi, depth + 1, vocab);
}

void ByteTrie::verify() const {
  std::size_t exact_nodes = 0;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    std::uint32_t cursor = n.sub_begin;
    if (n.exact != kNoToken) {
      ++exact_nodes;
      if (cursor >= n.sub_end || order_[cursor] != n.exact)
        throw ValidationError("trie node " + std::to_string(id) + ": exact token outside subtree");
      ++cursor;
    }
    for (std::uint32_t e = n.first_edge; e < n.first_edge + n.edge_count; ++e) {
      const Node& c = nodes_[edge_targets_[e]];
      if (e > n.first_edge && edge_labels_[e - 1] >= edge_labels_[e])
        throw ValidationError("trie node " + std::to_string(id) + ": unsorted edges");
      if (c.sub_begin != cursor || c.sub_end <= c.sub_begin)
        throw ValidationError("trie node " + std::to_string(id) +
                              ": subtree is not the union of its children");
      cursor = c.sub_end;
    }
    if (cursor != n.sub_end)
      throw ValidationError("trie node " + std::to_string(id) + ": subtree has stray tokens");
  }
  if (exact_nodes != order_.size())
    throw ValidationError("trie token paths do not match the vocabulary");
}

std::optional<ByteTrie::NodeId> ByteTrie::child(NodeId node, unsigned char label) const {
  const Node& n = nodes_[node];
  const auto* first = edge_labels_.data() + n.first_edge;
  const auto* last = first + n.edge_count;
  const auto* it = std::lower_bound(first, last, label);
  if (it == last || *it != label) return std::nullopt;
  return edge_targets_[static_cast<std::size_t>(it - edge_labels_.data())];
}

std::optional<ByteTrie::NodeId> ByteTrie::find_node(ByteView path) const {
  NodeId node = root();
  for (const char c : path) {
    const auto next = child(node, static_cast<unsigned char>(c));
    if (!next) return std::nullopt;
    node = *next;
  }
  return node;
}

std::vector<unsigned char> ByteTrie::child_labels(NodeId node) const {
  const Node& n = nodes_.at(node);
  return {edge_labels_.begin() + n.first_edge,
          edge_labels_.begin() + n.first_edge + n.edge_count};
}

std::span<const TokenId> ByteTrie::subtree_tokens(NodeId node) const {
  const Node& n = nodes_.at(node);
  return std::span<const TokenId>(order_).subspan(n.sub_begin, n.sub_end - n.sub_begin);
}

std::size_t ByteTrie::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<NodeId, std::size_t>> stack{{root(), 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const Node& n = nodes_[id];
    for (std::uint32_t e = n.first_edge; e < n.first_edge + n.edge_count; ++e)
      stack.emplace_back(edge_targets_[e], d + 1);
  }
  return best;
}

TokenMask ByteTrie::matching_tokens(ByteView prefix) const {
  TokenMask mask(vocab_size_);
  matching_tokens_into(prefix, mask);
  return mask;
}

void ByteTrie::matching_tokens_into(ByteView prefix, TokenMask& out) const {
  out.resize_and_clear(vocab_size_);
  NodeId node = root();
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    const auto next = child(node, static_cast<unsigned char>(prefix[k]));
    if (!next) return;  // only tokens that are prefixes of `prefix` match
    node = *next;
    if (k + 1 < prefix.size() && nodes_[node].exact != kNoToken) out.set(nodes_[node].exact);
  }
  const Node& n = nodes_[node];
  for (std::uint32_t i = n.sub_begin; i < n.sub_end; ++i) out.set(order_[i]);
}

std::uint64_t ByteTrie::fingerprint(const Vocabulary& vocab) {
  // FNV-1a over (id, special flag, length, bytes) of every token.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  auto mix_u32 = [&mix](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) mix(static_cast<unsigned char>(v >> (8 * i)));
  };
  mix_u32(static_cast<std::uint32_t>(vocab.size()));
  for (TokenId id = 0; id < vocab.size(); ++id) {
    mix(vocab.is_special(id) ? 1 : 0);
    mix_u32(static_cast<std::uint32_t>(vocab.tokens()[id].size()));
    for (const char c : vocab.tokens()[id]) mix(static_cast<unsigned char>(c));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Binary form, all integers little-endian:
//   magic "TKATRIE\0" | u32 version (1) | u64 fingerprint | u32 vocab_size
//   u32 node_count | u32 edge_count | u32 order_count
//   node_count x {u32 first_edge, u32 edge_count, u32 exact, u32 sub_begin, u32 sub_end}
//   edge_count x u8 label | edge_count x u32 target | order_count x u32 token id

namespace {

constexpr char kMagic[8] = {'T', 'K', 'A', 'T', 'R', 'I', 'E', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 24)};
  out.write(b, 4);
}
void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}
std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("trie", "truncated file");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}
std::uint64_t get_u64(std::istream& in) {
  const std::uint64_t lo = get_u32(in);
  return lo | (std::uint64_t(get_u32(in)) << 32);
}

}  // namespace

void ByteTrie::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u64(out, fingerprint_);
  put_u32(out, static_cast<std::uint32_t>(vocab_size_));
  put_u32(out, static_cast<std::uint32_t>(nodes_.size()));
  put_u32(out, static_cast<std::uint32_t>(edge_labels_.size()));
  put_u32(out, static_cast<std::uint32_t>(order_.size()));
  for (const Node& n : nodes_) {
    put_u32(out, n.first_edge);
    put_u32(out, n.edge_count);
    put_u32(out, n.exact);
    put_u32(out, n.sub_begin);
    put_u32(out, n.sub_end);
  }
  out.write(reinterpret_cast<const char*>(edge_labels_.data()),
            static_cast<std::streamsize>(edge_labels_.size()));
  for (const NodeId t : edge_targets_) put_u32(out, t);
  for (const TokenId t : order_) put_u32(out, t);
}

ByteTrie ByteTrie::load(std::istream& in, const Vocabulary& vocab) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw FormatError("trie", "bad magic");
  if (const auto version = get_u32(in); version != kVersion)
    throw FormatError("trie", "unsupported version " + std::to_string(version));
  ByteTrie trie;
  trie.fingerprint_ = get_u64(in);
  if (trie.fingerprint_ != fingerprint(vocab))
    throw ValidationError("trie file was built for a different vocabulary");
  trie.vocab_size_ = get_u32(in);
  const auto node_count = get_u32(in);
  const auto edge_count = get_u32(in);
  const auto order_count = get_u32(in);
  if (node_count == 0 || edge_count + 1 != node_count || order_count > trie.vocab_size_)
    throw FormatError("trie", "inconsistent header counts");
  trie.nodes_.resize(node_count);
  for (Node& n : trie.nodes_) {
    n.first_edge = get_u32(in);
    n.edge_count = get_u32(in);
    n.exact = get_u32(in);
    n.sub_begin = get_u32(in);
    n.sub_end = get_u32(in);
    if (std::uint64_t(n.first_edge) + n.edge_count > edge_count || n.sub_begin > n.sub_end ||
        n.sub_end > order_count)
      throw FormatError("trie", "node out of range");
  }
  trie.edge_labels_.resize(edge_count);
  if (!in.read(reinterpret_cast<char*>(trie.edge_labels_.data()), edge_count))
    throw FormatError("trie", "truncated file");
  trie.edge_targets_.resize(edge_count);
  for (auto& t : trie.edge_targets_) {
    t = get_u32(in);
    if (t == 0 || t >= node_count) throw FormatError("trie", "edge target out of range");
  }
  trie.order_.resize(order_count);
  for (auto& t : trie.order_) {
    t = get_u32(in);
    if (t >= trie.vocab_size_) throw FormatError("trie", "token id out of range");
  }
  trie.verify();
  return trie;
}

}  // namespace tokalign
