#pragma once

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "tokalign/bytes.hpp"
#include "tokalign/token_mask.hpp"
#include "tokalign/trie.hpp"

namespace tokalign {

using MaskHandle = std::shared_ptr<const TokenMask>;

// Bounded LRU map from alignment prefix to its compatibility mask.
//
// Bound to one trie. The single-space mask is inserted at construction (when
// capacity allows), so the first " " query is already a hit. Returned
// handles stay valid after eviction. Safe for concurrent use; every returned
// mask equals a fresh ByteTrie::matching_tokens for the same prefix.
class MaskCache {
 public:
  static constexpr std::size_t kDefaultCapacity = 1024;

  explicit MaskCache(const ByteTrie& trie, std::size_t capacity = kDefaultCapacity);

  MaskHandle lookup(ByteView prefix);

  const ByteTrie& trie() const noexcept { return *trie_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  using Entry = std::pair<Bytes, MaskHandle>;

  void insert_locked(Bytes key, MaskHandle mask);

  const ByteTrie* trie_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> lru_;  // most recent first
  std::unordered_map<Bytes, std::list<Entry>::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

// Checks that `cache` was built for `trie`, then looks `prefix` up.
MaskHandle cached_mask(MaskCache& cache, const ByteTrie& trie, ByteView prefix);

}  // namespace tokalign
