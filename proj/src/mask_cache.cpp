#include "tokalign/mask_cache.hpp"

#include "tokalign/errors.hpp"

namespace tokalign {

MaskCache::MaskCache(const ByteTrie& trie, std::size_t capacity)
    : trie_(&trie), capacity_(capacity) {
  if (capacity_ > 0) insert_locked(" ", std::make_shared<const TokenMask>(trie.matching_tokens(" ")));
}

MaskHandle MaskCache::lookup(ByteView prefix) {
  Bytes key(prefix);
  {
    std::lock_guard lock(mutex_);
    if (const auto it = index_.find(key); it != index_.end()) {
      ++hits_;
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    ++misses_;
  }
  auto mask = std::make_shared<const TokenMask>(trie_->matching_tokens(prefix));
  if (capacity_ > 0) {
    std::lock_guard lock(mutex_);
    if (!index_.contains(key)) insert_locked(std::move(key), mask);
  }
  return mask;
}

void MaskCache::insert_locked(Bytes key, MaskHandle mask) {
  lru_.emplace_front(key, std::move(mask));
  index_.emplace(std::move(key), lru_.begin());
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

std::size_t MaskCache::size() const {
  std::lock_guard lock(mutex_);
  return lru_.size();
}
std::size_t MaskCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}
std::size_t MaskCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

MaskHandle cached_mask(MaskCache& cache, const ByteTrie& trie, ByteView prefix) {
  if (&cache.trie() != &trie) throw ContractViolation("mask cache belongs to a different trie");
  return cache.lookup(prefix);
}

}  // namespace tokalign
