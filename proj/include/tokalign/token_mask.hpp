#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tokalign {

// Fixed-width bitset over token ids. Bit i set means token i is allowed.
class TokenMask {
 public:
  TokenMask() = default;
  explicit TokenMask(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }

  bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  void clear_all() noexcept {
    for (auto& w : words_) w = 0;
  }
  void resize_and_clear(std::size_t size) {
    size_ = size;
    words_.assign((size + 63) / 64, 0);
  }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (const auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool none() const noexcept {
    for (const auto w : words_)
      if (w != 0) return false;
    return true;
  }

  template <typename F>
  void for_each_set(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w != 0) {
        const int bit = std::countr_zero(w);
        f(wi * 64 + static_cast<std::size_t>(bit));
        w &= w - 1;
      }
    }
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const TokenMask&, const TokenMask&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace tokalign
