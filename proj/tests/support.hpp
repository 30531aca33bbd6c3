#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "tokalign/sampling.hpp"
#include "tokalign/vocab.hpp"

namespace test {

inline std::filesystem::path data_dir() { return TOKALIGN_DATA_DIR; }

inline tokalign::Vocabulary vocab_of(std::initializer_list<const char*> tokens,
                                     std::vector<tokalign::TokenId> specials = {}) {
  std::vector<tokalign::Bytes> t;
  for (const char* s : tokens) t.emplace_back(s);
  return tokalign::Vocabulary(std::move(t), {}, std::move(specials));
}

inline tokalign::Vocabulary byte_vocab_plus(std::initializer_list<const char*> extra,
                                            bool eos = false) {
  std::vector<tokalign::Bytes> t;
  for (int b = 0; b < 256; ++b) t.emplace_back(1, static_cast<char>(b));
  for (const char* s : extra) t.emplace_back(s);
  std::vector<tokalign::TokenId> specials;
  if (eos) {
    specials.push_back(static_cast<tokalign::TokenId>(t.size()));
    t.emplace_back("<eos>");
  }
  return tokalign::Vocabulary(std::move(t), {}, std::move(specials));
}

inline tokalign::TokenId id_of(const tokalign::Vocabulary& v, const char* s) {
  return v.find(s).value();
}

inline std::size_t below(tokalign::Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng.next_u64() % n);
}

// Random string over a small alphabet, so that prefixes collide often.
inline std::string random_string(tokalign::Rng& rng, std::string_view alphabet,
                                 std::size_t min_len, std::size_t max_len) {
  const std::size_t len = min_len + below(rng, max_len - min_len + 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += alphabet[below(rng, alphabet.size())];
  return s;
}

inline std::vector<double> uniform(std::size_t n) { return std::vector<double>(n, 1.0 / double(n)); }

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("tokalign_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace test
