#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tokalign/bytes.hpp"
#include "tokalign/vocab.hpp"

namespace tokalign {

struct BpeTrainOptions {
  PretokenizeOptions pretokenize;
  // Appended after the learned tokens; they count toward target_size.
  std::vector<Bytes> specials;
};

// Byte-level BPE training for small test vocabularies.
//
// Starts from the 256 single-byte tokens and repeatedly merges the most
// frequent adjacent pair inside pretokenized units. Ties go to the pair whose
// merged bytes sort first, then to the shorter left side. A merge whose
// result already exists as a token reuses that id. Training stops at
// target_size or when no adjacent pair is left.
Vocabulary train_tiny_bpe(std::span<const Bytes> corpus, std::size_t target_size,
                          const BpeTrainOptions& options = {});

}  // namespace tokalign
