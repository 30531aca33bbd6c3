#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tokalign/bytes.hpp"
#include "tokalign/vocab.hpp"

namespace tokalign::metrics {

// Byte-level Levenshtein distance (unit costs).
std::size_t levenshtein(ByteView a, ByteView b);

// 1 - levenshtein / max(len); two empty strings score 1.
double edit_similarity(ByteView generated, ByteView reference);
// Best score over the references; 0 for an empty list.
double edit_similarity(ByteView generated, std::span<const Bytes> references);

// 1 when the generation equals some reference after trimming whitespace at
// both ends. No case folding.
int exact_match(ByteView generated, std::span<const Bytes> references);

// 1 when both texts start with the same token under `vocab`. Empty vs empty
// scores 1, empty vs non-empty 0.
int first_token_accuracy(ByteView generated, ByteView reference, const Vocabulary& vocab);

// Whitespace-delimited words, punctuation attached.
std::vector<std::string> split_words(ByteView text);

// Word-level LCS F1. 0 when either side has no words.
double rouge_l(ByteView generated, ByteView reference);

struct FuzzyScores {
  double edit_similarity = 0.0;
  double rouge_l = 0.0;
};

// Both texts cut just after their n-th word (whole text when shorter), then
// scored with edit_similarity and rouge_l. Throws ContractViolation for n == 0.
FuzzyScores fuzzy_first_n_words(ByteView generated, ByteView reference, std::size_t n);

// Unbiased pass@k: 1 - C(n-c, k) / C(n, k), evaluated as
// 1 - prod_{i=n-c+1}^{n} (1 - k/i). Throws ContractViolation unless
// 0 <= c <= n and 1 <= k <= n.
double pass_at_k(std::size_t n, std::size_t c, std::size_t k);

}  // namespace tokalign::metrics
