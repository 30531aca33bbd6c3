#include "tokalign/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "tokalign/errors.hpp"

namespace tokalign::metrics {
namespace {


std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Text up to the end of its n-th word; the whole text when it has fewer.
ByteView first_words(ByteView text, std::size_t n) {
  std::size_t i = 0;
  for (std::size_t w = 0; w < n; ++w) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) return text;
    while (i < text.size() && !is_space(text[i])) ++i;
  }
  return text.substr(0, i);
}

ByteView trim(ByteView s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::size_t levenshtein(ByteView a, ByteView b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + (a[i - 1] != b[j - 1] ? 1u : 0u)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

double edit_similarity(ByteView generated, ByteView reference) {
  const std::size_t longest = std::max(generated.size(), reference.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(generated, reference)) / static_cast<double>(longest);
}

double edit_similarity(ByteView generated, std::span<const Bytes> references) {
  double best = 0.0;
  for (const Bytes& r : references) best = std::max(best, edit_similarity(generated, r));
  return best;
}

int exact_match(ByteView generated, std::span<const Bytes> references) {
  const ByteView g = trim(generated);
  for (const Bytes& r : references)
    if (trim(r) == g) return 1;
  return 0;
}

int first_token_accuracy(ByteView generated, ByteView reference, const Vocabulary& vocab) {
  if (generated.empty() || reference.empty()) return generated.empty() && reference.empty();
  const auto g = vocab.encode(generated);
  const auto r = vocab.encode(reference);
  return g.front() == r.front() ? 1 : 0;
}

std::vector<std::string> split_words(ByteView text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

double rouge_l(ByteView generated, ByteView reference) {
  const auto g = split_words(generated);
  const auto r = split_words(reference);
  if (g.empty() || r.empty()) return 0.0;
  const auto lcs = static_cast<double>(lcs_length(g, r));
  if (lcs == 0.0) return 0.0;
  const double precision = lcs / static_cast<double>(g.size());
  const double recall = lcs / static_cast<double>(r.size());
  return 2.0 * precision * recall / (precision + recall);
}

FuzzyScores fuzzy_first_n_words(ByteView generated, ByteView reference, std::size_t n) {
  if (n == 0) throw ContractViolation("fuzzy matching needs n >= 1");
  const ByteView g = first_words(generated, n);
  const ByteView r = first_words(reference, n);
  return {edit_similarity(g, r), rouge_l(g, r)};
}

double pass_at_k(std::size_t n, std::size_t c, std::size_t k) {
  if (c > n) throw ContractViolation("pass@k needs c <= n");
  if (k < 1 || k > n) throw ContractViolation("pass@k needs 1 <= k <= n");
  if (n - c < k) return 1.0;
  double miss = 1.0;
  for (std::size_t i = n - c + 1; i <= n; ++i)
    miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  return 1.0 - miss;
}

}  // namespace tokalign::metrics
