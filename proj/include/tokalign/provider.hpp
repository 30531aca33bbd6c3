#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tokalign/bytes.hpp"
#include "tokalign/vocab.hpp"

namespace tokalign {

// Next-token model. Returns a full probability vector of length
// vocab_size(): non-negative, summing to 1 within 1e-6, and a pure function
// of the context.
class LogitsProvider {
 public:
  virtual ~LogitsProvider() = default;
  virtual std::size_t vocab_size() const = 0;
  virtual std::vector<double> next_distribution(std::span<const TokenId> context) const = 0;
};

// Throws ContractViolation unless `dist` has `size` entries, all finite and
// non-negative, with a sum within `tolerance` of 1.
void check_distribution(std::span<const double> dist, std::size_t size, double tolerance = 1e-6);

// Add-alpha smoothed token n-gram model conditioned on the previous `order`
// tokens (fewer at the start of a document). A context never seen in
// training yields the uniform distribution.
class NGramModel final : public LogitsProvider {
 public:
  NGramModel(std::span<const std::vector<TokenId>> documents, std::size_t vocab_size,
             std::size_t order, double alpha);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::vector<double> next_distribution(std::span<const TokenId> context) const override;

  std::size_t order() const noexcept { return order_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t context_count() const noexcept { return table_.size(); }

 private:
  struct Counts {
    std::size_t total = 0;
    std::vector<std::pair<TokenId, std::size_t>> next;
  };
  static std::string key_of(std::span<const TokenId> context);

  std::size_t vocab_size_;
  std::size_t order_;
  double alpha_;
  std::unordered_map<std::string, Counts> table_;
};

// Encodes every document with `vocab` and counts transitions. Throws
// ValidationError for an empty corpus or order 0.
NGramModel build_ngram_model(std::span<const Bytes> corpus, const Vocabulary& vocab,
                             std::size_t order, double alpha);

struct ScriptedRow {
  Bytes suffix;
  std::vector<double> probs;
};

// Table-driven provider for deterministic fixtures. The row whose suffix is
// the longest suffix of decode(context) wins; the default row applies when
// none matches. Keeps a reference to `vocab`.
class ScriptedModel final : public LogitsProvider {
 public:
  // Throws ValidationError for a missing default row, duplicate suffixes or
  // rows that are not valid distributions over the vocabulary.
  ScriptedModel(const Vocabulary& vocab, std::vector<ScriptedRow> rows,
                std::optional<std::vector<double>> default_row);

  std::size_t vocab_size() const override { return vocab_->size(); }
  std::vector<double> next_distribution(std::span<const TokenId> context) const override;

  const std::vector<ScriptedRow>& rows() const noexcept { return rows_; }

 private:
  const Vocabulary* vocab_;
  std::vector<ScriptedRow> rows_;
  std::vector<double> default_;
};

// JSON table: {"rows": [{"suffix_b64": ..., "probs": [...]}], "default": [...]}.
ScriptedModel parse_scripted_model(std::string_view json_text, const Vocabulary& vocab);
ScriptedModel load_scripted_model(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace tokalign
