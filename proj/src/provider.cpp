#include "tokalign/provider.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tokalign/errors.hpp"

namespace tokalign {

void check_distribution(std::span<const double> dist, std::size_t size, double tolerance) {
  if (dist.size() != size)
    throw ContractViolation("distribution has " + std::to_string(dist.size()) +
                            " entries, expected " + std::to_string(size));
  double total = 0.0;
  for (const double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw ContractViolation("distribution has a negative or non-finite entry");
    total += p;
  }
  if (std::abs(total - 1.0) > tolerance)
    throw ContractViolation("distribution sums to " + std::to_string(total));
}

// ---------------------------------------------------------------------------

NGramModel::NGramModel(std::span<const std::vector<TokenId>> documents, std::size_t vocab_size,
                       std::size_t order, double alpha)
    : vocab_size_(vocab_size), order_(order), alpha_(alpha) {
  if (order == 0) throw ValidationError("n-gram order must be >= 1");
  if (!(alpha >= 0.0)) throw ValidationError("smoothing alpha must be >= 0");
  if (vocab_size == 0) throw ValidationError("n-gram vocabulary is empty");
  std::size_t tokens = 0;
  std::map<std::string, std::map<TokenId, std::size_t>> raw;
  for (const auto& doc : documents) {
    tokens += doc.size();
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (doc[i] >= vocab_size) throw ValidationError("n-gram document holds an unknown id");
      const std::size_t begin = i > order ? i - order : 0;
      ++raw[key_of(std::span(doc).subspan(begin, i - begin))][doc[i]];
    }
  }
  if (tokens == 0) throw ValidationError("n-gram corpus is empty");
  for (auto& [key, next] : raw) {
    Counts c;
    for (const auto& [id, n] : next) {
      c.total += n;
      c.next.emplace_back(id, n);
    }
    table_.emplace(key, std::move(c));
  }
}

std::string NGramModel::key_of(std::span<const TokenId> context) {
  std::string key(context.size() * sizeof(TokenId), '\0');
  for (std::size_t i = 0; i < context.size(); ++i)
    for (std::size_t b = 0; b < sizeof(TokenId); ++b)
      key[i * sizeof(TokenId) + b] = static_cast<char>(context[i] >> (8 * b));
  return key;
}

std::vector<double> NGramModel::next_distribution(std::span<const TokenId> context) const {
  const std::size_t n = std::min(order_, context.size());
  const auto it = table_.find(key_of(context.subspan(context.size() - n)));
  if (it == table_.end()) return std::vector<double>(vocab_size_, 1.0 / double(vocab_size_));
  const Counts& c = it->second;
  const double denom = double(c.total) + alpha_ * double(vocab_size_);
  std::vector<double> dist(vocab_size_, alpha_ / denom);
  for (const auto& [id, count] : c.next) dist[id] = (double(count) + alpha_) / denom;
  return dist;
}

NGramModel build_ngram_model(std::span<const Bytes> corpus, const Vocabulary& vocab,
                             std::size_t order, double alpha) {
  std::vector<std::vector<TokenId>> docs;
  docs.reserve(corpus.size());
  for (const Bytes& text : corpus) docs.push_back(vocab.encode(text));
  return NGramModel(docs, vocab.size(), order, alpha);
}

// ---------------------------------------------------------------------------

ScriptedModel::ScriptedModel(const Vocabulary& vocab, std::vector<ScriptedRow> rows,
                             std::optional<std::vector<double>> default_row)
    : vocab_(&vocab), rows_(std::move(rows)) {
  if (!default_row) throw ValidationError("scripted model requires a default row");
  default_ = std::move(*default_row);
  auto check = [&](const std::vector<double>& probs, const std::string& what) {
    try {
      check_distribution(probs, vocab.size());
    } catch (const ContractViolation& e) {
      throw ValidationError(what + ": " + e.what());
    }
  };
  check(default_, "default row");
  std::set<Bytes> seen;
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    check(rows_[k].probs, "row " + std::to_string(k));
    if (!seen.insert(rows_[k].suffix).second)
      throw ValidationError("row " + std::to_string(k) + " repeats suffix \"" +
                            escape_bytes(rows_[k].suffix) + "\"");
  }
}

std::vector<double> ScriptedModel::next_distribution(std::span<const TokenId> context) const {
  const Bytes text = vocab_->decode(context);
  const ScriptedRow* best = nullptr;
  for (const ScriptedRow& row : rows_) {
    if (text.size() >= row.suffix.size() &&
        text.compare(text.size() - row.suffix.size(), row.suffix.size(), row.suffix) == 0 &&
        (best == nullptr || row.suffix.size() > best->suffix.size()))
      best = &row;
  }
  return best ? best->probs : default_;
}

ScriptedModel parse_scripted_model(std::string_view json_text, const Vocabulary& vocab) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError("scripted table", e.what());
  }
  auto probs_of = [](const json& node, const std::string& where) {
    if (!node.is_array()) throw FormatError(where, "expected an array of probabilities");
    std::vector<double> probs;
    for (const auto& p : node) {
      if (!p.is_number()) throw FormatError(where, "expected numbers");
      probs.push_back(p.get<double>());
    }
    return probs;
  };
  if (!doc.is_object()) throw FormatError("scripted table", "top level must be an object");
  std::vector<ScriptedRow> rows;
  if (doc.contains("rows")) {
    if (!doc["rows"].is_array()) throw FormatError("rows", "expected an array");
    for (std::size_t k = 0; k < doc["rows"].size(); ++k) {
      const std::string where = "rows[" + std::to_string(k) + "]";
      const auto& r = doc["rows"][k];
      if (!r.is_object() || !r.contains("suffix_b64") || !r["suffix_b64"].is_string())
        throw FormatError(where + ".suffix_b64", "expected a base64 string");
      auto suffix = base64_decode(r["suffix_b64"].get<std::string>());
      if (!suffix) throw FormatError(where + ".suffix_b64", "invalid base64");
      if (!r.contains("probs")) throw FormatError(where + ".probs", "missing");
      rows.push_back({std::move(*suffix), probs_of(r["probs"], where + ".probs")});
    }
  }
  std::optional<std::vector<double>> def;
  if (doc.contains("default")) def = probs_of(doc["default"], "default");
  return ScriptedModel(vocab, std::move(rows), std::move(def));
}

ScriptedModel load_scripted_model(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scripted_model(ss.str(), vocab);
}

}  // namespace tokalign
