#include "tokalign/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tokalign/errors.hpp"

namespace tokalign {
namespace {

bool is_pretoken_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

std::vector<ByteView> pretokenize(ByteView text, const PretokenizeOptions& options) {
  std::vector<ByteView> units;
  const std::size_t n = text.size();
  std::size_t i = 0;
  auto emit_space_run = [&](std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    if (options.whitespace_runs) {
      units.push_back(text.substr(begin, end - begin));
    } else {
      for (std::size_t k = begin; k < end; ++k) units.push_back(text.substr(k, 1));
    }
  };
  while (i < n) {
    std::size_t start = i;
    if (is_pretoken_space(static_cast<unsigned char>(text[i]))) {
      std::size_t j = i;
      while (j < n && is_pretoken_space(static_cast<unsigned char>(text[j]))) ++j;
      const bool attach = options.space_prefix && j < n && text[j - 1] == ' ';
      const std::size_t run_end = attach ? j - 1 : j;
      emit_space_run(i, run_end);
      if (!attach) {
        i = j;
        continue;
      }
      start = run_end;
      i = run_end + 1;
    }
    const bool word = is_word_byte(static_cast<unsigned char>(text[i]));
    while (i < n) {
      const auto c = static_cast<unsigned char>(text[i]);
      if (is_pretoken_space(c) || is_word_byte(c) != word) break;
      ++i;
    }
    units.push_back(text.substr(start, i - start));
  }
  return units;
}

Vocabulary::Vocabulary(std::vector<Bytes> tokens, std::vector<Merge> merges,
                       std::vector<TokenId> specials,
                       std::optional<PretokenizeOptions> pretokenizer)
    : tokens_(std::move(tokens)),
      merges_(std::move(merges)),
      specials_(std::move(specials)),
      special_(tokens_.size(), false),
      pretokenizer_(pretokenizer) {
  std::fill(std::begin(byte_token_), std::end(byte_token_), -1);
  if (tokens_.size() > std::numeric_limits<TokenId>::max())
    throw ValidationError("vocabulary too large");
  for (const TokenId id : specials_) {
    if (id >= tokens_.size())
      throw ValidationError("special id " + std::to_string(id) + " is out of range");
    if (special_[id]) throw ValidationError("special id " + std::to_string(id) + " listed twice");
    special_[id] = true;
  }
  for (TokenId id = 0; id < tokens_.size(); ++id) {
    const Bytes& b = tokens_[id];
    if (b.empty()) throw ValidationError("token " + std::to_string(id) + " has empty bytes");
    max_len_ = std::max(max_len_, b.size());
    if (special_[id]) continue;
    const auto [it, inserted] = by_bytes_.emplace(b, id);
    if (!inserted)
      throw ValidationError("duplicate token bytes \"" + escape_bytes(b) + "\" for ids " +
                            std::to_string(it->second) + " and " + std::to_string(id));
    if (b.size() == 1) byte_token_[static_cast<unsigned char>(b[0])] = static_cast<int>(id);
  }
  for (std::size_t rank = 0; rank < merges_.size(); ++rank) {
    const Merge& m = merges_[rank];
    const auto left = find(m.left);
    const auto right = find(m.right);
    const auto merged = find(m.left + m.right);
    if (!left || !right || !merged)
      throw ValidationError("merge " + std::to_string(rank) + " (\"" + escape_bytes(m.left) +
                            "\", \"" + escape_bytes(m.right) + "\") references unknown tokens");
    const auto [it, inserted] = merge_rules_.emplace(
        pair_key(*left, *right), MergeRule{static_cast<std::uint32_t>(rank), *merged});
    if (!inserted) throw ValidationError("merge " + std::to_string(rank) + " is a duplicate");
  }
}

const Bytes& Vocabulary::bytes(TokenId id) const {
  if (id >= tokens_.size())
    throw ValidationError("token id " + std::to_string(id) + " is out of range");
  return tokens_[id];
}

std::optional<TokenId> Vocabulary::find(ByteView bytes) const {
  const auto it = by_bytes_.find(Bytes(bytes));
  if (it == by_bytes_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::covers_all_bytes() const noexcept {
  return std::all_of(std::begin(byte_token_), std::end(byte_token_),
                     [](int id) { return id >= 0; });
}

std::vector<TokenId> Vocabulary::encode(ByteView text) const {
  std::vector<TokenId> out;
  out.reserve(text.size() / 2 + 1);
  auto encode_piece = [&](ByteView piece, std::size_t base) {
    if (merges_.empty()) {
      encode_greedy(piece, base, out);
    } else {
      encode_bpe(piece, base, out);
    }
  };
  if (pretokenizer_) {
    for (const ByteView piece : pretokenize(text, *pretokenizer_))
      encode_piece(piece, static_cast<std::size_t>(piece.data() - text.data()));
  } else if (!text.empty()) {
    encode_piece(text, 0);
  }
  return out;
}

void Vocabulary::encode_greedy(ByteView piece, std::size_t base,
                               std::vector<TokenId>& out) const {
  std::size_t i = 0;
  Bytes probe;
  while (i < piece.size()) {
    std::size_t len = std::min(max_len_, piece.size() - i);
    for (; len > 0; --len) {
      probe.assign(piece.substr(i, len));
      if (const auto it = by_bytes_.find(probe); it != by_bytes_.end()) {
        out.push_back(it->second);
        break;
      }
    }
    if (len == 0)
      throw EncodingError(base + i, "no token covers byte 0x" +
                                        escape_bytes(piece.substr(i, 1)));
    i += len;
  }
}

void Vocabulary::encode_bpe(ByteView piece, std::size_t base, std::vector<TokenId>& out) const {
  std::vector<TokenId> parts;
  parts.reserve(piece.size());
  for (std::size_t k = 0; k < piece.size(); ++k) {
    const int id = byte_token_[static_cast<unsigned char>(piece[k])];
    if (id < 0)
      throw EncodingError(base + k, "no single-byte token for \"" +
                                        escape_bytes(piece.substr(k, 1)) + "\"");
    parts.push_back(static_cast<TokenId>(id));
  }
  while (parts.size() > 1) {
    std::uint32_t best_rank = std::numeric_limits<std::uint32_t>::max();
    std::size_t best_pos = 0;
    TokenId best_merged = 0;
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
      const auto it = merge_rules_.find(pair_key(parts[k], parts[k + 1]));
      if (it != merge_rules_.end() && it->second.rank < best_rank) {
        best_rank = it->second.rank;
        best_pos = k;
        best_merged = it->second.merged;
      }
    }
    if (best_rank == std::numeric_limits<std::uint32_t>::max()) break;
    parts[best_pos] = best_merged;
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
  }
  out.insert(out.end(), parts.begin(), parts.end());
}

Bytes Vocabulary::decode(std::span<const TokenId> ids) const {
  Bytes out;
  for (std::size_t pos = 0; pos < ids.size(); ++pos) {
    if (ids[pos] >= tokens_.size())
      throw ValidationError("unknown token id " + std::to_string(ids[pos]) + " at position " +
                            std::to_string(pos));
    out += tokens_[ids[pos]];
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON file format

namespace {

using nlohmann::json;

Bytes bytes_field(const json& node, const std::string& where) {
  if (node.is_string()) return node.get<std::string>();
  if (node.is_object()) {
    const auto it = node.find("bytes_b64");
    if (it != node.end() && it->is_string()) {
      auto decoded = base64_decode(it->get<std::string>());
      if (!decoded) throw FormatError(where + ".bytes_b64", "invalid base64");
      return *decoded;
    }
  }
  throw FormatError(where, "expected a string or {\"bytes_b64\": ...}");
}

json bytes_node(ByteView b) {
  if (is_valid_utf8(b)) return json(std::string(b));
  return json{{"bytes_b64", base64_encode(b)}};
}

}  // namespace

Vocabulary parse_vocabulary(std::string_view json_text) {
  json doc;
  // nlohmann keeps the last of repeated object keys; a repeated token text in
  // the map form must be rejected instead.
  std::vector<std::set<std::string>> keys;
  auto reject_duplicates = [&](int, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) {
      keys.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      keys.pop_back();
    } else if (event == json::parse_event_t::key) {
      if (!keys.back().insert(parsed.get<std::string>()).second)
        throw ValidationError("duplicate key \"" + parsed.get<std::string>() + "\"");
    }
    return true;
  };
  try {
    doc = json::parse(json_text, reject_duplicates);
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C" inside what().
    throw FormatError("vocabulary", e.what());
  }
  if (!doc.is_object()) throw FormatError("vocabulary", "top level must be an object");
  if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"] != 1)
    throw FormatError("version", "expected integer 1");
  if (!doc.contains("tokens") || !(doc["tokens"].is_array() || doc["tokens"].is_object()))
    throw FormatError("tokens", "expected an array or an object");

  // Map form {"text": id, ...} for hand-written UTF-8 vocabularies.
  if (doc["tokens"].is_object()) {
    json list = json::array();
    for (const auto& [text, id] : doc["tokens"].items()) {
      if (!id.is_number_integer()) throw FormatError("tokens." + text, "expected an integer id");
      list.push_back({{"id", id}, {"text", text}});
    }
    doc["tokens"] = std::move(list);
  }

  const auto& entries = doc["tokens"];
  std::vector<std::optional<Bytes>> slots(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string where = "tokens[" + std::to_string(k) + "]";
    const auto& e = entries[k];
    if (!e.is_object()) throw FormatError(where, "expected an object");
    if (!e.contains("id") || !e["id"].is_number_integer())
      throw FormatError(where + ".id", "expected an integer");
    const auto id = e["id"].get<long long>();
    if (id < 0 || static_cast<std::size_t>(id) >= entries.size())
      throw ValidationError(where + ": ids must be dense in [0, " +
                            std::to_string(entries.size()) + "), got " + std::to_string(id));
    const bool has_text = e.contains("text");
    const bool has_b64 = e.contains("bytes_b64");
    if (has_text == has_b64)
      throw FormatError(where, "exactly one of \"text\" or \"bytes_b64\" is required");
    Bytes b;
    if (has_text) {
      if (!e["text"].is_string()) throw FormatError(where + ".text", "expected a string");
      b = e["text"].get<std::string>();
    } else {
      if (!e["bytes_b64"].is_string()) throw FormatError(where + ".bytes_b64", "expected a string");
      auto decoded = base64_decode(e["bytes_b64"].get<std::string>());
      if (!decoded) throw FormatError(where + ".bytes_b64", "invalid base64");
      b = std::move(*decoded);
    }
    if (slots[static_cast<std::size_t>(id)])
      throw ValidationError(where + ": duplicate id " + std::to_string(id));
    slots[static_cast<std::size_t>(id)] = std::move(b);
  }
  std::vector<Bytes> tokens;
  tokens.reserve(slots.size());
  for (auto& s : slots) tokens.push_back(std::move(*s));

  std::vector<Merge> merges;
  if (doc.contains("merges")) {
    if (!doc["merges"].is_array()) throw FormatError("merges", "expected an array");
    for (std::size_t k = 0; k < doc["merges"].size(); ++k) {
      const std::string where = "merges[" + std::to_string(k) + "]";
      const auto& m = doc["merges"][k];
      if (!m.is_array() || m.size() != 2) throw FormatError(where, "expected a pair");
      merges.push_back({bytes_field(m[0], where + "[0]"), bytes_field(m[1], where + "[1]")});
    }
  }
  std::vector<TokenId> specials;
  if (doc.contains("specials")) {
    if (!doc["specials"].is_array()) throw FormatError("specials", "expected an array");
    for (std::size_t k = 0; k < doc["specials"].size(); ++k) {
      const auto& s = doc["specials"][k];
      if (!s.is_number_unsigned())
        throw FormatError("specials[" + std::to_string(k) + "]", "expected a token id");
      specials.push_back(s.get<TokenId>());
    }
  }
  std::optional<PretokenizeOptions> pretok;
  if (doc.contains("pretokenize")) {
    const auto& p = doc["pretokenize"];
    if (!p.is_object()) throw FormatError("pretokenize", "expected an object");
    PretokenizeOptions o;
    for (const auto& [key, field] : {std::pair{"space_prefix", &o.space_prefix},
                                     std::pair{"whitespace_runs", &o.whitespace_runs}}) {
      if (!p.contains(key) || !p[key].is_boolean())
        throw FormatError(std::string("pretokenize.") + key, "expected a boolean");
      *field = p[key].get<bool>();
    }
    pretok = o;
  }
  return Vocabulary(std::move(tokens), std::move(merges), std::move(specials), pretok);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_vocabulary(ss.str());
}

std::string serialize_vocabulary(const Vocabulary& vocab) {
  json doc;
  doc["version"] = 1;
  json tokens = json::array();
  for (TokenId id = 0; id < vocab.size(); ++id) {
    const Bytes& b = vocab.tokens()[id];
    json entry{{"id", id}};
    if (is_valid_utf8(b)) {
      entry["text"] = b;
    } else {
      entry["bytes_b64"] = base64_encode(b);
    }
    tokens.push_back(std::move(entry));
  }
  doc["tokens"] = std::move(tokens);
  if (!vocab.merges().empty()) {
    json merges = json::array();
    for (const Merge& m : vocab.merges()) merges.push_back({bytes_node(m.left), bytes_node(m.right)});
    doc["merges"] = std::move(merges);
  }
  doc["specials"] = vocab.specials();
  if (const auto& p = vocab.pretokenizer()) {
    doc["pretokenize"] = {{"space_prefix", p->space_prefix},
                          {"whitespace_runs", p->whitespace_runs}};
  }
  return doc.dump(1) + "\n";
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string(), "cannot open for writing");
  out << serialize_vocabulary(vocab);
}

}  // namespace tokalign
