#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tokalign {

// Raw byte strings. std::string is used as a byte container throughout; no
// text encoding is assumed.
using Bytes = std::string;
using ByteView = std::string_view;

std::string base64_encode(ByteView data);
// Returns nullopt on any malformed input (bad alphabet, bad padding).
std::optional<Bytes> base64_decode(std::string_view text);

bool is_valid_utf8(ByteView data);

inline bool starts_with(ByteView s, ByteView prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

// Two-way compatibility used by alignment: either side is a prefix of the other.
inline bool prefix_compatible(ByteView token, ByteView prefix) {
  return starts_with(token, prefix) || starts_with(prefix, token);
}

// Character classes shared by pretokenization and the scenario cutters.
// Bytes >= 0x80 count as word bytes so UTF-8 sequences stay inside words.
inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c == '_' || c >= 0x80;
}
inline bool is_space_byte(unsigned char c) { return c == ' ' || c == '\n' || c == '\t'; }
inline bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
         (c >= 0x7b && c <= 0x7e);
}

// Printable rendering for diagnostics: non-printable bytes become \xNN.
std::string escape_bytes(ByteView data);

}  // namespace tokalign
