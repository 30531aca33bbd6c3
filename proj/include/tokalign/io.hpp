#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tokalign/bytes.hpp"
#include "tokalign/generation.hpp"
#include "tokalign/scenarios.hpp"

namespace tokalign::io {

using nlohmann::json;

// Reads a corpus: a directory of files (sorted by name, id = file name), a
// JSONL file of {"id", "text"} objects (".jsonl"), or any other file as a
// single raw-bytes document.
std::vector<Document> load_corpus(const std::filesystem::path& path);
std::vector<Document> parse_corpus_jsonl(std::string_view text, const std::string& origin);

// Non-empty lines of a file, without the line terminators.
std::vector<std::string> read_lines(const std::filesystem::path& path);
Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// {prompt_b64, output_b64, token_ids, alignment_steps, mask_sizes,
//  timings_us: {alignment, free, per_lookup_max}, dead_end}.
// Timings vary run to run and are only written when requested.
json to_json(const GenerationResult& result, bool with_timings);
GenerationResult generation_from_json(const json& node);

// Byte fields base64-encoded as *_b64.
json to_json(const ScenarioExample& example);
ScenarioExample example_from_json(const json& node, const std::string& where);
std::vector<ScenarioExample> load_examples(const std::filesystem::path& path);
std::string to_jsonl(const std::vector<ScenarioExample>& examples);

json to_json(const DatasetStats& stats);

// Base64 field accessor with a located error message.
Bytes b64_field(const json& node, const char* key, const std::string& where);

}  // namespace tokalign::io
