#include "tokalign/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tokalign/errors.hpp"

namespace tokalign::io {

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string(), "cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const Bytes text = read_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == Bytes::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<Document> parse_corpus_jsonl(std::string_view text, const std::string& origin) {
  std::vector<Document> docs;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    json node;
    try {
      node = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(where, e.what());
    }
    if (!node.is_object()) throw FormatError(where, "expected an object");
    Document doc;
    if (node.contains("id")) {
      doc.id = node["id"].is_string() ? node["id"].get<std::string>() : node["id"].dump();
    } else {
      doc.id = std::to_string(docs.size());
    }
    if (node.contains("text") && node["text"].is_string()) {
      doc.text = node["text"].get<std::string>();
    } else if (node.contains("text_b64")) {
      doc.text = b64_field(node, "text_b64", where);
    } else {
      throw FormatError(where + ".text", "expected a string");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Document> docs;
    for (const auto& f : files) docs.push_back({f.filename().string(), read_file(f)});
    return docs;
  }
  if (path.extension() == ".jsonl") return parse_corpus_jsonl(read_file(path), path.string());
  return {{path.filename().string(), read_file(path)}};
}

Bytes b64_field(const json& node, const char* key, const std::string& where) {
  const auto it = node.find(key);
  if (it == node.end() || !it->is_string())
    throw FormatError(where + "." + key, "expected a base64 string");
  auto decoded = base64_decode(it->get<std::string>());
  if (!decoded) throw FormatError(where + "." + key, "invalid base64");
  return *decoded;
}

json to_json(const GenerationResult& r, bool with_timings) {
  json node{{"prompt_b64", base64_encode(r.prompt)},
            {"output_b64", base64_encode(r.output)},
            {"token_ids", r.token_ids},
            {"alignment_steps", r.alignment_steps},
            {"mask_sizes", r.mask_sizes},
            {"dead_end", r.dead_end}};
  if (with_timings) {
    node["timings_us"] = {{"alignment", r.timings_us.alignment_us},
                          {"free", r.timings_us.free_us},
                          {"per_lookup_max", r.timings_us.per_lookup_max_us}};
  }
  return node;
}

GenerationResult generation_from_json(const json& node) {
  GenerationResult r;
  r.prompt = b64_field(node, "prompt_b64", "generation");
  r.output = b64_field(node, "output_b64", "generation");
  r.token_ids = node.at("token_ids").get<std::vector<TokenId>>();
  r.alignment_steps = node.at("alignment_steps").get<std::size_t>();
  r.mask_sizes = node.at("mask_sizes").get<std::vector<std::size_t>>();
  r.dead_end = node.at("dead_end").get<bool>();
  if (node.contains("timings_us")) {
    const auto& t = node["timings_us"];
    r.timings_us = {t.at("alignment").get<double>(), t.at("free").get<double>(),
                    t.at("per_lookup_max").get<double>()};
  }
  return r;
}

json to_json(const ScenarioExample& ex) {
  return json{{"id", ex.id},
              {"scenario", std::string(to_string(ex.scenario))},
              {"source_id", ex.source_id},
              {"prompt_b64", base64_encode(ex.prompt)},
              {"baseline_prompt_b64", base64_encode(ex.baseline_prompt)},
              {"ground_truth_b64", base64_encode(ex.ground_truth)},
              {"cut_offset", ex.cut_offset}};
}

ScenarioExample example_from_json(const json& node, const std::string& where) {
  if (!node.is_object()) throw FormatError(where, "expected an object");
  ScenarioExample ex;
  if (!node.contains("scenario") || !node["scenario"].is_string())
    throw FormatError(where + ".scenario", "expected a string");
  const auto scenario = parse_scenario(node["scenario"].get<std::string>());
  if (!scenario) throw FormatError(where + ".scenario", "unknown scenario");
  ex.scenario = *scenario;
  ex.id = node.value("id", std::string{});
  ex.source_id = node.value("source_id", std::string{});
  ex.prompt = b64_field(node, "prompt_b64", where);
  ex.baseline_prompt = b64_field(node, "baseline_prompt_b64", where);
  ex.ground_truth = b64_field(node, "ground_truth_b64", where);
  if (!node.contains("cut_offset") || !node["cut_offset"].is_number_unsigned())
    throw FormatError(where + ".cut_offset", "expected a non-negative integer");
  ex.cut_offset = node["cut_offset"].get<std::size_t>();
  return ex;
}

std::vector<ScenarioExample> load_examples(const std::filesystem::path& path) {
  const Bytes text = read_file(path);
  std::vector<ScenarioExample> out;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == Bytes::npos) end = text.size();
    ++line_no;
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json node;
    try {
      node = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(where, e.what());
    }
    out.push_back(example_from_json(node, where));
  }
  return out;
}

std::string to_jsonl(const std::vector<ScenarioExample>& examples) {
  std::string out;
  for (const auto& ex : examples) out += to_json(ex).dump() + "\n";
  return out;
}

json to_json(const DatasetStats& s) {
  return json{{"scenario", std::string(to_string(s.scenario))},
              {"seed", s.seed},
              {"documents", s.documents},
              {"emitted", s.emitted},
              {"skipped", s.skipped}};
}

}  // namespace tokalign::io
