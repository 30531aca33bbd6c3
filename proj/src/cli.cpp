#include "tokalign/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tokalign/align.hpp"
#include "tokalign/bench.hpp"
#include "tokalign/bpe_trainer.hpp"
#include "tokalign/errors.hpp"
#include "tokalign/eval.hpp"
#include "tokalign/io.hpp"

namespace tokalign::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads --config files. Top-level keys name global options; nested objects
// address subcommands ({"eval": {"score-bytes": 16}}).
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    json node = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const auto& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        node[name] = results.size() == 1 ? json(results.front()) : json(results);
      } else if (default_also && !opt->get_default_str().empty()) {
        node[name] = opt->get_default_str();
      }
    }
    return node.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json node;
    try {
      node = json::parse(input);
    } catch (const json::parse_error& e) {
      throw CLI::ConfigError(std::string("config: ") + e.what());
    }
    if (!node.is_object()) throw CLI::ConfigError("config: expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(node, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number() || v.is_null()) return v.dump();
    throw CLI::ConfigError("config: unsupported value " + v.dump());
  }

  static void collect(const json& node, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        collect(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Globals {
  std::string vocab;
  std::uint64_t seed = 0;
  std::string provider;
  std::size_t ngram_order = 3;
  double ngram_alpha = 0.01;
  std::size_t backtrack = 3;
  std::string fallback = "error";
  std::size_t max_align_steps = 0;
  std::string sampler = "greedy";
  double top_p = 1.0;
  double temperature = 1.0;
  std::size_t max_new_tokens = 32;
  std::vector<std::string> stop;
  std::size_t cache_capacity = MaskCache::kDefaultCapacity;
};

AlignConfig align_config(const Globals& g) {
  AlignConfig a;
  a.backtrack_tokens = g.backtrack;
  a.fallback = g.fallback == "raw-bytes" ? FallbackPolicy::emit_raw_bytes : FallbackPolicy::error;
  a.max_alignment_steps = g.max_align_steps;
  validate(a);
  return a;
}

SamplerConfig sampler_config(const Globals& g) {
  SamplerConfig s;
  s.mode = g.sampler == "nucleus" ? SamplingMode::nucleus : SamplingMode::greedy;
  s.top_p = g.top_p;
  s.temperature = g.temperature;
  s.seed = g.seed;
  s.max_new_tokens = g.max_new_tokens;
  s.stop_sequences.assign(g.stop.begin(), g.stop.end());
  validate(s);
  return s;
}

Vocabulary require_vocab(const Globals& g) {
  if (g.vocab.empty()) throw CLI::RequiredError("--vocab");
  return load_vocabulary(g.vocab);
}

std::unique_ptr<LogitsProvider> make_provider(const Globals& g, const Vocabulary& vocab) {
  const auto colon = g.provider.find(':');
  if (g.provider.empty() || colon == std::string::npos)
    throw CLI::ValidationError("--provider", "expected ngram:<corpus> or scripted:<table.json>");
  const std::string kind = g.provider.substr(0, colon);
  const std::string path = g.provider.substr(colon + 1);
  if (kind == "scripted") return std::make_unique<ScriptedModel>(load_scripted_model(path, vocab));
  if (kind == "ngram") {
    std::vector<Bytes> texts;
    for (auto& d : io::load_corpus(path)) texts.push_back(std::move(d.text));
    return std::make_unique<NGramModel>(
        build_ngram_model(texts, vocab, g.ngram_order, g.ngram_alpha));
  }
  throw CLI::ValidationError("--provider", "unknown provider kind '" + kind + "'");
}

// Writes to --output when given, else to `out`.
void emit(const std::string& output, std::ostream& out, const std::string& text) {
  if (output.empty() || output == "-") {
    out << text;
  } else {
    io::write_file(output, text);
  }
}

struct Prompt {
  std::string id;
  Bytes bytes;
};

std::vector<Prompt> parse_prompts(const std::string& text, const std::string& origin) {
  std::vector<Prompt> prompts;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    json node;
    try {
      node = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(where, e.what());
    }
    if (!node.is_object()) throw FormatError(where, "expected an object");
    Prompt p;
    p.id = node.contains("id") ? (node["id"].is_string() ? node["id"].get<std::string>()
                                                         : node["id"].dump())
                               : std::to_string(prompts.size());
    if (node.contains("prompt_b64")) {
      p.bytes = io::b64_field(node, "prompt_b64", where);
    } else if (node.contains("prompt") && node["prompt"].is_string()) {
      p.bytes = node["prompt"].get<std::string>();
    } else {
      throw FormatError(where, "expected prompt or prompt_b64");
    }
    prompts.push_back(std::move(p));
  }
  return prompts;
}

struct AlignFlags {
  std::vector<std::string> prompts;
  std::string prompt_file;
  std::string output;
  bool no_align = false;
  bool timings = false;
};

int cmd_align(const Globals& g, const AlignFlags& f, std::istream& in, std::ostream& out,
              std::ostream& err) {
  const Vocabulary vocab = require_vocab(g);
  const auto provider = make_provider(g, vocab);
  const AlignConfig align = align_config(g);
  const SamplerConfig base = sampler_config(g);

  std::vector<Prompt> prompts;
  for (const auto& p : f.prompts) prompts.push_back({std::to_string(prompts.size()), p});
  if (!f.prompt_file.empty() && f.prompt_file != "-") {
    auto more = parse_prompts(io::read_file(f.prompt_file), f.prompt_file);
    prompts.insert(prompts.end(), more.begin(), more.end());
  } else if (f.prompts.empty()) {
    std::stringstream ss;
    ss << in.rdbuf();
    prompts = parse_prompts(ss.str(), "<stdin>");
  }

  std::optional<ByteTrie> trie;
  std::optional<MaskCache> cache;
  if (!f.no_align) {
    trie.emplace(vocab);
    cache.emplace(*trie, g.cache_capacity);
  }
  std::string text;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    SamplerConfig s = base;
    s.seed = base.seed ^ static_cast<std::uint64_t>(i);
    GenerationResult r;
    try {
      r = f.no_align || prompts[i].bytes.empty()
              ? generate(*provider, vocab, prompts[i].bytes, s)
              : aligned_generate(*provider, vocab, *trie, *cache, prompts[i].bytes, align, s);
    } catch (const DeadEndError& e) {
      emit(f.output, out, text);
      err << "error: prompt " << prompts[i].id << ": " << e.what() << "\n";
      return kDeadEnd;
    }
    json node = io::to_json(r, f.timings);
    node["id"] = prompts[i].id;
    text += node.dump() + "\n";
  }
  emit(f.output, out, text);
  return kOk;
}

struct DatasetFlags {
  std::string corpus;
  std::string scenario = "all";
  std::size_t per_doc = 1;
  std::string out_dir;
};

int cmd_gen_dataset(const Globals& g, const DatasetFlags& f, std::ostream& out) {
  std::vector<Scenario> scenarios;
  if (f.scenario == "all") {
    scenarios.assign(std::begin(kAllScenarios), std::end(kAllScenarios));
  } else if (auto s = parse_scenario(f.scenario)) {
    scenarios.push_back(*s);
  } else {
    throw CLI::ValidationError("--scenario", "unknown scenario '" + f.scenario + "'");
  }
  const auto corpus = io::load_corpus(f.corpus);
  fs::create_directories(f.out_dir);
  json stats = json::array();
  for (Scenario s : scenarios) {
    const auto ds = generate_dataset(corpus, s, g.seed, f.per_doc);
    const fs::path file = fs::path(f.out_dir) / (std::string(to_string(s)) + ".jsonl");
    io::write_file(file, io::to_jsonl(ds.examples));
    json entry = io::to_json(ds.stats);
    entry["file"] = file.filename().string();
    stats.push_back(entry);
  }
  io::write_file(fs::path(f.out_dir) / "stats.json", stats.dump(2) + "\n");
  out << stats.dump(2) << "\n";
  return kOk;
}

struct EvalFlags {
  std::vector<std::string> datasets;
  std::string arm = "both";
  std::vector<std::string> metrics = kAllMetrics;
  std::size_t score_bytes = 32;
  std::size_t fuzzy_words = 50;
  bool no_baseline = false;
  bool validate_only = false;
  std::string format = "json";
  std::string output;
  std::string records;
};

int cmd_eval(const Globals& g, const EvalFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<ScenarioExample> examples;
  for (const auto& path : f.datasets) {
    auto more = io::load_examples(path);
    examples.insert(examples.end(), more.begin(), more.end());
  }
  if (f.validate_only) {
    for (const auto& ex : examples) {
      if (const auto problem = validate_example(ex); !problem.empty()) {
        err << "error: example " << ex.id << ": " << problem << "\n";
        return kDataError;
      }
    }
    out << json{{"examples", examples.size()}, {"valid", true}}.dump() << "\n";
    return kOk;
  }

  const Vocabulary vocab = require_vocab(g);
  const auto provider = make_provider(g, vocab);
  EvalOptions o;
  o.align = align_config(g);
  o.sampler = sampler_config(g);
  if (f.arm == "aligned") {
    o.arms = {Arm::aligned};
  } else if (f.arm == "unaligned") {
    o.arms = {Arm::unaligned};
  }
  o.metrics = f.metrics;
  o.score_bytes = f.score_bytes;
  o.fuzzy_words = f.fuzzy_words;
  o.include_baseline = !f.no_baseline;

  const ByteTrie trie(vocab);
  MaskCache cache(trie, g.cache_capacity);
  const auto records = run_eval(examples, *provider, vocab, trie, cache, o);
  if (!f.records.empty()) {
    std::string lines;
    for (const auto& r : records) lines += to_json(r).dump() + "\n";
    io::write_file(f.records, lines);
  }
  const auto report = summarize(records, o);
  emit(f.output, out, f.format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n");
  return kOk;
}

struct BenchFlags {
  std::size_t vocab_size = 50000;
  std::size_t queries = 10000;
  std::size_t warmup = 1000;
  std::string prompts;
  std::size_t per_doc = 4;
  std::string output;
};

int cmd_bench(const Globals& g, const BenchFlags& f, std::ostream& out) {
  const Vocabulary vocab =
      g.vocab.empty() ? synthetic_vocabulary(f.vocab_size, g.seed) : load_vocabulary(g.vocab);
  LookupBenchOptions lo;
  lo.queries = f.queries;
  lo.warmup = f.warmup;
  lo.seed = g.seed;
  const auto lookup = bench_lookup(vocab, lo);
  json report{{"lookup", to_json(lookup)},
              {"checks",
               {{"trie_median_below_naive", lookup.trie.p50 < lookup.naive.p50},
                {"cached_space_median_le_trie", lookup.cached_space.p50 <= lookup.trie.p50},
                {"trie_median_below_1ms", lookup.trie.p50 < 1000.0}}}};

  if (!f.prompts.empty()) {
    const auto corpus = io::load_corpus(f.prompts);
    Globals pg = g;
    if (pg.provider.empty()) pg.provider = "ngram:" + f.prompts;
    const auto provider = make_provider(pg, vocab);
    const AlignConfig align = align_config(g);
    const auto prompts = boundary_prompts(corpus, vocab, align.backtrack_tokens + 1, f.per_doc, g.seed);
    const ByteTrie trie(vocab);
    MaskCache cache(trie, g.cache_capacity);
    const auto hist =
        step_histogram(*provider, vocab, trie, cache, prompts, align, sampler_config(g));
    report["alignment_steps"] = to_json(hist);
    report["alignment_steps"]["backtrack"] = align.backtrack_tokens;
  }
  emit(f.output, out, report.dump(2) + "\n");
  return kOk;
}

struct TrainFlags {
  std::string corpus;
  std::size_t size = 512;
  bool no_space_prefix = false;
  bool no_whitespace_runs = false;
  std::vector<std::string> specials = {"<eos>"};
  std::string output;
};

int cmd_vocab_train(const TrainFlags& f, std::ostream& out) {
  std::vector<Bytes> texts;
  for (auto& d : io::load_corpus(f.corpus)) texts.push_back(std::move(d.text));
  BpeTrainOptions o;
  o.pretokenize.space_prefix = !f.no_space_prefix;
  o.pretokenize.whitespace_runs = !f.no_whitespace_runs;
  o.specials.assign(f.specials.begin(), f.specials.end());
  const auto vocab = train_tiny_bpe(texts, f.size, o);
  emit(f.output, out, serialize_vocabulary(vocab));
  return kOk;
}

int cmd_vocab_inspect(const Globals& g, const std::vector<std::string>& encode,
                      std::ostream& out) {
  const Vocabulary vocab = require_vocab(g);
  const ByteTrie trie(vocab);
  json info{{"size", vocab.size()},
            {"merges", vocab.merges().size()},
            {"specials", vocab.specials()},
            {"covers_all_bytes", vocab.covers_all_bytes()},
            {"max_token_length", vocab.max_token_length()},
            {"trie_nodes", trie.node_count()},
            {"trie_depth", trie.depth()},
            {"fingerprint", ByteTrie::fingerprint(vocab)}};
  if (const auto& p = vocab.pretokenizer())
    info["pretokenize"] = {{"space_prefix", p->space_prefix},
                           {"whitespace_runs", p->whitespace_runs}};
  json encoded = json::array();
  for (const auto& text : encode) {
    json pieces = json::array();
    const auto ids = vocab.encode(text);
    for (TokenId id : ids) pieces.push_back(escape_bytes(vocab.bytes(id)));
    encoded.push_back({{"text", text}, {"ids", ids}, {"tokens", pieces}});
  }
  if (!encode.empty()) info["encode"] = encoded;
  out << info.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Token alignment for partial-token prompts", "tokalign"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "Read options from a JSON file");

  Globals g;
  app.add_option("--vocab", g.vocab, "Vocabulary JSON file");
  app.add_option("--seed", g.seed, "Seed for every stochastic component")->capture_default_str();
  app.add_option("--provider", g.provider, "ngram:<corpus> or scripted:<table.json>");
  app.add_option("--ngram-order", g.ngram_order, "Context length of the n-gram model")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--ngram-alpha", g.ngram_alpha, "Add-alpha smoothing")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--backtrack", g.backtrack, "Tokens moved into the alignment prefix")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--fallback", g.fallback, "Dead-end policy")
      ->capture_default_str()
      ->check(CLI::IsMember({"error", "raw-bytes"}));
  app.add_option("--max-align-steps", g.max_align_steps, "Alignment step limit (0: 4B+16)")
      ->capture_default_str();
  app.add_option("--sampler", g.sampler, "greedy or nucleus")
      ->capture_default_str()
      ->check(CLI::IsMember({"greedy", "nucleus"}));
  app.add_option("--top-p", g.top_p)->capture_default_str();
  app.add_option("--temperature", g.temperature)->capture_default_str();
  app.add_option("--max-new-tokens", g.max_new_tokens, "Tokens after alignment")
      ->capture_default_str();
  app.add_option("--stop", g.stop, "Stop sequence (repeatable)");
  app.add_option("--cache-capacity", g.cache_capacity, "Mask cache entries")
      ->capture_default_str();

  AlignFlags af;
  auto* align = app.add_subcommand("align", "Complete prompts with token alignment");
  align->add_option("--prompt", af.prompts, "Prompt text (repeatable)");
  align->add_option("--prompt-file", af.prompt_file, "JSONL of {id, prompt|prompt_b64}");
  align->add_option("-o,--output", af.output, "Output JSONL (default stdout)");
  align->add_flag("--no-align", af.no_align, "Plain decoding without alignment");
  align->add_flag("--timings", af.timings, "Include wall-clock timings");

  DatasetFlags df;
  auto* gen = app.add_subcommand("gen-dataset", "Cut partial-token examples from a corpus");
  gen->add_option("--corpus", df.corpus, "JSONL, directory or text file")->required();
  gen->add_option("--scenario", df.scenario, "Scenario name or 'all'")->capture_default_str();
  gen->add_option("--per-doc", df.per_doc, "Cuts per document")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("--out-dir", df.out_dir, "Output directory")->required();

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "Score aligned and unaligned completions");
  eval->add_option("--dataset", ef.datasets, "Example JSONL files")->required();
  eval->add_option("--arm", ef.arm)->capture_default_str()->check(
      CLI::IsMember({"both", "aligned", "unaligned"}));
  eval->add_option("--metrics", ef.metrics, "Comma-separated subset of em,es,fta,fuzzy_es,fuzzy_rouge")
      ->delimiter(',')
      ->check(CLI::IsMember(kAllMetrics));
  eval->add_option("--score-bytes", ef.score_bytes, "Window for em and es")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  eval->add_option("--fuzzy-words", ef.fuzzy_words)->capture_default_str()->check(
      CLI::PositiveNumber);
  eval->add_flag("--no-baseline", ef.no_baseline, "Skip the word-boundary control prompts");
  eval->add_flag("--validate-only", ef.validate_only, "Only check the dataset files");
  eval->add_option("--format", ef.format)->capture_default_str()->check(
      CLI::IsMember({"json", "csv"}));
  eval->add_option("-o,--output", ef.output);
  eval->add_option("--records", ef.records, "Per-example JSONL output");

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Lookup latency and alignment step counts");
  bench->add_option("--vocab-size", bf.vocab_size, "Synthetic vocabulary size without --vocab")
      ->capture_default_str()
      ->check(CLI::Range(256, 10000000));
  bench->add_option("--queries", bf.queries)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--warmup", bf.warmup)->capture_default_str();
  bench->add_option("--prompts", bf.prompts, "Corpus for the alignment step histogram");
  bench->add_option("--per-doc", bf.per_doc)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("-o,--output", bf.output);

  TrainFlags tf;
  std::vector<std::string> encode;
  auto* vocab_cmd = app.add_subcommand("vocab", "Vocabulary tools");
  vocab_cmd->require_subcommand(1);
  auto* train = vocab_cmd->add_subcommand("train", "Train a byte-level BPE vocabulary");
  train->add_option("--corpus", tf.corpus)->required();
  train->add_option("--size", tf.size, "Target vocabulary size")->capture_default_str();
  train->add_flag("--no-space-prefix", tf.no_space_prefix);
  train->add_flag("--no-whitespace-runs", tf.no_whitespace_runs);
  train->add_option("--special", tf.specials, "Special token (repeatable)")->capture_default_str();
  train->add_option("-o,--output", tf.output);
  auto* inspect = vocab_cmd->add_subcommand("inspect", "Summarize the --vocab file");
  inspect->add_option("--encode", encode, "Text to tokenize (repeatable)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*align) return cmd_align(g, af, in, out, err);
    if (*gen) return cmd_gen_dataset(g, df, out);
    if (*eval) return cmd_eval(g, ef, out, err);
    if (*bench) return cmd_bench(g, bf, out);
    if (*train) return cmd_vocab_train(tf, out);
    if (*inspect) return cmd_vocab_inspect(g, encode, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DeadEndError& e) {
    err << "error: " << e.what() << "\n";
    return kDeadEnd;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::ios::sync_with_stdio(false);
  return run(args, std::cin, std::cout, std::cerr);
}

}  // namespace tokalign::cli
