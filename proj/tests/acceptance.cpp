// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tokalign/align.hpp"
#include "tokalign/bench.hpp"
#include "tokalign/bpe_trainer.hpp"
#include "tokalign/cli.hpp"
#include "tokalign/errors.hpp"
#include "tokalign/eval.hpp"
#include "tokalign/io.hpp"
#include "tokalign/metrics.hpp"
#include "tokalign/provider.hpp"
#include "tokalign/trie.hpp"

using namespace tokalign;
namespace fs = std::filesystem;

namespace {

const fs::path kData = TOKALIGN_DATA_DIR;

// Pinned thresholds for criterion 5, calibrated on data/corpus/synthetic_code.jsonl.
constexpr std::uint64_t kCalibrationSeed = 0;
constexpr std::size_t kCalibrationVocab = 1000;
constexpr double kBaselineGap = 0.02;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng.next_u64() % n); }

std::vector<Bytes> texts_of(const std::vector<Document>& docs) {
  std::vector<Bytes> out;
  for (const auto& d : docs) out.push_back(d.text);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 1. Trie against a startswith scan.
Outcome trie_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  const std::vector<std::string> alphabets{"ab", "abc ", "xyz_ \n", "", "0123456789abcdef"};
  std::size_t queries = 0;
  for (int v = 0; v < 120; ++v) {
    const auto& alpha = alphabets[v % alphabets.size()];
    const std::size_t target = 1 + below(rng, 2000);
    std::set<Bytes> uniq;
    for (std::size_t i = 0; i < target * 3 && uniq.size() < target; ++i) {
      const std::size_t len = 1 + below(rng, 8);
      Bytes t;
      for (std::size_t j = 0; j < len; ++j)
        t += alpha.empty() ? static_cast<char>(below(rng, 256)) : alpha[below(rng, alpha.size())];
      uniq.insert(t);
    }
    std::vector<Bytes> tokens(uniq.begin(), uniq.end());
    std::shuffle(tokens.begin(), tokens.end(), std::mt19937_64(rng.next_u64()));
    const Vocabulary vocab(tokens);
    const ByteTrie trie(vocab);
    for (int q = 0; q < 100; ++q) {
      Bytes p;
      if (q % 2 == 0) {
        p = tokens[below(rng, tokens.size())];
        p += tokens[below(rng, tokens.size())];
        p.resize(1 + below(rng, p.size()));
      } else {
        const std::size_t len = 1 + below(rng, 10);
        for (std::size_t j = 0; j < len; ++j)
          p += alpha.empty() ? static_cast<char>(below(rng, 256)) : alpha[below(rng, alpha.size())];
      }
      const TokenMask got = trie.matching_tokens(p);
      for (TokenId id = 0; id < tokens.size(); ++id) {
        const Bytes& t = tokens[id];
        const bool want = t.starts_with(p) || p.starts_with(t);
        if (got.test(id) != want)
          return {false, "vocabulary " + std::to_string(v) + " disagrees on token " + std::to_string(id)};
      }
      if (got.count() > tokens.size()) return {false, "mask has bits beyond the vocabulary"};
      ++queries;
    }
  }
  const double s = seconds_since(t0);
  return {s < 30.0, fmt("120 vocabularies, %.0f prefixes, exact, %.2f s (limit 30 s)", double(queries), s)};
}

// Shared setup for criteria 2, 3 and 8.
struct Workload {
  std::vector<Document> docs = io::load_corpus(kData / "corpus" / "python_functions.jsonl");
  Vocabulary vocab{{}};
  std::optional<NGramModel> model;
  std::optional<ByteTrie> trie;
  struct Case {
    Bytes prompt;
    std::size_t backtrack;
    std::uint64_t seed;
  };
  std::vector<Case> cases;

  Workload() {
    const auto texts = texts_of(docs);
    BpeTrainOptions opts;
    opts.specials = {"<eos>"};
    vocab = train_tiny_bpe(texts, 600, opts);
    model.emplace(build_ngram_model(texts, vocab, 3, 0.01));
    trie.emplace(vocab);
    Rng rng(202);
    for (std::size_t i = 0; i < 1200; ++i) {
      const Bytes& text = docs[below(rng, docs.size())].text;
      const std::size_t cut = 1 + below(rng, text.size() - 1);
      cases.push_back({text.substr(0, cut), 1 + i % 3, rng.next_u64()});
    }
  }
};

struct RunOutputs {
  std::vector<Bytes> outputs;
  std::string failure;
  std::size_t dead_ends = 0;
  std::size_t over_bound = 0;
};

RunOutputs run_workload(const Workload& w, std::size_t cache_capacity) {
  RunOutputs r;
  MaskCache cache(*w.trie, cache_capacity);
  for (const auto& c : w.cases) {
    AlignConfig align;
    align.backtrack_tokens = c.backtrack;
    SamplerConfig sampler;
    sampler.mode = SamplingMode::nucleus;
    sampler.top_p = 0.95;
    sampler.seed = c.seed;
    sampler.max_new_tokens = 4;
    const auto ids = w.vocab.encode(c.prompt);
    const std::size_t k = std::min(c.backtrack, ids.size());
    const std::size_t prefix_len =
        w.vocab.decode(std::span<const TokenId>(ids).subspan(ids.size() - k)).size();
    try {
      const auto g = aligned_generate(*w.model, w.vocab, *w.trie, cache, c.prompt, align, sampler);
      if (g.dead_end) ++r.dead_ends;
      if (!g.output.starts_with(c.prompt) && r.failure.empty())
        r.failure = "output does not start with the prompt";
      if (g.alignment_steps > prefix_len) ++r.over_bound;
      r.outputs.push_back(g.output);
    } catch (const DeadEndError&) {
      ++r.dead_ends;
      r.outputs.emplace_back();
    }
  }
  return r;
}

const Workload& workload() {
  static const Workload w;
  return w;
}

const RunOutputs& default_run() {
  static const RunOutputs r = run_workload(workload(), MaskCache::kDefaultCapacity);
  return r;
}

// 2. Prompt preservation.
Outcome prompt_preservation() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& w = workload();
  const auto& r = default_run();
  const double s = seconds_since(t0);
  const bool ok = w.vocab.covers_all_bytes() && r.failure.empty() && r.dead_ends == 0 &&
                  r.outputs.size() >= 1000 && s < 60.0;
  std::string d = std::to_string(r.outputs.size()) + " generations, B in {1,2,3}, " +
                  std::to_string(r.dead_ends) + " dead ends" + fmt(", %.2f s (limit 60 s)", s);
  if (!r.failure.empty()) d += ", " + r.failure;
  return {ok, d};
}

// 3. B' <= len(prefix) and the histogram mode at B = 3.
Outcome termination_bound() {
  const auto& r = default_run();
  const auto docs = io::load_corpus(kData / "corpus" / "synthetic_code.jsonl");
  const auto texts = texts_of(docs);
  BpeTrainOptions opts;
  opts.specials = {"<eos>"};
  const auto vocab = train_tiny_bpe(texts, kCalibrationVocab, opts);
  const auto model = build_ngram_model(texts, vocab, 3, 0.01);
  const ByteTrie trie(vocab);
  MaskCache cache(trie);
  const auto prompts = boundary_prompts(docs, vocab, 4, 4, 0);
  const auto hist = step_histogram(model, vocab, trie, cache, prompts, {}, {});
  std::string counts;
  for (const auto& [steps, n] : hist.counts)
    counts += (counts.empty() ? "" : " ") + std::to_string(steps) + ":" + std::to_string(n);
  return {r.over_bound == 0 && hist.mode() == 3 && hist.dead_ends == 0,
          std::to_string(r.over_bound) + " runs over the bound; histogram over " +
              std::to_string(hist.prompts) + " boundary prompts {" + counts + "}, mode " +
              std::to_string(hist.mode())};
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli_run(const std::vector<std::string>& args) {
  std::istringstream in;
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

// 4. Fig. 2.
Outcome fig2() {
  const fs::path dir = kData / "fig2";
  const std::vector<std::string> base{"--vocab", (dir / "vocab.json").string(), "--provider",
                                      "scripted:" + (dir / "table.json").string(), "align",
                                      "--prompt-file", (dir / "prompts.jsonl").string()};
  auto plain_args = base;
  plain_args.push_back("--no-align");
  const auto aligned = cli_run(base);
  const auto plain = cli_run(plain_args);
  if (aligned.code != 0 || plain.code != 0) return {false, "align exited non-zero: " + aligned.err + plain.err};
  const auto decode = [](const std::string& line) {
    return base64_decode(nlohmann::json::parse(line).at("output_b64").get<std::string>()).value();
  };
  const Bytes prompt = "# write a function to get three maximum numbers from a list\n"
                       "def three_max(l):\n    re";
  const Bytes a = decode(aligned.out);
  const Bytes p = decode(plain.out);
  const Bytes a_tail = a.substr(prompt.size() - 2);
  const Bytes p_tail = p.substr(prompt.size() - 2);
  const bool ok = a.starts_with(prompt.substr(0, prompt.size() - 2) + "return") &&
                  p.starts_with(prompt) && !p.starts_with(prompt.substr(0, prompt.size() - 2) + "return");
  return {ok, "aligned \"" + escape_bytes(a_tail) + "\", unaligned \"" + escape_bytes(p_tail) + "\""};
}

// 5. Directional improvement on the calibrated fixture.
Outcome directional() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto docs = io::load_corpus(kData / "corpus" / "synthetic_code.jsonl");
  const auto texts = texts_of(docs);
  BpeTrainOptions opts;
  opts.specials = {"<eos>"};
  const auto vocab = train_tiny_bpe(texts, kCalibrationVocab, opts);
  const auto model = build_ngram_model(texts, vocab, 3, 0.01);
  const ByteTrie trie(vocab);
  MaskCache cache(trie);
  EvalOptions eval;
  eval.sampler.seed = kCalibrationSeed;
  eval.metrics = {"fta"};
  bool ok = true;
  std::string d;
  for (Scenario s : kAllScenarios) {
    const auto ds = generate_dataset(docs, s, kCalibrationSeed);
    const auto report = summarize(run_eval(ds.examples, model, vocab, trie, cache, eval), eval);
    const std::string name(to_string(s));
    const double gain = report.delta(name, "fta").value();
    const double gap = report.delta(name + "_baseline", "fta").value();
    ok = ok && gain > 0 && std::abs(gap) < kBaselineGap;
    d += name + fmt(" %+.4f (baseline %+.4f); ", gain, gap);
  }
  d += fmt("%.1f s", seconds_since(t0));
  return {ok, d};
}

// 6. pass@k against subset enumeration.
Outcome pass_at_k_exhaustive() {
  double worst = 0;
  for (std::size_t n = 1; n <= 12; ++n)
    for (std::size_t c = 0; c <= n; ++c)
      for (std::size_t k = 1; k <= n; ++k) {
        // Samples 0..c-1 are correct.
        std::size_t subsets = 0, hits = 0;
        for (std::uint32_t m = 0; m < (1u << n); ++m) {
          if (static_cast<std::size_t>(std::popcount(m)) != k) continue;
          ++subsets;
          if ((m & ((1u << c) - 1)) != 0) ++hits;
        }
        const double want = double(hits) / double(subsets);
        worst = std::max(worst, std::abs(metrics::pass_at_k(n, c, k) - want));
      }
  const double known = metrics::pass_at_k(5, 2, 3);
  return {worst <= 1e-12 && std::abs(known - 0.9) <= 1e-12,
          fmt("max |error| %.3g over n <= 12 (limit 1e-12); pass@3(5,2) = %.15f", worst, known)};
}

std::size_t dp_levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return d[a.size()][b.size()];
}

// Longest common subsequence by trying every subsequence of `g`.
std::size_t lcs_by_enumeration(const std::vector<std::string>& g, const std::vector<std::string>& r) {
  std::size_t best = 0;
  for (std::uint32_t m = 0; m < (1u << g.size()); ++m) {
    std::size_t j = 0, len = 0;
    bool fits = true;
    for (std::size_t i = 0; i < g.size() && fits; ++i) {
      if (!(m >> i & 1)) continue;
      while (j < r.size() && r[j] != g[i]) ++j;
      if (j == r.size()) fits = false;
      else { ++j; ++len; }
    }
    if (fits) best = std::max(best, len);
  }
  return best;
}

// 7. Metric oracles.
Outcome metric_oracles() {
  Rng rng(707);
  std::size_t es_bad = 0, rouge_bad = 0, rouge_pairs = 0;
  const std::string alphabet = "abc d";
  for (int i = 0; i < 1000; ++i) {
    std::string a, b;
    for (std::size_t n = below(rng, 16); n > 0; --n) a += alphabet[below(rng, alphabet.size())];
    for (std::size_t n = below(rng, 16); n > 0; --n) b += alphabet[below(rng, alphabet.size())];
    const std::size_t longest = std::max(a.size(), b.size());
    const double want = longest == 0 ? 1.0 : 1.0 - double(dp_levenshtein(a, b)) / double(longest);
    if (metrics::edit_similarity(a, b) != want) ++es_bad;
  }
  const std::vector<std::string> words{"x", "y", "z", "w", "x,"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> g, r;
    for (std::size_t n = below(rng, 9); n > 0; --n) g.push_back(words[below(rng, words.size())]);
    for (std::size_t n = below(rng, 9); n > 0; --n) r.push_back(words[below(rng, words.size())]);
    std::string gs, rs;
    for (const auto& w : g) gs += w + (below(rng, 2) ? " " : "\n ");
    for (const auto& w : r) rs += "  " + w;
    double want = 0;
    const std::size_t lcs = g.empty() || r.empty() ? 0 : lcs_by_enumeration(g, r);
    if (lcs > 0) {
      const double p = double(lcs) / double(g.size());
      const double rec = double(lcs) / double(r.size());
      want = 2.0 * p * rec / (p + rec);
    }
    if (metrics::rouge_l(gs, rs) != want) ++rouge_bad;
    ++rouge_pairs;
  }
  return {es_bad == 0 && rouge_bad == 0,
          std::to_string(es_bad) + "/1000 edit-similarity and " + std::to_string(rouge_bad) + "/" +
              std::to_string(rouge_pairs) + " rouge-l mismatches"};
}

// 8. Cache capacity does not change outputs.
Outcome cache_transparency() {
  const auto& w = workload();
  const auto& reference = default_run();
  std::string d;
  bool ok = true;
  for (std::size_t cap : {std::size_t{0}, std::size_t{1}}) {
    const auto r = run_workload(w, cap);
    const bool same = r.outputs == reference.outputs;
    ok = ok && same;
    d += "capacity " + std::to_string(cap) + (same ? " identical" : " differs") + "; ";
  }
  return {ok, d + "compared with capacity 1024 over " + std::to_string(reference.outputs.size()) + " runs"};
}

// 9. Latency.
Outcome latency() {
  const auto vocab = synthetic_vocabulary(50000, 0);
  LookupBenchOptions opts;
  opts.queries = 10000;
  opts.warmup = 1000;
  const auto b = bench_lookup(vocab, opts);
  const bool below_naive = b.trie.p50 < b.naive.p50;
  const bool cached = b.cached_space.p50 <= b.trie.p50;
  const bool under_ms = b.trie.p50 < 1000.0;
  const bool slow_ci = std::getenv("TOKALIGN_SLOW_CI") != nullptr;
  std::string d = fmt("median trie %.2f us, naive %.2f us, cached space %.3f us", b.trie.p50, b.naive.p50,
                      b.cached_space.p50) +
                  fmt(", trie space %.2f us", b.trie_space.p50);
  if (!under_ms) d += slow_ci ? "; over 1 ms (reported only, TOKALIGN_SLOW_CI set)" : "; over 1 ms";
  return {below_naive && cached && (under_ms || slow_ci), d};
}

// 10. Seeded pipelines repeat bit for bit.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "tokalign_acceptance";
  fs::remove_all(root);
  const std::string corpus = (kData / "corpus" / "python_functions.jsonl").string();
  std::vector<std::string> seen;
  std::string failure;
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = root / std::to_string(pass);
    fs::create_directories(dir);
    const std::string vocab = (dir / "vocab.json").string();
    const std::string data = (dir / "data").string();
    std::string all;
    const auto step = [&](const std::vector<std::string>& args) {
      const auto r = cli_run(args);
      if (r.code != 0 && failure.empty()) failure = args[0] + " exited " + std::to_string(r.code) + ": " + r.err;
      all += r.out + '\x1f';
    };
    step({"--seed", "9", "vocab", "train", "--corpus", corpus, "--size", "500", "-o", vocab});
    all += io::read_file(vocab) + '\x1f';
    step({"--seed", "9", "gen-dataset", "--corpus", corpus, "--scenario", "all", "--per-doc", "2", "--out-dir", data});
    for (Scenario s : kAllScenarios) all += io::read_file(fs::path(data) / (std::string(to_string(s)) + ".jsonl"));
    const std::vector<std::string> shared{"--seed", "9", "--vocab", vocab, "--provider", "ngram:" + corpus,
                                          "--sampler", "nucleus", "--top-p", "0.9", "--max-new-tokens", "8"};
    auto align = shared;
    for (const char* a : {"align", "--prompt", "def add(a, b):\n    ret", "--prompt", "for i in ra"}) align.push_back(a);
    step(align);
    auto eval = shared;
    for (const std::string& a : {std::string("eval"), std::string("--dataset"), data + "/subword.jsonl",
                                 std::string("--dataset"), data + "/prefix_sep.jsonl"})
      eval.push_back(a);
    step(eval);
    seen.push_back(all);
  }
  fs::remove_all(root);
  if (!failure.empty()) return {false, failure};
  return {seen[0] == seen[1], "vocab train, gen-dataset, align (nucleus) and eval over two runs: " +
                                  std::string(seen[0] == seen[1] ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 trie oracle equivalence", trie_oracle},
      {"2 prompt preservation", prompt_preservation},
      {"3 termination bound", termination_bound},
      {"4 fig2 fixture", fig2},
      {"5 directional improvement", directional},
      {"6 pass@k estimator", pass_at_k_exhaustive},
      {"7 metric oracles", metric_oracles},
      {"8 mask-cache transparency", cache_transparency},
      {"9 latency", latency},
      {"10 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
