#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "tokalign/bytes.hpp"
#include "tokalign/cli.hpp"
#include "tokalign/io.hpp"

using namespace tokalign;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string fig2(const char* name) { return (test::data_dir() / "fig2" / name).string(); }
std::string corpus(const char* name) { return (test::data_dir() / "corpus" / name).string(); }

std::vector<std::string> fig2_args(std::vector<std::string> extra) {
  std::vector<std::string> args{"--vocab", fig2("vocab.json"), "--provider",
                                "scripted:" + fig2("table.json"), "align", "--prompt-file",
                                fig2("prompts.jsonl")};
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

Bytes output_of(const std::string& jsonl_line) {
  return base64_decode(json::parse(jsonl_line).at("output_b64").get<std::string>()).value();
}

std::string slurp(const std::filesystem::path& p) { return io::read_file(p); }

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"align", "--prompt", "x"}).code == cli::kUsage);
  CHECK(run(fig2_args({"--backtrack", "0"})).code == cli::kUsage);
  CHECK(run({"eval"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("missing or malformed files exit 2") {
  CHECK(run({"--vocab", "/nonexistent/vocab.json", "vocab", "inspect"}).code == cli::kDataError);
  test::TempDir dir("cli_bad");
  io::write_file(dir / "v.json", "{\"tokens\": [");
  const auto r = run({"--vocab", (dir / "v.json").string(), "vocab", "inspect"});
  CHECK(r.code == cli::kDataError);
  CHECK(!r.err.empty());
}

TEST_CASE("the three_max completion") {
  const auto aligned = run(fig2_args({}));
  REQUIRE(aligned.code == cli::kOk);
  const auto rec = json::parse(aligned.out.substr(0, aligned.out.find('\n')));
  CHECK(rec.at("id") == "three_max");
  CHECK(rec.at("alignment_steps") == 3);
  const Bytes prompt = "# write a function to get three maximum numbers from a list\n"
                       "def three_max(l):\n    re";
  CHECK(output_of(aligned.out) == prompt + "turn sorted(l)[-3:]\n");

  const auto plain = run(fig2_args({"--no-align"}));
  REQUIRE(plain.code == cli::kOk);
  CHECK(output_of(plain.out) == prompt + " = []\n");
  CHECK_FALSE(json::parse(plain.out).contains("timings_us"));
  CHECK(json::parse(run(fig2_args({"--timings"})).out).contains("timings_us"));
}

TEST_CASE("a dead end exits 3") {
  test::TempDir dir("cli_dead");
  io::write_file(dir / "v.json", R"({"version": 1, "tokens": {"a": 0, "ab": 1, "c": 2}})");
  // Greedy takes "a", after which nothing starts with "bc".
  io::write_file(dir / "t.json", R"({"rows": [], "default": [0.6, 0.2, 0.2]})");
  io::write_file(dir / "ok.json", R"({"rows": [], "default": [0.2, 0.6, 0.2]})");
  const auto args = [&](const char* table) {
    return std::vector<std::string>{"--vocab", (dir / "v.json").string(), "--provider",
                                    "scripted:" + (dir / table).string(), "--max-new-tokens",
                                    "1", "align", "--prompt", "abc"};
  };
  const auto r = run(args("t.json"));
  CHECK(r.code == cli::kDeadEnd);
  CHECK(!r.err.empty());
  CHECK(run(args("ok.json")).code == cli::kOk);
}

TEST_CASE("backtrack depth changes the split but keeps the prompt") {
  const Bytes prompt = "# write a function to get three maximum numbers from a list\n"
                       "def three_max(l):\n    re";
  for (const char* b : {"1", "2", "3"}) {
    const auto r = run(fig2_args({"--backtrack", b}));
    REQUIRE(r.code == cli::kOk);
    CHECK(output_of(r.out).substr(0, prompt.size()) == prompt);
    CHECK(json::parse(r.out).at("alignment_steps").get<int>() <= 3);
  }
}

TEST_CASE("flat JSON config sets shared options") {
  test::TempDir dir("cli_cfg");
  json cfg{{"vocab", fig2("vocab.json")},
           {"provider", "scripted:" + fig2("table.json")},
           {"max-new-tokens", 2}};
  io::write_file(dir / "cfg.json", cfg.dump());
  const auto r = run({"--config", (dir / "cfg.json").string(), "align", "--prompt-file",
                      fig2("prompts.jsonl")});
  REQUIRE(r.code == cli::kOk);
  const auto rec = json::parse(r.out);
  CHECK(rec.at("token_ids").size() == 3 + 2);
}

TEST_CASE("gen-dataset, validate and eval") {
  test::TempDir dir("cli_eval");
  const auto out1 = dir / "a";
  const auto out2 = dir / "b";
  for (const auto& out : {out1, out2}) {
    const auto r = run({"--seed", "5", "gen-dataset", "--corpus", corpus("python_functions.jsonl"),
                        "--scenario", "all", "--out-dir", out.string()});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  }
  for (const char* f : {"subword.jsonl", "punctuation.jsonl", "prefix_sep.jsonl",
                        "prefix_indent.jsonl", "contiguous_space.jsonl", "stats.json"})
    CHECK(slurp(out1 / f) == slurp(out2 / f));

  const auto ds = (out1 / "subword.jsonl").string();
  CHECK(run({"eval", "--dataset", ds, "--validate-only"}).code == cli::kOk);

  io::write_file(dir / "vocab.json", "");
  const auto train = run({"vocab", "train", "--corpus", corpus("python_functions.jsonl"), "--size",
                          "400", "-o", (dir / "vocab.json").string()});
  REQUIRE_MESSAGE(train.code == cli::kOk, train.err);
  const std::vector<std::string> shared{"--vocab", (dir / "vocab.json").string(), "--provider",
                                        "ngram:" + corpus("python_functions.jsonl"),
                                        "--max-new-tokens", "8"};
  auto args = shared;
  for (const char* a : {"eval", "--dataset", ds.c_str(), "--metrics", "em,es"}) args.push_back(a);
  const auto r = run(args);
  REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  const auto report = json::parse(r.out);
  const auto& row = report.at("rows").at(0);
  CHECK(row.at("dataset") == "subword");
  const auto& aligned = row.at("aligned");
  CHECK(aligned.contains("em"));
  CHECK(aligned.contains("es"));
  CHECK_FALSE(aligned.contains("fta"));
  CHECK(run(args).out == r.out);

  args = shared;
  for (const char* a : {"eval", "--dataset", ds.c_str(), "--arm", "aligned", "--format", "csv",
                        "--no-baseline"})
    args.push_back(a);
  const auto csv = run(args);
  REQUIRE(csv.code == cli::kOk);
  CHECK(csv.out.find("unaligned") == std::string::npos);
  CHECK(csv.out.find("baseline") == std::string::npos);

  io::write_file(dir / "broken.jsonl", "{\"id\": 1}\n");
  CHECK(run({"eval", "--dataset", (dir / "broken.jsonl").string(), "--validate-only"}).code ==
        cli::kDataError);
}

TEST_CASE("vocab train is deterministic") {
  test::TempDir dir("cli_train");
  for (const char* name : {"v1.json", "v2.json"}) {
    const auto r = run({"vocab", "train", "--corpus", corpus("prose.jsonl"), "--size", "300", "-o",
                        (dir / name).string()});
    REQUIRE(r.code == cli::kOk);
  }
  CHECK(slurp(dir / "v1.json") == slurp(dir / "v2.json"));
  const auto inspect = run({"--vocab", (dir / "v1.json").string(), "vocab", "inspect", "--encode",
                            "the cat"});
  CHECK(inspect.code == cli::kOk);
  CHECK(!inspect.out.empty());
}

TEST_CASE("small bench") {
  const auto r = run({"bench", "--vocab-size", "1000", "--queries", "100", "--warmup", "10"});
  REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  const auto j = json::parse(r.out);
  CHECK(j.contains("lookup"));
  CHECK(j.contains("checks"));
}
