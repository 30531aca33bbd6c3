#include <doctest.h>

#include <set>

#include "support.hpp"
#include "tokalign/errors.hpp"
#include "tokalign/io.hpp"
#include "tokalign/scenarios.hpp"

using namespace tokalign;

namespace {

std::vector<Document> corpus(const char* name) {
  return io::load_corpus(test::data_dir() / "corpus" / name);
}

ScenarioExample cut_at(ByteView src, Scenario s, ByteView prompt_end) {
  const auto pos = src.find(prompt_end);
  REQUIRE(pos != ByteView::npos);
  return make_example(src, s, pos + prompt_end.size());
}

}  // namespace

TEST_CASE("subword cut and its baseline") {
  const Bytes src = "    for i in range(10):\n";
  const auto ex = cut_at(src, Scenario::subword, "for i in rang");
  CHECK(ex.prompt == "    for i in rang");
  CHECK(ex.baseline_prompt == "    for i in");
  CHECK(ex.ground_truth == "e(10):\n");
  CHECK(validate_example(ex, src).empty());

  const auto ab = make_example("ab", Scenario::subword, 1);
  CHECK(ab.prompt == "a");
  CHECK(ab.baseline_prompt.empty());
  CHECK(eligible_cuts("ab", Scenario::subword) == std::vector<std::size_t>{1});
}

TEST_CASE("punctuation cuts") {
  const Bytes braces = "x = {};";
  std::set<Bytes> prompts;
  for (auto cut : eligible_cuts(braces, Scenario::punctuation))
    prompts.insert(make_example(braces, Scenario::punctuation, cut).prompt);
  CHECK(prompts == std::set<Bytes>{"x = {", "x = {}"});

  const Bytes src = "if x==1:";
  const auto ex = cut_at(src, Scenario::punctuation, "if x=");
  CHECK(ex.prompt == "if x=");
  CHECK(ex.baseline_prompt == "if x");
  Rng rng(0);
  CHECK_THROWS_AS(cut_punctuation("no adjacent marks here.", rng), NoCutPoint);
}

TEST_CASE("punctuation baseline does not split an identifier") {
  const Bytes src = "    def __init__(self):\n";
  const auto ex = cut_at(src, Scenario::punctuation, "def __init_");
  CHECK(ex.baseline_prompt == "    def");
  CHECK(validate_example(ex, src).empty());
}

TEST_CASE("space-prefix separator cuts") {
  const Bytes src = "def f():\n    return value\n";
  const auto ex = cut_at(src, Scenario::prefix_sep, "return ");
  CHECK(ex.prompt == "def f():\n    return ");
  CHECK(ex.baseline_prompt == "def f():\n    return");
  CHECK(make_example("a b", Scenario::prefix_sep, 2).prompt == "a ");
  for (auto cut : eligible_cuts(src, Scenario::prefix_sep)) {
    const auto e = make_example(src, Scenario::prefix_sep, cut);
    const auto line = e.prompt.substr(e.prompt.rfind('\n') + 1);
    CHECK(line.find_first_not_of(' ') != Bytes::npos);
  }
}

TEST_CASE("indentation cuts") {
  const Bytes src = "if x:\n    return value\n";
  const auto cuts = eligible_cuts(src, Scenario::prefix_indent);
  REQUIRE(cuts.size() == 1);
  const auto ex = make_example(src, Scenario::prefix_indent, cuts[0]);
  CHECK(ex.prompt == "if x:\n    ");
  CHECK(ex.baseline_prompt == "if x:");
  const auto tab = make_example("if x:\n\treturn\n", Scenario::prefix_indent, 7);
  CHECK(tab.prompt == "if x:\n\t");
}

TEST_CASE("contiguous whitespace cuts") {
  const Bytes src = "  if True:\n    pass\n";
  const auto ex = cut_at(src, Scenario::contiguous_space, "True:\n  ");
  CHECK(ex.ground_truth.substr(0, 2) == "  ");
  CHECK(validate_example(ex, src).empty());
  const auto nl = make_example("a\n\nb", Scenario::contiguous_space, 2);
  CHECK(nl.prompt == "a\n");
  CHECK(nl.baseline_prompt == "a");
}

TEST_CASE("ineligible cut is a contract violation") {
  CHECK_THROWS_AS(make_example("abc def", Scenario::subword, 3), ContractViolation);
}

TEST_CASE("validators catch broken examples") {
  const Bytes src = "for i in range";
  auto ex = cut_at(src, Scenario::subword, "for i in ra");
  CHECK(validate_example(ex, src).empty());
  auto broken = ex;
  broken.ground_truth += "x";
  CHECK_FALSE(validate_example(broken, src).empty());
  broken = ex;
  broken.baseline_prompt = "for i in r";
  CHECK_FALSE(validate_example(broken).empty());
  broken = ex;
  broken.baseline_prompt = "for i in ";
  CHECK_FALSE(validate_example(broken).empty());
}

TEST_CASE("random cuts over the code corpora all validate") {
  for (const char* name : {"python_functions.jsonl", "code_multilang.jsonl", "synthetic_code.jsonl"}) {
    const auto docs = corpus(name);
    for (Scenario s : kAllScenarios) {
      Rng rng(static_cast<std::uint64_t>(s) + 17);
      std::size_t made = 0;
      for (int i = 0; i < 1000; ++i) {
        const auto& doc = docs[test::below(rng, docs.size())];
        if (eligible_cuts(doc.text, s).empty()) continue;
        const auto ex = cut_scenario(doc.text, s, rng, doc.id);
        REQUIRE_MESSAGE(validate_example(ex, doc.text).empty(), ex.id, " in ", doc.id);
        ++made;
      }
      CHECK(made > 0);
    }
  }
}

TEST_CASE("subword dataset on the 50-function corpus") {
  const auto docs = corpus("python_functions.jsonl");
  REQUIRE(docs.size() == 50);
  const auto ds = generate_dataset(docs, Scenario::subword, 0);
  CHECK(ds.examples.size() == 50);
  CHECK(ds.stats.emitted == 50);
  CHECK(ds.stats.skipped == 0);
  for (const auto& ex : ds.examples) CHECK(validate_example(ex).empty());
  CHECK(ds.examples[0].id == "subword/py000/0");
}

TEST_CASE("datasets are deterministic under a seed") {
  const auto docs = corpus("code_multilang.jsonl");
  for (Scenario s : kAllScenarios) {
    const auto a = generate_dataset(docs, s, 7, 2);
    const auto b = generate_dataset(docs, s, 7, 2);
    CHECK(io::to_jsonl(a.examples) == io::to_jsonl(b.examples));
    const auto c = generate_dataset(docs, s, 8, 2);
    CHECK(io::to_jsonl(a.examples) != io::to_jsonl(c.examples));
  }
}

TEST_CASE("per_doc picks distinct cuts") {
  const std::vector<Document> docs{{"d", "alpha beta gamma delta"}};
  const auto ds = generate_dataset(docs, Scenario::subword, 3, 5);
  std::set<std::size_t> offsets;
  for (const auto& ex : ds.examples) offsets.insert(ex.cut_offset);
  CHECK(offsets.size() == 5);
  const auto all = generate_dataset(docs, Scenario::subword, 3, 100);
  CHECK(all.examples.size() == eligible_cuts(docs[0].text, Scenario::subword).size());
}

TEST_CASE("prose has no punctuation runs") {
  CHECK_THROWS_WITH_AS(generate_dataset(corpus("prose.jsonl"), Scenario::punctuation, 0),
                       doctest::Contains("0 eligible documents"), NoCutPoint);
}

TEST_CASE("examples survive the JSONL round trip") {
  const Bytes src = Bytes("caf\xC3\xA9 au lait\xFF\xFE", 15);
  const auto ex = make_example(src, Scenario::subword, 2, "bin");
  const auto back = io::example_from_json(io::to_json(ex), "test");
  CHECK(back == ex);
}

TEST_CASE("scenario names") {
  for (Scenario s : kAllScenarios) CHECK(parse_scenario(to_string(s)) == s);
  CHECK_FALSE(parse_scenario("nope").has_value());
}
