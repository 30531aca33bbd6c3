#include <doctest.h>

#include <json.hpp>

#include "support.hpp"
#include "tokalign/errors.hpp"
#include "tokalign/io.hpp"
#include "tokalign/provider.hpp"

using namespace tokalign;

TEST_CASE("bigram counts on ababab") {
  const auto v = test::vocab_of({"a", "b"});
  const std::vector<Bytes> corpus{"ababab"};
  const auto m = build_ngram_model(corpus, v, 1, 0.0);
  const std::vector<TokenId> after_a{0}, after_b{1};
  CHECK(m.next_distribution(after_a) == std::vector<double>{0.0, 1.0});
  CHECK(m.next_distribution(after_b) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("unseen context backs off to uniform") {
  const auto v = test::vocab_of({"a", "b", "c"});
  const std::vector<Bytes> corpus{"ababab"};
  const auto m = build_ngram_model(corpus, v, 1, 0.0);
  const std::vector<TokenId> ctx{2};
  for (double p : m.next_distribution(ctx)) CHECK(p == doctest::Approx(1.0 / 3));
}

TEST_CASE("large alpha approaches uniform") {
  const auto v = test::vocab_of({"a", "b"});
  const std::vector<Bytes> corpus{"ababab"};
  const auto m = build_ngram_model(corpus, v, 1, 1e9);
  const std::vector<TokenId> ctx{0};
  const auto d = m.next_distribution(ctx);
  CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("document start uses the shorter context") {
  const auto v = test::vocab_of({"a", "b", "c"});
  const std::vector<Bytes> corpus{"abc", "acb"};
  const auto m = build_ngram_model(corpus, v, 2, 0.0);
  const auto first = m.next_distribution(std::vector<TokenId>{});
  CHECK(first == std::vector<double>{1.0, 0.0, 0.0});
  const auto after_ab = m.next_distribution(std::vector<TokenId>{0, 1});
  CHECK(after_ab == std::vector<double>{0.0, 0.0, 1.0});
  // Only the last `order` tokens matter.
  CHECK(m.next_distribution(std::vector<TokenId>{2, 2, 0, 1}) == after_ab);
}

TEST_CASE("n-gram errors") {
  const auto v = test::vocab_of({"a"});
  CHECK_THROWS_AS(build_ngram_model(std::vector<Bytes>{}, v, 1, 0.1), ValidationError);
  CHECK_THROWS_AS(build_ngram_model(std::vector<Bytes>{"a"}, v, 0, 0.1), ValidationError);
}

TEST_CASE("distribution contract") {
  CHECK_NOTHROW(check_distribution(std::vector<double>{0.5, 0.5}, 2));
  CHECK_THROWS_AS(check_distribution(std::vector<double>{0.5, 0.4}, 2), ContractViolation);
  CHECK_THROWS_AS(check_distribution(std::vector<double>{1.0}, 2), ContractViolation);
  CHECK_THROWS_AS(check_distribution(std::vector<double>{1.5, -0.5}, 2), ContractViolation);
}

TEST_CASE("scripted model: default row and longest suffix") {
  const auto v = test::vocab_of({"a", "b", "c"});
  const ScriptedModel flat(v, {}, test::uniform(3));
  CHECK(flat.next_distribution(std::vector<TokenId>{0, 1}) == test::uniform(3));

  const ScriptedModel m(v,
                        {{"b", {1.0, 0.0, 0.0}}, {"ab", {0.0, 1.0, 0.0}}},
                        std::vector<double>{0.0, 0.0, 1.0});
  CHECK(m.next_distribution(std::vector<TokenId>{0, 1}) == std::vector<double>{0, 1, 0});
  CHECK(m.next_distribution(std::vector<TokenId>{1, 1}) == std::vector<double>{1, 0, 0});
  CHECK(m.next_distribution(std::vector<TokenId>{2}) == std::vector<double>{0, 0, 1});
}

TEST_CASE("scripted model validation") {
  const auto v = test::vocab_of({"a", "b"});
  CHECK_THROWS_AS(ScriptedModel(v, {}, std::nullopt), ValidationError);
  CHECK_THROWS_AS(ScriptedModel(v, {{"a", {0.5, 0.5}}, {"a", {1.0, 0.0}}}, test::uniform(2)),
                  ValidationError);
  CHECK_THROWS_AS(ScriptedModel(v, {{"a", {0.5}}}, test::uniform(2)), ValidationError);
  CHECK_THROWS_AS(parse_scripted_model(R"({"rows": []})", v), ValidationError);
  CHECK_THROWS_AS(parse_scripted_model(R"({"rows": [{"suffix_b64": "%%", "probs": [1, 0]}],
                                           "default": [1, 0]})", v),
                  FormatError);
}

TEST_CASE("bundled three-maximum table loads") {
  const auto v = load_vocabulary(test::data_dir() / "fig2" / "vocab.json");
  const auto m = load_scripted_model(test::data_dir() / "fig2" / "table.json", v);
  CHECK(m.vocab_size() == v.size());
  CHECK(m.rows().size() == 12);
  const auto ctx = v.encode("def three_max(l):\n    re");
  const auto d = m.next_distribution(ctx);
  const auto best = std::max_element(d.begin(), d.end()) - d.begin();
  CHECK(v.bytes(static_cast<TokenId>(best)) == " =");
}
