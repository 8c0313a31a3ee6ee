#include <gtest/gtest.h>

#include <set>

#include "aeroqa/embeddings.hpp"
#include "aeroqa/error.hpp"
#include "aeroqa/metrics.hpp"
#include "aeroqa/text.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace aeroqa::metrics {
namespace {

using Strings = std::vector<std::string>;

const embed::HashedNgramProvider kProvider;

Strings numbered(const std::string& tag, std::size_t n) {
  Strings out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(tag + std::to_string(i));
  return out;
}

struct ExactCase {
  Strings preds;
  Strings gold;
  int em;
  double er;
};

std::vector<ExactCase> exact_table() {
  Strings fifteen = numbered("g", 15);
  Strings seven_hits(fifteen.begin(), fifteen.begin() + 7);
  return {
      {{"Directional control"}, {"Directional control", "Crosswind"}, 1, 0.5},
      {{"directional control"}, {"Directional control"}, 0, 0.0},
      {{}, {"a"}, 0, 0.0},
      {{"b", "a"}, {"a", "b", "c", "d"}, 1, 0.5},
      {{"x", "a", "b"}, {"a", "b", "c", "d"}, 0, 0.5},
      {seven_hits, fifteen, 1, 0.7},
      {numbered("g", 10), fifteen, 1, 1.0},
      {{"p", "q"}, {"a", "b"}, 0, 0.0},
      {{"  a  "}, {"a "}, 1, 1.0},
      {{"a", "a"}, {"a", "a", "b"}, 1, 0.5},
      {{"a"}, {"a"}, 1, 1.0},
      {{"z", "y", "x", "w", "v", "u", "t", "s", "r", "q", "a"}, {"a"}, 0, 0.0},
      {{"b"}, {"b", "a"}, 1, 0.5},
  };
}

TEST(Exact, TruthTable) {
  const auto table = exact_table();
  ASSERT_GE(table.size(), 12u);
  for (const auto& c : table) {
    EXPECT_EQ(exact_match(c.preds, c.gold), c.em);
    EXPECT_NEAR(exact_recall(c.preds, c.gold), c.er, 1e-12);
  }
  EXPECT_THROW(exact_match(Strings{"a"}, Strings{}), ValidationError);
  EXPECT_THROW(exact_recall(Strings{"a"}, Strings{}), ValidationError);
}

TEST(Exact, GoldOrderInvariantAndEmImpliesRecall) {
  testing::Rng rng(19);
  for (int i = 0; i < 300; ++i) {
    Strings preds, gold;
    for (std::size_t k = 0; k < rng() % 12; ++k) preds.push_back(testing::random_sentence(rng, 1));
    for (std::size_t k = 0; k < 1 + rng() % 14; ++k) gold.push_back(testing::random_sentence(rng, 1));
    const auto er = exact_recall(preds, gold);
    const auto em = exact_match(preds, gold);
    std::set<std::string> distinct(gold.begin(), gold.end());
    if (em == 1) {
      EXPECT_GE(er, 1.0 / static_cast<double>(std::min<std::size_t>(distinct.size(), 10)) - 1e-12);
    }
    std::shuffle(gold.begin(), gold.end(), rng);
    EXPECT_EQ(exact_recall(preds, gold), er);
    EXPECT_EQ(exact_match(preds, gold), em);
    EXPECT_GE(er, 0.0);
    EXPECT_LE(er, 1.0);
  }
}

TEST(Ratio, Values) {
  EXPECT_NEAR(accuracy_ratio(83, 120), 0.6917, 0.0005);
  EXPECT_EQ(accuracy_ratio(0, 7), 0.0);
  EXPECT_EQ(accuracy_ratio(7, 7), 1.0);
  EXPECT_THROW(accuracy_ratio(1, 0), ValidationError);
  EXPECT_THROW(accuracy_ratio(3, 2), ValidationError);
}

// Brute-force: cosine of every (prediction, gold) pair under the hashed
// provider, first 10 predictions only.
std::pair<int, double> semantic_oracle(const Strings& preds, const Strings& gold, double tau) {
  std::set<std::string> distinct;
  for (const auto& g : gold) distinct.insert(text::trim(g));
  const auto n = std::min<std::size_t>(preds.size(), 10);
  std::size_t hit = 0;
  for (const auto& g : distinct) {
    for (std::size_t i = 0; i < n; ++i) {
      if (embed::cosine(embed::embed_hashed(text::trim(preds[i])), embed::embed_hashed(g)) >= tau) {
        ++hit;
        break;
      }
    }
  }
  const double denom = static_cast<double>(std::min<std::size_t>(distinct.size(), 10));
  return {hit > 0 ? 1 : 0, std::min<double>(static_cast<double>(hit), denom) / denom};
}

TEST(Semantic, Fixtures) {
  EXPECT_EQ(semantic_accuracy(Strings{"problem with fuel gauge"}, Strings{"problem with fuel gauge"}, kProvider, 1.0), 1);
  EXPECT_EQ(semantic_accuracy(Strings{}, Strings{"x"}, kProvider), 0);
  EXPECT_EQ(semantic_recall(Strings{}, Strings{"x"}, kProvider), 0.0);
  EXPECT_EQ(semantic_accuracy(Strings{"problem with the fuel gauge"}, Strings{"problem with fuel gauge"}, kProvider), 1);
  EXPECT_EQ(semantic_accuracy(Strings{"carburetor icing"}, Strings{"problem with fuel gauge"}, kProvider), 0);
  EXPECT_EQ(semantic_recall(Strings{"Crosswind", "Directional control"}, Strings{"Directional control", "Crosswind"}, kProvider), 1.0);
  EXPECT_THROW(semantic_accuracy(Strings{"a"}, Strings{"a"}, kProvider, 0.0), ValidationError);
  EXPECT_THROW(semantic_recall(Strings{"a"}, Strings{"a"}, kProvider, 1.5), ValidationError);
}

TEST(Semantic, MatchesBruteForceTable) {
  testing::Rng rng(29);
  for (int i = 0; i < 200; ++i) {
    Strings preds, gold;
    for (std::size_t k = 0; k < rng() % 13; ++k) preds.push_back(testing::random_sentence(rng, 1 + rng() % 3));
    for (std::size_t k = 0; k < 1 + rng() % 12; ++k) gold.push_back(testing::random_sentence(rng, 1 + rng() % 3));
    for (double tau : {0.5, 0.8, 1.0}) {
      const auto [sa, sr] = semantic_oracle(preds, gold, tau);
      EXPECT_EQ(semantic_accuracy(preds, gold, kProvider, tau), sa);
      EXPECT_NEAR(semantic_recall(preds, gold, kProvider, tau), sr, 1e-12);
      // Exact hits anywhere in the top 10 are semantic hits.
      const bool exact_anywhere = std::any_of(preds.begin(), preds.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(preds.size(), 10)),
                                              [&](const std::string& p) { return std::find(gold.begin(), gold.end(), p) != gold.end(); });
      if (exact_anywhere) { EXPECT_EQ(sa, 1); }
    }
  }
}

TEST(Testset, ParseAndErrors) {
  const auto ts = parse_testset(
      R"([{"query": "q", "answers": ["a"], "passages": [{"text": "t", "accident_number": "A1"}]}])");
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].passages[0].accident_number, "A1");
  EXPECT_THROW(parse_testset("[]"), ValidationError);
  try {
    parse_testset(R"([{"query": "q", "answers": ["a"], "passages": []}, {"query": "q"}])");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("instance 1"), std::string::npos);
  }
  EXPECT_THROW(parse_testset(R"([{"query": "q", "answers": [], "passages": []}])"), ParseError);
}

fusion::SystemResponse kg_response(const Strings& answers) {
  fusion::SystemResponse r;
  for (const auto& a : answers) r.items.push_back({a, fusion::Source::Kg, std::nullopt, 1.0});
  return r;
}

TEST(Evaluate, PerfectAbstainAndFailure) {
  const std::vector<TestInstance> one{{"q", {"Directional control"}, {{"Directional control", "A1"}}}};
  const auto perfect = evaluate("perfect", [](const std::string&) { return kg_response({"Directional control"}); }, one, kProvider);
  EXPECT_EQ(perfect.mean.exact_match, 1.0);
  EXPECT_EQ(perfect.mean.exact_recall, 1.0);
  EXPECT_EQ(perfect.mean.semantic_accuracy, 1.0);
  EXPECT_EQ(perfect.mean.semantic_recall, 1.0);
  EXPECT_EQ(perfect.mean.passage_semantic_accuracy, 1.0);

  const std::vector<TestInstance> three(3, one[0]);
  const auto silent = evaluate("silent", [](const std::string&) { return fusion::SystemResponse{}; }, three, kProvider);
  EXPECT_EQ(silent.abstentions, 3u);
  EXPECT_EQ(silent.mean.semantic_recall, 0.0);

  int calls = 0;
  const auto flaky = evaluate("flaky", [&](const std::string&) {
    if (calls++ == 1) throw std::runtime_error("boom");
    return kg_response({"Directional control"});
  }, three, kProvider);
  EXPECT_EQ(flaky.failures, 1u);
  EXPECT_TRUE(flaky.instances[1].failed);
  EXPECT_EQ(flaky.instances[1].scores.exact_match, 0.0);
  EXPECT_NEAR(flaky.mean.exact_match, 2.0 / 3.0, 1e-12);
  EXPECT_THROW(evaluate("x", [](const std::string&) { return fusion::SystemResponse{}; }, {}, kProvider),
               ValidationError);
}

TEST(Evaluate, MeansAreInstanceMeansAndJsonParses) {
  const std::vector<TestInstance> ts{{"a", {"x"}, {{"x", "A"}}}, {"b", {"y", "z"}, {{"y", "B"}}}};
  const auto r = evaluate("s", [](const std::string& q) { return kg_response(q == "a" ? Strings{"x"} : Strings{"z"}); }, ts, kProvider);
  EXPECT_NEAR(r.mean.exact_recall, (r.instances[0].scores.exact_recall + r.instances[1].scores.exact_recall) / 2, 1e-12);
  EXPECT_NEAR(r.mean.exact_recall, 0.75, 1e-12);
  const auto doc = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(doc["system"], "s");
  const std::vector<EvalReport> both{r, r};
  const auto table = format_table(both);
  EXPECT_NE(table.find("Model"), std::string::npos);
  EXPECT_NE(table.find("0.750"), std::string::npos);
}

}  // namespace
}  // namespace aeroqa::metrics
