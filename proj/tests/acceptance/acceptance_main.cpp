// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aeroqa/embeddings.hpp"
#include "aeroqa/fusion.hpp"
#include "aeroqa/metrics.hpp"
#include "aeroqa/nl2sparql.hpp"
#include "aeroqa/ontology.hpp"
#include "aeroqa/retrieval.hpp"
#include "aeroqa/sparql.hpp"
#include "aeroqa/text.hpp"
#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace {

using namespace aeroqa;
using Clock = std::chrono::steady_clock;
using Strings = std::vector<std::string>;

// Pinned tolerances.
constexpr double kBm25Tol = 1e-6;
constexpr double kTermTol = 1e-9;
constexpr double kRatioTol = 0.0005;
constexpr double kSparqlBudgetSec = 10.0;
constexpr double kEndToEndBudgetSec = 60.0;
constexpr double kTau = 0.8;

// Collects the first few failures of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (ok) return;
    if (failures_.size() < 5) failures_.push_back(what);
    ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    s << (total_ - failed_) << "/" << total_ << " checks";
    for (const auto& f : failures_) s << "; " << f;
    return s.str();
  }

 private:
  std::size_t total_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Check sparql_oracle() {
  Check c;
  const auto t0 = Clock::now();
  testing::Rng rng(20240601);
  std::size_t queries = 0;
  for (int g = 0; g < 500; ++g) {
    const auto graph = testing::random_graph(rng, 50);
    for (int k = 0; k < 4; ++k) {
      const auto q = testing::random_query(rng, 3);
      ++queries;
      c.expect(testing::same_result(sparql::execute(graph, q), testing::oracle_execute(graph, q)),
               "graph " + std::to_string(g) + ": " + sparql::to_string(q));
    }
  }
  const double secs = seconds_since(t0);
  c.expect(secs < kSparqlBudgetSec, "took " + fmt(secs) + " s");
  c.expect(queries == 2000, "query count");
  return c;
}

Check fusion_policy() {
  Check c;
  const auto kg_list = [](std::size_t n) {
    Strings out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("kg answer " + std::to_string(i));
    return out;
  };
  const auto dl_list = [](std::size_t n) {
    std::vector<reader::DlqaAnswer> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({"dl answer " + std::to_string(i), {"H", "p", "R"}, 0.5});
    return out;
  };
  for (std::size_t k = 0; k <= 12; ++k) {
    for (std::size_t d = 0; d <= 12; ++d) {
      const auto r = fusion::fuse(kg_list(k), dl_list(d));
      std::size_t nk = 0, nd = 0;
      bool ordered = true;
      for (const auto& item : r.items) {
        if (item.source == fusion::Source::Kg) {
          ordered = ordered && nd == 0;
          ++nk;
        } else {
          ++nd;
        }
      }
      const auto want_kg = std::min<std::size_t>(k, 5);
      const auto want_dl = std::min<std::size_t>(d, 10 - want_kg);
      const auto tag = "kg=" + std::to_string(k) + " dl=" + std::to_string(d);
      c.expect(r.items.size() <= 10, tag + " size");
      c.expect(ordered, tag + " KG after DL");
      c.expect(nk == want_kg && nd == want_dl, tag + " got " + std::to_string(nk) + "+" + std::to_string(nd));
    }
  }
  c.expect(fusion::fuse({}, dl_list(12)).items.size() == 10, "kg=[] gives 10 DL");
  const auto two = fusion::fuse(kg_list(2), dl_list(12));
  c.expect(two.items.size() == 10 && two.items[2].source == fusion::Source::Dl, "|kg|=2 gives 2 KG + 8 DL");
  // Random duplicate-heavy lists: invariants hold with dedupe on.
  testing::Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Strings kg;
    std::vector<reader::DlqaAnswer> dl;
    for (std::size_t n = rng() % 13; n > 0; --n) kg.push_back(testing::random_sentence(rng, 1));
    for (std::size_t n = rng() % 13; n > 0; --n) dl.push_back({testing::random_sentence(rng, 1), {"H", "p", "R"}, 0.1});
    const auto r = fusion::fuse(kg, dl);
    std::size_t nk = 0;
    bool seen_dl = false, ordered = true;
    for (const auto& item : r.items) {
      if (item.source == fusion::Source::Dl) seen_dl = true;
      if (item.source == fusion::Source::Kg) {
        ++nk;
        ordered = ordered && !seen_dl;
      }
    }
    c.expect(r.items.size() <= 10 && nk <= 5 && ordered, "random lists " + std::to_string(i));
  }
  return c;
}

Check metrics_table() {
  Check c;
  struct Row {
    Strings preds, gold;
    int em;
    double er;
  };
  Strings fifteen;
  for (int i = 0; i < 15; ++i) fifteen.push_back("gold " + std::to_string(i));
  const Strings seven(fifteen.begin(), fifteen.begin() + 7);
  const std::vector<Row> table{
      {{"Directional control"}, {"Directional control", "Crosswind"}, 1, 0.5},
      {{"directional control"}, {"Directional control"}, 0, 0.0},
      {{}, {"a"}, 0, 0.0},
      {{"b", "a"}, {"a", "b", "c", "d"}, 1, 0.5},
      {{"x", "a", "b"}, {"a", "b", "c", "d"}, 0, 0.5},
      {seven, fifteen, 1, 0.7},
      {Strings(fifteen.begin(), fifteen.begin() + 10), fifteen, 1, 1.0},
      {{"p", "q"}, {"a", "b"}, 0, 0.0},
      {{"  a  "}, {"a "}, 1, 1.0},
      {{"a", "a"}, {"a", "a", "b"}, 1, 0.5},
      {{"a"}, {"a"}, 1, 1.0},
      {{"z", "y", "x", "w", "v", "u", "t", "s", "r", "q", "a"}, {"a"}, 0, 0.0},
      {{"b"}, {"b", "a"}, 1, 0.5},
  };
  c.expect(table.size() >= 12, "truth table size");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& r = table[i];
    c.expect(metrics::exact_match(r.preds, r.gold) == r.em, "EM row " + std::to_string(i));
    c.expect(std::abs(metrics::exact_recall(r.preds, r.gold) - r.er) < 1e-12, "ER row " + std::to_string(i));
  }
  const double ratio = metrics::accuracy_ratio(83, 120);
  c.expect(std::abs(ratio - 0.6917) <= kRatioTol, "accuracy_ratio(83,120) = " + fmt(ratio));

  // Semantic metrics against a brute-force cosine table.
  const embed::HashedNgramProvider provider;
  testing::Rng rng(808);
  for (int i = 0; i < 300; ++i) {
    Strings preds, gold;
    for (std::size_t n = rng() % 13; n > 0; --n) preds.push_back(testing::random_sentence(rng, 1 + rng() % 3));
    for (std::size_t n = 1 + rng() % 12; n > 0; --n) gold.push_back(testing::random_sentence(rng, 1 + rng() % 3));
    std::set<std::string> distinct;
    for (const auto& g : gold) distinct.insert(text::trim(g));
    std::size_t hit = 0;
    for (const auto& g : distinct) {
      const auto gv = embed::embed_hashed(g);
      for (std::size_t p = 0; p < std::min<std::size_t>(preds.size(), 10); ++p) {
        if (embed::cosine(embed::embed_hashed(text::trim(preds[p])), gv) >= kTau) {
          ++hit;
          break;
        }
      }
    }
    const double denom = static_cast<double>(std::min<std::size_t>(distinct.size(), 10));
    const double want_sr = std::min<double>(static_cast<double>(hit), denom) / denom;
    c.expect(metrics::semantic_accuracy(preds, gold, provider, kTau) == (hit > 0 ? 1 : 0), "SA case " + std::to_string(i));
    c.expect(std::abs(metrics::semantic_recall(preds, gold, provider, kTau) - want_sr) < 1e-12, "SR case " + std::to_string(i));
  }
  return c;
}

Check bm25() {
  Check c;
  const std::vector<ingest::Passage> three{{"H", "Engine failure during climb.", "A"},
                                           {"H", "The engine lost power after fuel exhaustion.", "B"},
                                           {"H", "Landing gear failure on landing.", "C"}};
  const retrieval::PassageIndex idx(three);
  const auto q = text::content_tokens("engine failure");
  // N=3, avgdl=4 (3, 5 and 4 content tokens), df=2 for both terms, so
  // IDF = ln(1.6) and every tf is 1.
  const double idf = std::log(1.6);
  const double want[3] = {2 * idf * 2.2 / (1 + 1.2 * (0.25 + 0.75 * 3.0 / 4.0)),
                          idf * 2.2 / (1 + 1.2 * (0.25 + 0.75 * 5.0 / 4.0)), idf * 2.2 / (1 + 1.2)};
  c.expect(idx.doc_length(0) == 3 && idx.doc_length(1) == 5 && idx.doc_length(2) == 4, "fixture token counts");
  for (std::size_t i = 0; i < 3; ++i) {
    const double got = retrieval::bm25_score(idx, q, i);
    c.expect(std::abs(got - want[i]) <= kBm25Tol, "passage " + std::to_string(i) + " " + fmt(got) + " vs " + fmt(want[i]));
  }
  testing::Rng rng(200);
  for (int round = 0; round < 200; ++round) {
    const auto ps = testing::random_passages(rng, 1 + rng() % 25);
    const retrieval::PassageIndex index(ps);
    const auto question = testing::random_sentence(rng, 1 + rng() % 4);
    const auto tokens = text::content_tokens(question);
    std::vector<double> scores;
    const auto oracle = testing::bm25_oracle(ps, question);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      scores.push_back(retrieval::bm25_score(index, tokens, i));
      c.expect(std::abs(scores.back() - oracle[i]) <= kBm25Tol, "corpus " + std::to_string(round) + " score");
    }
    const auto k = 1 + rng() % (ps.size() + 2);
    const auto got = retrieval::retrieve_bm25(index, question, k);
    const auto order = testing::full_scan_top(scores, k);
    bool same = got.size() == order.size();
    for (std::size_t r = 0; same && r < got.size(); ++r) same = got[r].index == order[r] && got[r].rank == r + 1;
    c.expect(same, "corpus " + std::to_string(round) + " order");
  }
  return c;
}

Check nl2sparql_goldens() {
  Check c;
  const auto golden = nlohmann::json::parse(testing::read_file(testing::data_dir() / "goldens" / "nl2sparql.json"));
  const auto& graph = testing::fixture_build().graph;
  const auto vocab = nl2sparql::build_vocabulary(graph);
  const embed::HashedNgramProvider provider;
  std::set<std::string> kinds;
  bool conjunction_ok = false;
  std::size_t n = 0;
  for (const auto& g : golden.at("translations")) {
    ++n;
    const auto question = g.at("question").get<std::string>();
    const auto r = nl2sparql::translate(question, graph, vocab, provider);
    c.expect(r.query_text == g.at("query").get<std::string>(), "query for '" + question + "': " + r.query_text);
    c.expect(std::string(nl2sparql::to_string(r.qtype)) == g.at("type").get<std::string>(), "type for '" + question + "'");
    const auto want = g.at("kg_answers").get<Strings>();
    c.expect(r.answers.size() >= want.size() && std::equal(want.begin(), want.end(), r.answers.begin()),
             "answers for '" + question + "'");
    const auto q = sparql::parse(r.query_text);
    if (r.qtype == nl2sparql::QuestionType::Count) kinds.insert("count");
    if (r.qtype == nl2sparql::QuestionType::Boolean) kinds.insert("boolean");
    if (r.qtype == nl2sparql::QuestionType::List && q.patterns.size() == 1) kinds.insert("single-hop");
    if (q.kind == sparql::QueryKind::SelectDistinct && q.patterns.size() == 2) {
      const auto rows = sparql::execute(graph, q).as_terms();
      conjunction_ok = conjunction_ok ||
                       (question.find("operated by") != std::string::npos &&
                        question.find("manufactured by") != std::string::npos && rows.size() == 1 &&
                        nl2sparql::display(rows[0], graph) == "CHI02FA045");
    }
  }
  c.expect(n >= 15, "only " + std::to_string(n) + " golden translations");
  c.expect(kinds.size() == 3, "missing Count, Boolean or single-hop List golden");
  c.expect(conjunction_ok, "two-entity conjunction does not yield CHI02FA045");
  std::size_t abstained = 0;
  for (const auto& q : golden.at("abstentions")) {
    const auto answers = nl2sparql::kgqa_answer(q.get<std::string>(), graph, provider);
    c.expect(answers.empty(), "no abstention on '" + q.get<std::string>() + "'");
    abstained += answers.empty();
  }
  c.expect(abstained >= 2, "fewer than two abstentions");
  return c;
}

double score_of(const std::vector<ontology::TermScore>& s, const std::string& term) {
  for (const auto& t : s) {
    if (t.text() == term) return t.score;
  }
  return std::nan("");
}

Check term_extraction() {
  Check c;
  using Doc = ontology::Document;
  const std::vector<Doc> plain(4, Doc{"landing", "gear"});
  const double non_nested = score_of(ontology::cvalue(plain), "landing gear");
  c.expect(std::abs(non_nested - 4.0) <= kTermTol, "non-nested C-value " + fmt(non_nested));
  std::vector<Doc> nested(3, Doc{"landing", "gear"});
  nested.push_back({"left", "landing", "gear"});
  const double nested_score = score_of(ontology::cvalue(nested), "landing gear");
  c.expect(std::abs(nested_score - 3.0) <= kTermTol, "nested C-value " + fmt(nested_score));
  const std::vector<Doc> two{{"fuel", "fuel", "gear"}, {"gear", "wind"}};
  const double tfidf = score_of(ontology::tfidf(two), "fuel");
  c.expect(std::abs(tfidf - 2 * std::log(2.0)) <= kTermTol, "tf-idf " + fmt(tfidf));
  c.expect(std::abs(tfidf - 1.3863) < 5e-5, "tf-idf rounds to 1.3863");

  const auto tree = ontology::load_taxonomy(testing::read_file(testing::data_dir() / "taxonomy.txt"));
  const auto m = ontology::map_event_keywords("DRAGGED WING, ROTOR, POD, FLOAT OR TAIL/SKID", tree);
  c.expect(m.path.leaf() == "Dragged wing/rotor/pod/float", "mapped to " + m.path.render());
  c.expect(m.path.labels.size() == 4 && m.path.labels[2] == "Aircraft handling related event", "path " + m.path.render());
  return c;
}

Check end_to_end() {
  Check c;
  const auto t0 = Clock::now();
  const auto engine = testing::fixture_engine();
  const auto ts = metrics::parse_testset(testing::read_file(testing::data_dir() / "testset.json"));
  const auto& p = engine->provider();
  const auto kg = metrics::evaluate("KGQA", [&](const std::string& q) { return engine->kg_only(q); }, ts, p, kTau);
  const auto dl = metrics::evaluate("DLQA", [&](const std::string& q) { return engine->dl_only(q); }, ts, p, kTau);
  const auto fused = metrics::evaluate("KGQA + DLQA", [&](const std::string& q) { return engine->ask(q); }, ts, p, kTau);
  c.expect(fused.mean.semantic_accuracy >= kg.mean.semantic_accuracy,
           "fused SA " + fmt(fused.mean.semantic_accuracy) + " < KGQA SA " + fmt(kg.mean.semantic_accuracy));
  c.expect(fused.mean.semantic_accuracy >= dl.mean.semantic_accuracy,
           "fused SA " + fmt(fused.mean.semantic_accuracy) + " < DLQA SA " + fmt(dl.mean.semantic_accuracy));
  bool kg_only_hit = false, dl_only_hit = false, multi_hop_kg_only = false;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const bool k = kg.instances[i].scores.semantic_accuracy == 1.0;
    const bool d = dl.instances[i].scores.semantic_accuracy == 1.0;
    kg_only_hit = kg_only_hit || (k && !d);
    dl_only_hit = dl_only_hit || (d && !k);
    multi_hop_kg_only = multi_hop_kg_only ||
                        (k && !d && ts[i].query.find(" and ") != std::string::npos &&
                         engine->translate(ts[i].query).triples_used.front().patterns.size() == 2);
  }
  c.expect(kg_only_hit, "no question answered only by KGQA");
  c.expect(multi_hop_kg_only, "no multi-hop question answered only by KGQA");
  c.expect(dl_only_hit, "no question answered only by DLQA");
  const double secs = seconds_since(t0);
  c.expect(secs < kEndToEndBudgetSec, "took " + fmt(secs) + " s");
  std::printf("  SA means: KGQA %.3f  DLQA %.3f  fused %.3f (%.2f s)\n", kg.mean.semantic_accuracy,
              dl.mean.semantic_accuracy, fused.mean.semantic_accuracy, secs);
  return c;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"sparql-executor-oracle", sparql_oracle},
      {"fusion-policy", fusion_policy},
      {"metrics-truth-table", metrics_table},
      {"bm25-hand-fixture-and-order", bm25},
      {"nl2sparql-goldens", nl2sparql_goldens},
      {"cvalue-tfidf-and-taxonomy-mapping", term_extraction},
      {"end-to-end-complementarity", end_to_end},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %s (%s)\n", c.ok() ? "PASS" : "FAIL", name.c_str(), c.summary().c_str());
    failed += c.ok() ? 0 : 1;
  }
  const double secs = seconds_since(t0);
  std::printf("%s suite-runtime (%.2f s, budget %.0f s)\n", secs < kEndToEndBudgetSec ? "PASS" : "FAIL", secs,
              kEndToEndBudgetSec);
  return failed == 0 && secs < kEndToEndBudgetSec ? 0 : 1;
}
