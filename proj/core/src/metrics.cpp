#include "aeroqa/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "aeroqa/embeddings.hpp"
#include "aeroqa/error.hpp"
#include "aeroqa/text.hpp"
#include "json.hpp"

namespace aeroqa::metrics {
namespace {

using ordered_json = nlohmann::ordered_json;

std::span<const std::string> top(std::span<const std::string> preds) {
  return preds.first(std::min(preds.size(), kTopN));
}

std::vector<std::string> distinct_gold(std::span<const std::string> gold) {
  if (gold.empty()) throw ValidationError("gold answer list is empty");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& g : gold) {
    auto t = text::trim(g);
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

double capped_ratio(std::size_t hits, std::size_t distinct) {
  const auto denom = std::min(distinct, kTopN);
  return static_cast<double>(std::min(hits, denom)) / static_cast<double>(denom);
}

// matched[g] for every distinct gold answer.
std::vector<bool> semantic_hits(std::span<const std::string> preds,
                                const std::vector<std::string>& gold,
                                const embed::Provider& provider, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in (0, 1]");
  std::vector<bool> hit(gold.size(), false);
  const auto p = top(preds);
  if (p.empty()) return hit;
  std::vector<std::string> texts(p.begin(), p.end());
  texts.insert(texts.end(), gold.begin(), gold.end());
  const auto v = provider.embed(texts);
  for (std::size_t g = 0; g < gold.size(); ++g) {
    for (std::size_t i = 0; i < p.size() && !hit[g]; ++i) {
      hit[g] = embed::cosine(v[i], v[p.size() + g]) >= tau;
    }
  }
  return hit;
}

ordered_json scores_json(const Scores& s) {
  ordered_json o;
  o["exact_match"] = s.exact_match;
  o["exact_recall"] = s.exact_recall;
  o["semantic_accuracy"] = s.semantic_accuracy;
  o["semantic_recall"] = s.semantic_recall;
  o["passage_semantic_accuracy"] = s.passage_semantic_accuracy;
  o["passage_semantic_recall"] = s.passage_semantic_recall;
  return o;
}

ordered_json report_json(const EvalReport& r) {
  ordered_json o;
  o["system"] = r.system;
  o["instances"] = r.instances.size();
  o["abstentions"] = r.abstentions;
  o["failures"] = r.failures;
  o["mean"] = scores_json(r.mean);
  o["per_instance"] = ordered_json::array();
  for (const auto& i : r.instances) {
    ordered_json e;
    e["query"] = i.query;
    e["scores"] = scores_json(i.scores);
    e["answers"] = i.answers;
    e["abstained"] = i.abstained;
    e["failed"] = i.failed;
    if (i.failed) e["error"] = i.error;
    o["per_instance"].push_back(std::move(e));
  }
  return o;
}

}  // namespace

int exact_match(std::span<const std::string> preds, std::span<const std::string> gold) {
  const auto g = distinct_gold(gold);
  if (preds.empty()) return 0;
  const auto first = text::trim(preds.front());
  return std::find(g.begin(), g.end(), first) != g.end() ? 1 : 0;
}

double exact_recall(std::span<const std::string> preds, std::span<const std::string> gold) {
  const auto g = distinct_gold(gold);
  std::set<std::string> p;
  for (const auto& s : top(preds)) p.insert(text::trim(s));
  const auto hits = static_cast<std::size_t>(
      std::count_if(g.begin(), g.end(), [&](const std::string& s) { return p.contains(s); }));
  return capped_ratio(hits, g.size());
}

int semantic_accuracy(std::span<const std::string> preds, std::span<const std::string> gold,
                      const embed::Provider& provider, double tau) {
  const auto hit = semantic_hits(preds, distinct_gold(gold), provider, tau);
  return std::find(hit.begin(), hit.end(), true) != hit.end() ? 1 : 0;
}

double semantic_recall(std::span<const std::string> preds, std::span<const std::string> gold,
                       const embed::Provider& provider, double tau) {
  const auto g = distinct_gold(gold);
  const auto hit = semantic_hits(preds, g, provider, tau);
  return capped_ratio(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true)), g.size());
}

double accuracy_ratio(std::size_t correct, std::size_t total) {
  if (total == 0) throw ValidationError("accuracy ratio needs at least one question");
  if (correct > total) throw ValidationError("more correct answers than questions");
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<TestInstance> parse_testset(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("test set is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("test set must be a JSON array");
  if (doc.empty()) throw ValidationError("test set is empty");
  std::vector<TestInstance> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto where = "instance " + std::to_string(i) + ": ";
    try {
      const auto& o = doc[i];
      TestInstance t;
      t.query = o.at("query").get<std::string>();
      t.answers = o.at("answers").get<std::vector<std::string>>();
      for (const auto& p : o.at("passages")) {
        t.passages.push_back({p.at("text").get<std::string>(), p.at("accident_number").get<std::string>()});
        if (t.passages.back().accident_number.empty()) throw ParseError(where + "empty accident_number");
      }
      if (text::trim(t.query).empty()) throw ParseError(where + "empty query");
      if (t.answers.empty()) throw ParseError(where + "no gold answers");
      out.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + e.what());
    }
  }
  return out;
}

EvalReport evaluate(const std::string& name, const System& system,
                    std::span<const TestInstance> testset, const embed::Provider& provider,
                    double tau) {
  if (testset.empty()) throw ValidationError("test set is empty");
  EvalReport report;
  report.system = name;
  for (const auto& inst : testset) {
    InstanceResult r;
    r.query = inst.query;
    try {
      const auto response = system(inst.query);
      r.answers = response.answers();
      r.abstained = response.empty();
      const auto passages = response.passage_texts();
      std::vector<std::string> gold_passages;
      for (const auto& p : inst.passages) gold_passages.push_back(p.text);

      r.scores.exact_match = exact_match(r.answers, inst.answers);
      r.scores.exact_recall = exact_recall(r.answers, inst.answers);
      r.scores.semantic_accuracy = semantic_accuracy(r.answers, inst.answers, provider, tau);
      r.scores.semantic_recall = semantic_recall(r.answers, inst.answers, provider, tau);
      if (!gold_passages.empty()) {
        r.scores.passage_semantic_accuracy = semantic_accuracy(passages, gold_passages, provider, tau);
        r.scores.passage_semantic_recall = semantic_recall(passages, gold_passages, provider, tau);
      }
    } catch (const std::exception& e) {
      r.scores = {};
      r.failed = true;
      r.error = e.what();
    }
    report.abstentions += r.abstained ? 1 : 0;
    report.failures += r.failed ? 1 : 0;
    report.instances.push_back(std::move(r));
  }
  const auto n = static_cast<double>(report.instances.size());
  for (const auto& r : report.instances) {
    report.mean.exact_match += r.scores.exact_match / n;
    report.mean.exact_recall += r.scores.exact_recall / n;
    report.mean.semantic_accuracy += r.scores.semantic_accuracy / n;
    report.mean.semantic_recall += r.scores.semantic_recall / n;
    report.mean.passage_semantic_accuracy += r.scores.passage_semantic_accuracy / n;
    report.mean.passage_semantic_recall += r.scores.passage_semantic_recall / n;
  }
  return report;
}

std::string to_json(const EvalReport& report) { return report_json(report).dump(2); }

std::string to_json(std::span<const EvalReport> reports) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(2);
}

std::string format_table(std::span<const EvalReport> reports) {
  const std::vector<std::string> headers = {"Model", "EM", "ER", "SA", "SR", "SA (psg)", "SR (psg)"};
  std::vector<std::vector<std::string>> rows;
  const auto fmt = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  for (const auto& r : reports) {
    const auto& m = r.mean;
    rows.push_back({r.system, fmt(m.exact_match), fmt(m.exact_recall), fmt(m.semantic_accuracy),
                    fmt(m.semantic_recall), fmt(m.passage_semantic_accuracy),
                    fmt(m.passage_semantic_recall)});
  }
  std::vector<std::size_t> width(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    width[c] = headers[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out += "  ";
      const auto pad = std::string(width[c] - cells[c].size(), ' ');
      out += c == 0 ? cells[c] + pad : pad + cells[c];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  };
  line(headers);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
  for (const auto& row : rows) line(row);
  return out;
}

}  // namespace aeroqa::metrics
