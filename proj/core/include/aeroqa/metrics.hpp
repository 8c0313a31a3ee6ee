#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aeroqa/fusion.hpp"

namespace aeroqa::embed {
class Provider;
}

namespace aeroqa::metrics {

// Only the first kTopN predictions are scored and recall denominators are
// capped at kTopN.
inline constexpr std::size_t kTopN = 10;
inline constexpr double kDefaultTau = 0.8;

// 1 when the first prediction, trimmed, equals a trimmed gold answer byte
// for byte. Throws ValidationError on empty gold.
int exact_match(std::span<const std::string> preds, std::span<const std::string> gold);

// Distinct gold answers found verbatim (after trimming) among the
// predictions, over min(|distinct gold|, 10).
double exact_recall(std::span<const std::string> preds, std::span<const std::string> gold);

// 1 when some (prediction, gold) pair has cosine >= tau.
int semantic_accuracy(std::span<const std::string> preds, std::span<const std::string> gold,
                      const embed::Provider& provider, double tau = kDefaultTau);

// Distinct gold answers with some prediction at cosine >= tau, over
// min(|distinct gold|, 10).
double semantic_recall(std::span<const std::string> preds, std::span<const std::string> gold,
                       const embed::Provider& provider, double tau = kDefaultTau);

// correct / total. Throws ValidationError for total == 0 or correct > total.
double accuracy_ratio(std::size_t correct, std::size_t total);

struct GoldPassage {
  std::string text;
  std::string accident_number;
};

struct TestInstance {
  std::string query;
  std::vector<std::string> answers;
  std::vector<GoldPassage> passages;
};

// JSON array of {"query", "answers", "passages": [{"text", "accident_number"}]}.
// Throws ParseError naming the offending instance; an empty array is a
// ValidationError.
std::vector<TestInstance> parse_testset(std::string_view json_text);

struct Scores {
  double exact_match = 0.0;
  double exact_recall = 0.0;
  double semantic_accuracy = 0.0;
  double semantic_recall = 0.0;
  double passage_semantic_accuracy = 0.0;
  double passage_semantic_recall = 0.0;
};

struct InstanceResult {
  std::string query;
  Scores scores;
  std::vector<std::string> answers;
  bool abstained = false;
  bool failed = false;
  std::string error;
};

struct EvalReport {
  std::string system;
  std::vector<InstanceResult> instances;
  Scores mean;
  std::size_t abstentions = 0;
  std::size_t failures = 0;
};

using System = std::function<fusion::SystemResponse(const std::string& question)>;

// Runs `system` on each instance. Answer metrics use the response texts,
// passage metrics the response passages. A throwing instance scores zero
// and is flagged. Throws ValidationError on an empty test set.
EvalReport evaluate(const std::string& name, const System& system,
                    std::span<const TestInstance> testset, const embed::Provider& provider,
                    double tau = kDefaultTau);

std::string to_json(const EvalReport& report);
std::string to_json(std::span<const EvalReport> reports);

// Aligned plain-text table, one row per system.
std::string format_table(std::span<const EvalReport> reports);

}  // namespace aeroqa::metrics
