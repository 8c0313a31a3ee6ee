#include "aeroqa/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aeroqa/embeddings.hpp"
#include "aeroqa/error.hpp"
#include "aeroqa/text.hpp"

namespace aeroqa::retrieval {
namespace {

std::vector<ScoredPassage> top_k(std::span<const Passage> passages,
                                 const std::vector<double>& scores, std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  const auto n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  std::vector<ScoredPassage> out;
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    out.push_back({order[r], passages[order[r]], scores[order[r]], r + 1});
  }
  return out;
}

}  // namespace

PassageIndex::PassageIndex(std::vector<Passage> passages) : passages_(std::move(passages)) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < passages_.size(); ++i) {
    const auto tokens = text::content_tokens(passages_[i].text);
    doc_lengths_.push_back(tokens.size());
    total += tokens.size();
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& t : tokens) ++counts[t];
    for (const auto& [term, tf] : counts) postings_[term].push_back({i, tf});
  }
  avgdl_ = passages_.empty() ? 0.0
                             : static_cast<double>(total) / static_cast<double>(passages_.size());
}

std::size_t PassageIndex::df(const std::string& term) const { return postings(term).size(); }

std::size_t PassageIndex::tf(const std::string& term, std::size_t passage) const {
  const auto list = postings(term);
  const auto it = std::lower_bound(list.begin(), list.end(), passage,
                                   [](const Posting& p, std::size_t v) { return p.passage < v; });
  return it != list.end() && it->passage == passage ? it->tf : 0;
}

std::span<const Posting> PassageIndex::postings(const std::string& term) const {
  const auto it = postings_.find(term);
  if (it == postings_.end()) return {};
  return it->second;
}

PassageIndex build_index(std::vector<Passage> passages) {
  return PassageIndex(std::move(passages));
}

double bm25_score(const PassageIndex& index, std::span<const std::string> query_tokens,
                  std::size_t passage, const Bm25Params& params) {
  if (passage >= index.size()) {
    throw ValidationError("passage " + std::to_string(passage) + " is not in the index");
  }
  const double n = static_cast<double>(index.size());
  const double dl = static_cast<double>(index.doc_length(passage));
  const double norm = params.k1 * (1.0 - params.b + params.b * dl / index.avgdl());
  double score = 0.0;
  for (const auto& t : query_tokens) {
    const double tf = static_cast<double>(index.tf(t, passage));
    if (tf == 0.0) continue;
    const double df = static_cast<double>(index.df(t));
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    score += idf * tf * (params.k1 + 1.0) / (tf + norm);
  }
  return score;
}

std::vector<ScoredPassage> retrieve_bm25(const PassageIndex& index, std::string_view question,
                                         std::size_t k, const Bm25Params& params) {
  if (k == 0) throw ValidationError("k must be at least 1");
  const auto q = text::content_tokens(question);
  std::vector<double> scores(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) scores[i] = bm25_score(index, q, i, params);
  return top_k(index.passages(), scores, k);
}

std::vector<ScoredPassage> retrieve_dense(std::span<const Passage> passages,
                                          std::string_view question,
                                          const embed::Provider& provider, std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (passages.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(passages.size() + 1);
  texts.emplace_back(question);
  for (const auto& p : passages) texts.push_back(p.heading + " " + p.text);
  const auto vectors = provider.embed(texts);
  std::vector<double> scores(passages.size());
  for (std::size_t i = 0; i < passages.size(); ++i) {
    scores[i] = embed::cosine(vectors[0], vectors[i + 1]);
  }
  return top_k(passages, scores, k);
}

}  // namespace aeroqa::retrieval
