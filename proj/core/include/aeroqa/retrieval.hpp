#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aeroqa/ingest.hpp"

namespace aeroqa::embed {
class Provider;
}

namespace aeroqa::retrieval {

using ingest::Passage;

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::size_t passage = 0;
  std::size_t tf = 0;
};

// Inverted index over text::content_tokens of each passage's text.
class PassageIndex {
 public:
  PassageIndex() = default;
  explicit PassageIndex(std::vector<Passage> passages);

  const std::vector<Passage>& passages() const noexcept { return passages_; }
  std::size_t size() const noexcept { return passages_.size(); }
  bool empty() const noexcept { return passages_.empty(); }
  double avgdl() const noexcept { return avgdl_; }
  std::size_t doc_length(std::size_t i) const { return doc_lengths_.at(i); }
  std::size_t df(const std::string& term) const;
  std::size_t tf(const std::string& term, std::size_t passage) const;
  // Postings in passage order; empty for unknown terms.
  std::span<const Posting> postings(const std::string& term) const;

 private:
  std::vector<Passage> passages_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::size_t> doc_lengths_;
  double avgdl_ = 0.0;
};

PassageIndex build_index(std::vector<Passage> passages);

// Sum over query tokens (repeats count) of
//   IDF(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl)),
//   IDF(t) = ln((N - df + 0.5) / (df + 0.5) + 1).
// Throws ValidationError when `passage` is out of range.
double bm25_score(const PassageIndex& index, std::span<const std::string> query_tokens,
                  std::size_t passage, const Bm25Params& params = {});

struct ScoredPassage {
  std::size_t index = 0;  // position in the searched collection
  Passage passage;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

// Top k by score, ties by insertion order. Throws ValidationError for k == 0.
std::vector<ScoredPassage> retrieve_bm25(const PassageIndex& index, std::string_view question,
                                         std::size_t k, const Bm25Params& params = {});

// Cosine between the question and heading + " " + text, embedded in one
// batch.
std::vector<ScoredPassage> retrieve_dense(std::span<const Passage> passages,
                                          std::string_view question,
                                          const embed::Provider& provider, std::size_t k);

}  // namespace aeroqa::retrieval
