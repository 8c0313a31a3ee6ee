#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aeroqa/embeddings.hpp"
#include "aeroqa/retrieval.hpp"

namespace aeroqa::reader {

using ingest::Passage;

enum class ReaderMode { Extractive, Abstractive };

std::string_view to_string(ReaderMode mode) noexcept;

struct ReaderAnswer {
  std::string text;
  std::size_t passage_index = 0;  // into the passages handed to the reader
  double score = 0.0;
  // Byte offset of `text` inside its passage; unset for abstractive answers.
  std::optional<std::size_t> offset;
};

// Sentences end at a run of '.', '!' or '?' followed by whitespace or the
// end of the text. Returned as [begin, end) byte ranges.
std::vector<std::pair<std::size_t, std::size_t>> split_sentences(std::string_view text);

// Every window of one or two consecutive sentences is scored by the Jaccard
// overlap of its content tokens with the question's, then trimmed of
// leading and trailing stopwords and punctuation. The best `per_passage`
// windows of each passage are merged and sorted by score, then passage
// order, then offset.
std::vector<ReaderAnswer> read_extractive_fallback(std::string_view question,
                                                   std::span<const Passage> passages,
                                                   std::size_t per_passage = 2);

// POST {base}/read. Extractive answers that are not substrings of the
// passage they cite are kept in place with score 0. Throws ValidationError
// for an empty passage list (before any request) and RemoteError on
// transport or protocol failures.
std::vector<ReaderAnswer> read_remote(std::string_view question, std::span<const Passage> passages,
                                      ReaderMode mode, const embed::Endpoint& endpoint,
                                      std::size_t top_n = 10);

enum class RetrieverKind { Bm25, Dense };

struct ReaderConfig {
  // Unset means the built-in extractive reader.
  std::optional<embed::Endpoint> remote;
  ReaderMode mode = ReaderMode::Extractive;
  std::size_t per_passage = 2;
  // Remote failures degrade to the built-in reader instead of propagating.
  bool fallback_on_error = true;
};

struct DlqaConfig {
  RetrieverKind retriever = RetrieverKind::Bm25;
  std::size_t k = 5;
  std::size_t budget = 10;
  ReaderConfig reader;
};

struct DlqaAnswer {
  std::string text;
  Passage passage;
  double score = 0.0;
};

// Retrieve top-k passages, read them, and return at most `budget` answers in
// reader-score order. `provider` is only consulted by the dense retriever
// and may be null otherwise.
std::vector<DlqaAnswer> dlqa_answer(std::string_view question, const retrieval::PassageIndex& index,
                                    const embed::Provider* provider, const DlqaConfig& config = {});

}  // namespace aeroqa::reader
