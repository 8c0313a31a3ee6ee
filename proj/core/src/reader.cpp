#include "aeroqa/reader.hpp"

#include <algorithm>
#include <cctype>

#include <spdlog/spdlog.h>

#include "aeroqa/error.hpp"
#include "aeroqa/text.hpp"
#include "httplib.h"
#include "json.hpp"

namespace aeroqa::reader {
namespace {

using nlohmann::json;

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

struct Window {
  std::size_t begin = 0;
  std::size_t end = 0;
  double score = 0.0;
};

// Narrows [begin, end) to run from the first to the last non-stopword word.
std::optional<std::pair<std::size_t, std::size_t>> trim_span(std::string_view text,
                                                             std::size_t begin, std::size_t end) {
  const auto words = text::split_words(text.substr(begin, end - begin));
  std::optional<std::size_t> first;
  std::size_t last = 0;
  for (const auto& w : words) {
    if (text::is_stopword(text::to_lower(w.text))) continue;
    if (!first) first = begin + w.begin;
    last = begin + w.end;
  }
  if (!first) return std::nullopt;
  return std::pair{*first, last};
}

}  // namespace

std::string_view to_string(ReaderMode mode) noexcept {
  return mode == ReaderMode::Extractive ? "extractive" : "abstractive";
}

std::vector<std::pair<std::size_t, std::size_t>> split_sentences(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  const auto n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) break;
    const auto begin = i;
    std::size_t end = n;
    while (i < n) {
      if (is_terminal(text[i])) {
        auto j = i;
        while (j < n && is_terminal(text[j])) ++j;
        if (j == n || is_space(text[j])) {
          end = j;
          i = j;
          break;
        }
        i = j;
      } else {
        ++i;
      }
    }
    if (i >= n) end = n;
    out.emplace_back(begin, end);
  }
  return out;
}

std::vector<ReaderAnswer> read_extractive_fallback(std::string_view question,
                                                   std::span<const Passage> passages,
                                                   std::size_t per_passage) {
  const auto q = text::content_tokens(question);
  std::vector<ReaderAnswer> out;
  for (std::size_t pi = 0; pi < passages.size(); ++pi) {
    const std::string_view body = passages[pi].text;
    const auto sentences = split_sentences(body);
    std::vector<Window> windows;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      for (std::size_t len = 1; len <= 2 && s + len <= sentences.size(); ++len) {
        const auto begin = sentences[s].first;
        const auto end = sentences[s + len - 1].second;
        const auto span = trim_span(body, begin, end);
        if (!span) continue;
        const auto tokens = text::content_tokens(body.substr(begin, end - begin));
        windows.push_back({span->first, span->second, text::jaccard(q, tokens)});
      }
    }
    std::stable_sort(windows.begin(), windows.end(), [](const Window& a, const Window& b) {
      if (a.score != b.score) return a.score > b.score;
      const auto la = a.end - a.begin;
      const auto lb = b.end - b.begin;
      if (la != lb) return la < lb;
      return a.begin < b.begin;
    });
    std::vector<std::string> taken;
    for (const auto& w : windows) {
      if (taken.size() >= per_passage) break;
      auto span_text = std::string(body.substr(w.begin, w.end - w.begin));
      if (std::find(taken.begin(), taken.end(), span_text) != taken.end()) continue;
      taken.push_back(span_text);
      out.push_back({std::move(span_text), pi, w.score, w.begin});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ReaderAnswer& a, const ReaderAnswer& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.passage_index != b.passage_index) return a.passage_index < b.passage_index;
    return *a.offset < *b.offset;
  });
  return out;
}

std::vector<ReaderAnswer> read_remote(std::string_view question, std::span<const Passage> passages,
                                      ReaderMode mode, const embed::Endpoint& endpoint,
                                      std::size_t top_n) {
  if (passages.empty()) throw ValidationError("reader needs at least one passage");

  json body;
  body["question"] = std::string(question);
  body["passages"] = json::array();
  for (const auto& p : passages) {
    body["passages"].push_back(
        {{"heading", p.heading}, {"text", p.text}, {"report_id", p.report_id}});
  }
  body["mode"] = std::string(to_string(mode));
  body["top_n"] = top_n;

  httplib::Client cli(endpoint.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  auto res = cli.Post(endpoint.base_path + "/read", body.dump(), "application/json");
  if (!res) {
    throw RemoteError("POST " + endpoint.url() + "/read failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw RemoteError("POST " + endpoint.url() + "/read returned HTTP " + std::to_string(res->status));
  }

  std::vector<ReaderAnswer> out;
  try {
    const auto doc = json::parse(res->body);
    for (const auto& a : doc.at("answers")) {
      ReaderAnswer ans;
      ans.text = a.at("text").get<std::string>();
      ans.score = a.value("score", 0.0);
      const auto idx = a.value("passage_index", std::int64_t{0});
      if (mode == ReaderMode::Abstractive) {
        // Attached to the cited passage when valid, else the top one.
        ans.passage_index =
            idx >= 0 && static_cast<std::size_t>(idx) < passages.size() ? static_cast<std::size_t>(idx) : 0;
      } else {
        if (idx < 0 || static_cast<std::size_t>(idx) >= passages.size()) {
          throw RemoteError("/read cited passage " + std::to_string(idx) + " of " +
                            std::to_string(passages.size()));
        }
        ans.passage_index = static_cast<std::size_t>(idx);
        const auto pos = passages[ans.passage_index].text.find(ans.text);
        if (ans.text.empty() || pos == std::string::npos) {
          spdlog::warn("reader answer '{}' is not a span of passage {}; score set to 0", ans.text,
                       ans.passage_index);
          ans.score = 0.0;
        } else {
          ans.offset = pos;
        }
      }
      out.push_back(std::move(ans));
    }
  } catch (const json::exception& e) {
    throw RemoteError(std::string("/read response is malformed: ") + e.what());
  }
  return out;
}

std::vector<DlqaAnswer> dlqa_answer(std::string_view question, const retrieval::PassageIndex& index,
                                    const embed::Provider* provider, const DlqaConfig& config) {
  if (index.empty() || config.budget == 0) return {};

  std::vector<retrieval::ScoredPassage> hits;
  if (config.retriever == RetrieverKind::Dense) {
    if (provider == nullptr) throw ValidationError("dense retrieval needs an embedding provider");
    hits = retrieval::retrieve_dense(index.passages(), question, *provider, config.k);
  } else {
    hits = retrieval::retrieve_bm25(index, question, config.k);
  }
  std::vector<Passage> passages;
  passages.reserve(hits.size());
  for (const auto& h : hits) passages.push_back(h.passage);

  std::vector<ReaderAnswer> answers;
  bool done = false;
  if (config.reader.remote) {
    try {
      answers = read_remote(question, passages, config.reader.mode, *config.reader.remote,
                            config.budget);
      done = true;
    } catch (const RemoteError& e) {
      if (!config.reader.fallback_on_error) throw;
      spdlog::warn("remote reader failed ({}); using the built-in reader", e.what());
    }
  }
  if (!done) answers = read_extractive_fallback(question, passages, config.reader.per_passage);

  std::stable_sort(answers.begin(), answers.end(),
                   [](const ReaderAnswer& a, const ReaderAnswer& b) { return a.score > b.score; });
  std::vector<DlqaAnswer> out;
  for (const auto& a : answers) {
    if (out.size() >= config.budget) break;
    out.push_back({a.text, passages[a.passage_index], a.score});
  }
  return out;
}

}  // namespace aeroqa::reader
