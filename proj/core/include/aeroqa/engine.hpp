#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeroqa/embeddings.hpp"
#include "aeroqa/fusion.hpp"
#include "aeroqa/nl2sparql.hpp"
#include "aeroqa/reader.hpp"
#include "aeroqa/retrieval.hpp"
#include "aeroqa/triplestore.hpp"

namespace aeroqa::app {

inline constexpr std::string_view kModelUrlEnv = "AEROQA_MODEL_URL";

struct AppConfig {
  std::filesystem::path data_dir;
  std::string provider = "hashed";  // hashed | file:PATH | remote:URL
  std::string reader = "fallback";  // fallback | remote:URL
  reader::ReaderMode reader_mode = reader::ReaderMode::Extractive;
  reader::RetrieverKind retriever = reader::RetrieverKind::Bm25;
  fusion::FusionPolicy fusion;
  double theta_link = 0.6;
  double tau = 0.8;
  std::size_t k = 5;
  int port = 8080;

  // Throws ConfigError for out-of-range values or malformed specs.
  void validate() const;
};

// "hashed", "file:PATH" or "remote:URL". Remote providers fall back to the
// hashed provider, with a warning, when the service is unreachable.
std::shared_ptr<const embed::Provider> make_provider(std::string_view spec);

// "fallback" -> built-in reader, "remote:URL" -> sidecar with fallback.
reader::ReaderConfig make_reader_config(std::string_view spec, reader::ReaderMode mode);

// Immutable after construction; every method is safe to call concurrently.
class Engine {
 public:
  Engine(kg::Graph graph, std::vector<ingest::Passage> passages, AppConfig config);

  // Reads kg.nt and passages.json (or passages.jsonl) from config.data_dir.
  // Throws ConfigError when an artifact is missing.
  static std::shared_ptr<const Engine> load(const AppConfig& config);

  fusion::SystemResponse ask(std::string_view question) const;
  // Each module alone, filling every slot with its own answers.
  fusion::SystemResponse kg_only(std::string_view question) const;
  fusion::SystemResponse dl_only(std::string_view question) const;

  nl2sparql::TranslationResult translate(std::string_view question) const;
  std::vector<reader::DlqaAnswer> dlqa(std::string_view question) const;

  const kg::Graph& graph() const noexcept { return graph_; }
  const retrieval::PassageIndex& index() const noexcept { return index_; }
  const embed::Provider& provider() const noexcept { return *provider_; }
  const AppConfig& config() const noexcept { return config_; }

 private:
  kg::Graph graph_;
  retrieval::PassageIndex index_;
  nl2sparql::Vocabulary vocab_;
  AppConfig config_;
  std::shared_ptr<const embed::Provider> provider_;
  reader::DlqaConfig dlqa_;
};

// {"question", "items": [{"rank", "text", "source", "score", "passage"}]}.
std::string response_json(std::string_view question, const fusion::SystemResponse& response);

// Numbered lines tagged [KG] or [DL], DL items followed by a passage snippet.
std::string render_response(const fusion::SystemResponse& response);

}  // namespace aeroqa::app
