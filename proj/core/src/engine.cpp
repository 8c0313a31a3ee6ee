#include "aeroqa/engine.hpp"

#include <fstream>
#include <sstream>

#include "aeroqa/error.hpp"
#include "json.hpp"

namespace aeroqa::app {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void AppConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (!(theta_link >= -1.0 && theta_link <= 1.01)) throw ConfigError("link threshold out of range");
  if (k == 0) throw ConfigError("k must be at least 1");
  if (fusion.per_module_quota > fusion.total_slots) {
    throw ConfigError("per-module quota exceeds the number of slots");
  }
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
  make_reader_config(reader, reader_mode);
}

std::shared_ptr<const embed::Provider> make_provider(std::string_view spec) {
  auto hashed = std::make_shared<const embed::HashedNgramProvider>();
  if (spec == "hashed") return hashed;
  if (spec.starts_with("file:")) return embed::load_vectors(std::string(spec.substr(5)));
  if (spec.starts_with("remote:")) {
    auto remote = std::make_shared<const embed::RemoteProvider>(embed::Endpoint::parse(spec.substr(7)));
    return std::make_shared<const embed::FallbackProvider>(remote, hashed);
  }
  throw ConfigError("unknown provider '" + std::string(spec) + "' (hashed, file:PATH, remote:URL)");
}

reader::ReaderConfig make_reader_config(std::string_view spec, reader::ReaderMode mode) {
  reader::ReaderConfig cfg;
  cfg.mode = mode;
  if (spec == "fallback") return cfg;
  if (spec.starts_with("remote:")) {
    cfg.remote = embed::Endpoint::parse(spec.substr(7));
    return cfg;
  }
  throw ConfigError("unknown reader '" + std::string(spec) + "' (fallback, remote:URL)");
}

Engine::Engine(kg::Graph graph, std::vector<ingest::Passage> passages, AppConfig config)
    : graph_(std::move(graph)),
      index_(std::move(passages)),
      vocab_(nl2sparql::build_vocabulary(graph_)),
      config_(std::move(config)) {
  config_.validate();
  provider_ = make_provider(config_.provider);
  dlqa_.retriever = config_.retriever;
  dlqa_.k = config_.k;
  dlqa_.budget = config_.fusion.total_slots;
  dlqa_.reader = make_reader_config(config_.reader, config_.reader_mode);
}

std::shared_ptr<const Engine> Engine::load(const AppConfig& config) {
  const auto kg_path = config.data_dir / "kg.nt";
  if (!std::filesystem::exists(kg_path)) {
    throw ConfigError("missing " + kg_path.string() + " (run `aeroqa build` first)");
  }
  auto graph = kg::parse_ntlines(read_file(kg_path));
  std::filesystem::path passages_path = config.data_dir / "passages.json";
  if (!std::filesystem::exists(passages_path)) passages_path = config.data_dir / "passages.jsonl";
  if (!std::filesystem::exists(passages_path)) {
    throw ConfigError("missing passages.json in " + config.data_dir.string());
  }
  auto passages = ingest::import_passages(read_file(passages_path));
  return std::make_shared<const Engine>(std::move(graph), std::move(passages), config);
}

nl2sparql::TranslationResult Engine::translate(std::string_view question) const {
  nl2sparql::KgqaConfig cfg;
  cfg.link.threshold = config_.theta_link;
  cfg.max_answers = config_.fusion.total_slots;
  return nl2sparql::translate(question, graph_, vocab_, *provider_, cfg);
}

std::vector<reader::DlqaAnswer> Engine::dlqa(std::string_view question) const {
  return reader::dlqa_answer(question, index_, provider_.get(), dlqa_);
}

fusion::SystemResponse Engine::ask(std::string_view question) const {
  const auto kg = translate(question).answers;
  const auto dl = dlqa(question);
  return fusion::fuse(kg, dl, config_.fusion);
}

fusion::SystemResponse Engine::kg_only(std::string_view question) const {
  auto policy = config_.fusion;
  policy.per_module_quota = policy.total_slots;
  return fusion::fuse(translate(question).answers, {}, policy);
}

fusion::SystemResponse Engine::dl_only(std::string_view question) const {
  return fusion::fuse({}, dlqa(question), config_.fusion);
}

std::string response_json(std::string_view question, const fusion::SystemResponse& response) {
  nlohmann::ordered_json doc;
  doc["question"] = std::string(question);
  doc["items"] = nlohmann::ordered_json::array();
  std::size_t rank = 0;
  for (const auto& item : response.items) {
    nlohmann::ordered_json o;
    o["rank"] = ++rank;
    o["text"] = item.text;
    o["source"] = std::string(fusion::to_string(item.source));
    o["score"] = item.score;
    if (item.passage) {
      o["passage"] = {{"heading", item.passage->heading},
                      {"text", item.passage->text},
                      {"report_id", item.passage->report_id}};
    } else {
      o["passage"] = nullptr;
    }
    doc["items"].push_back(std::move(o));
  }
  return doc.dump();
}

std::string render_response(const fusion::SystemResponse& response) {
  if (response.empty()) return "(no answer)\n";
  std::string out;
  std::size_t rank = 0;
  for (const auto& item : response.items) {
    out += std::to_string(++rank) + ". [" + std::string(fusion::to_string(item.source)) + "] " +
           item.text + "\n";
    if (item.passage) {
      auto snippet = item.passage->text;
      if (snippet.size() > 120) snippet = snippet.substr(0, 117) + "...";
      out += "     " + item.passage->report_id + " / " + item.passage->heading + ": " + snippet + "\n";
    }
  }
  return out;
}

}  // namespace aeroqa::app
