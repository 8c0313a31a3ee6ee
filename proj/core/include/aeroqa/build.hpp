#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aeroqa/ingest.hpp"
#include "aeroqa/ontology.hpp"
#include "aeroqa/triplestore.hpp"

namespace aeroqa::app {

struct BuildOptions {
  std::filesystem::path reports_dir;
  std::filesystem::path patterns;
  std::optional<std::filesystem::path> taxonomy;
  // Header field mapped onto the taxonomy for each report.
  std::string occurrence_field = "Occurrence";
  std::size_t top_terms = 25;
};

struct BuildResult {
  kg::Graph graph;
  std::vector<ingest::Passage> passages;
  kg::KgStats stats;
  std::size_t reports = 0;
  // "file: message" for every report that failed; nothing is built from it.
  std::vector<std::string> errors;
  std::vector<ontology::MappingResult> mappings;
  std::vector<ontology::TermScore> tfidf_terms;
  std::vector<ontology::TermScore> cvalue_terms;

  bool ok() const noexcept { return errors.empty(); }
};

// Parses every *.txt report (sorted by name), applies the extraction
// patterns in accident-number order, maps occurrences onto the taxonomy
// (typing the accident with the leaf class and adding the subclass chain),
// and collects passages and corpus terms. Throws ConfigError for unusable
// pattern or taxonomy files.
BuildResult build_corpus(const BuildOptions& options);

// kg.nt, passages.json, passages.jsonl, terms.json.
void write_artifacts(const BuildResult& result, const std::filesystem::path& out_dir);

// Two-column summary shaped like an ontology editor's metrics panel.
std::string format_stats(const kg::KgStats& stats);

}  // namespace aeroqa::app
