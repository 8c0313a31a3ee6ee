#include "aeroqa/build.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "aeroqa/error.hpp"
#include "aeroqa/text.hpp"
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

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

nlohmann::ordered_json terms_json(const std::vector<ontology::TermScore>& terms) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& t : terms) {
    arr.push_back({{"term", t.text()}, {"score", t.score}, {"frequency", t.frequency}});
  }
  return arr;
}

}  // namespace

BuildResult build_corpus(const BuildOptions& options) {
  BuildResult result;
  const auto patterns = ingest::load_patterns(options.patterns);
  std::optional<ontology::TaxonomyTree> taxonomy;
  if (options.taxonomy) {
    try {
      taxonomy = ontology::load_taxonomy(read_file(*options.taxonomy));
    } catch (const ParseError& e) {
      throw ConfigError(options.taxonomy->string() + ": " + e.what());
    }
  }

  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(options.reports_dir)) {
    throw ConfigError("reports directory " + options.reports_dir.string() + " does not exist");
  }
  for (const auto& entry : std::filesystem::directory_iterator(options.reports_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, ingest::ReportRecord> records;
  std::map<std::string, std::string> origin;
  for (const auto& f : files) {
    const auto name = f.filename().string();
    try {
      auto rec = ingest::parse_report(read_file(f));
      const auto id = rec.accident_number;
      if (records.contains(id)) {
        result.errors.push_back(name + ": accident number " + id + " already used by " + origin[id]);
        continue;
      }
      origin[id] = name;
      records.emplace(id, std::move(rec));
    } catch (const Error& e) {
      result.errors.push_back(name + ": " + e.what());
    }
  }
  result.reports = records.size();

  const auto type = kg::Term::iri(std::string(kg::kType));
  const auto sub_class_of = kg::Term::iri(std::string(kg::kSubClassOf));
  const auto label = kg::Term::iri(std::string(kg::kLabel));
  std::vector<ontology::Document> documents;
  for (const auto& [id, rec] : records) {
    for (const auto& t : ingest::extract_triples(rec, patterns)) result.graph.insert(t);

    if (taxonomy) {
      const auto it = rec.fields.find(options.occurrence_field);
      if (it != rec.fields.end()) {
        try {
          auto mapping = ontology::map_event_keywords(it->second, *taxonomy);
          const auto& labels = mapping.path.labels;
          const auto accident = kg::mint_iri(kg::kInstNs, id);
          result.graph.insert({accident, type, kg::mint_iri(kg::kClassNs, labels.back())});
          for (std::size_t i = 0; i < labels.size(); ++i) {
            const auto cls = kg::mint_iri(kg::kClassNs, labels[i]);
            result.graph.insert({cls, label, kg::Term::literal(labels[i])});
            if (i > 0) result.graph.insert({cls, sub_class_of, kg::mint_iri(kg::kClassNs, labels[i - 1])});
          }
          result.mappings.push_back(std::move(mapping));
        } catch (const NoMentionError&) {
        }
      }
    }

    for (auto& p : ingest::extract_passages(rec)) {
      documents.push_back(text::content_tokens(p.text));
      result.passages.push_back(std::move(p));
    }
  }

  if (!documents.empty()) {
    result.tfidf_terms = ontology::tfidf(documents);
    result.cvalue_terms = ontology::cvalue(documents);
    if (result.tfidf_terms.size() > options.top_terms) result.tfidf_terms.resize(options.top_terms);
    if (result.cvalue_terms.size() > options.top_terms) result.cvalue_terms.resize(options.top_terms);
  }
  result.stats = kg::stats(result.graph);
  return result;
}

void write_artifacts(const BuildResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "kg.nt", kg::serialize(result.graph));
  write_file(out_dir / "passages.json",
             ingest::export_passages(result.passages, ingest::PassageFormat::Json) + "\n");
  write_file(out_dir / "passages.jsonl",
             ingest::export_passages(result.passages, ingest::PassageFormat::Jsonl));
  nlohmann::ordered_json terms;
  terms["tfidf"] = terms_json(result.tfidf_terms);
  terms["cvalue"] = terms_json(result.cvalue_terms);
  write_file(out_dir / "terms.json", terms.dump(2) + "\n");
}

std::string format_stats(const kg::KgStats& s) {
  std::ostringstream out;
  const auto row = [&](const char* name, std::size_t v) {
    out << name << std::string(20 - std::string_view(name).size(), ' ') << v << '\n';
  };
  row("Entity classes", s.entity_classes);
  row("Individuals", s.individuals);
  row("Object properties", s.object_properties);
  row("Data properties", s.data_properties);
  row("Axioms", s.axioms);
  return out.str();
}

}  // namespace aeroqa::app
