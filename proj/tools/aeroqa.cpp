// aeroqa: build the knowledge graph, ask questions, evaluate, serve.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "aeroqa/build.hpp"
#include "aeroqa/engine.hpp"
#include "aeroqa/error.hpp"
#include "aeroqa/metrics.hpp"
#include "aeroqa/service.hpp"

namespace {

using namespace aeroqa;

constexpr int kUsageError = 2;

// "remote" alone means the endpoint in AEROQA_MODEL_URL.
std::string expand_remote(const std::string& spec) {
  if (spec != "remote") return spec;
  const char* url = std::getenv(std::string(app::kModelUrlEnv).c_str());
  if (url == nullptr || *url == '\0') {
    throw ConfigError("'remote' needs a URL or the " + std::string(app::kModelUrlEnv) + " variable");
  }
  return "remote:" + std::string(url);
}

struct EngineFlags {
  std::string data;
  std::string provider = "hashed";
  std::string reader = "fallback";
  std::string reader_mode = "extractive";
  std::string retriever = "bm25";
  std::size_t k = 5;
  double tau = 0.8;
  double theta = 0.6;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", data, "Directory holding kg.nt and passages.json")->required();
    cmd->add_option("--provider", provider, "hashed | file:PATH | remote[:URL]");
    cmd->add_option("--reader", reader, "fallback | remote[:URL]");
    cmd->add_option("--reader-mode", reader_mode, "extractive | abstractive");
    cmd->add_option("--retriever", retriever, "bm25 | dense");
    cmd->add_option("--k", k, "Passages handed to the reader");
    cmd->add_option("--tau", tau, "Semantic similarity threshold");
    cmd->add_option("--theta", theta, "Entity/relation link threshold");
  }

  app::AppConfig config() const {
    app::AppConfig c;
    c.data_dir = data;
    c.provider = expand_remote(provider);
    c.reader = expand_remote(reader);
    if (reader_mode == "abstractive") {
      c.reader_mode = reader::ReaderMode::Abstractive;
    } else if (reader_mode != "extractive") {
      throw ConfigError("unknown reader mode '" + reader_mode + "'");
    }
    if (retriever == "dense") {
      c.retriever = reader::RetrieverKind::Dense;
    } else if (retriever != "bm25") {
      throw ConfigError("unknown retriever '" + retriever + "'");
    }
    c.k = k;
    c.tau = tau;
    c.theta_link = theta;
    c.validate();
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_build(const std::string& reports, const std::string& patterns, const std::string& taxonomy,
              const std::string& out) {
  app::BuildOptions opts;
  opts.reports_dir = reports;
  opts.patterns = patterns;
  if (!taxonomy.empty()) opts.taxonomy = taxonomy;
  const auto result = app::build_corpus(opts);
  if (!result.ok()) {
    for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
    std::cerr << result.errors.size() << " report(s) failed; nothing written\n";
    return 1;
  }
  app::write_artifacts(result, out);
  std::cout << result.reports << " reports, " << result.passages.size() << " passages, "
            << result.graph.size() << " triples -> " << out << "\n\n"
            << app::format_stats(result.stats);
  return 0;
}

void print_explain(const app::Engine& engine, const std::string& question) {
  const auto t = engine.translate(question);
  std::cout << "type: " << nl2sparql::to_string(t.qtype) << '\n';
  if (t.query_text.empty()) {
    std::cout << "query: (none, KG abstains)\n";
  } else {
    std::cout << "query:\n" << t.query_text << '\n';
  }
  std::size_t shown = 0;
  for (const auto& c : t.triples_used) {
    if (++shown > 5) break;
    std::printf("  %.3f  %s\n", c.rank_score, c.verbalization.c_str());
  }
  std::cout << '\n';
}

void print_answer(const app::Engine& engine, const std::string& question, bool json, bool explain) {
  if (explain) print_explain(engine, question);
  const auto response = engine.ask(question);
  if (json) {
    std::cout << app::response_json(question, response) << '\n';
  } else {
    std::cout << app::render_response(response);
  }
}

int run_ask(const EngineFlags& flags, const std::string& question, bool json, bool explain) {
  const auto engine = app::Engine::load(flags.config());
  if (!question.empty()) {
    print_answer(*engine, question, json, explain);
    return 0;
  }
  std::string line;
  while (true) {
    if (!json) std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line == "quit" || line == "exit") break;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    print_answer(*engine, line, json, explain);
  }
  return 0;
}

int run_eval(const EngineFlags& flags, const std::string& testset_path, const std::string& out) {
  const auto engine = app::Engine::load(flags.config());
  const auto testset = metrics::parse_testset(slurp(testset_path));
  const double tau = engine->config().tau;
  const auto& provider = engine->provider();

  std::vector<metrics::EvalReport> reports;
  reports.push_back(metrics::evaluate(
      "KGQA", [&](const std::string& q) { return engine->kg_only(q); }, testset, provider, tau));
  reports.push_back(metrics::evaluate(
      "DLQA", [&](const std::string& q) { return engine->dl_only(q); }, testset, provider, tau));
  reports.push_back(metrics::evaluate(
      "KGQA + DLQA", [&](const std::string& q) { return engine->ask(q); }, testset, provider, tau));

  const auto table = metrics::format_table(reports);
  std::ofstream(out, std::ios::binary) << metrics::to_json(reports) << '\n';
  std::filesystem::path table_path(out);
  table_path.replace_extension(".txt");
  std::ofstream(table_path, std::ios::binary) << table;
  std::cout << table;
  for (const auto& r : reports) {
    if (r.failures > 0) std::cerr << r.system << ": " << r.failures << " instance(s) failed\n";
  }
  return 0;
}

int run_serve(const EngineFlags& flags, int port) {
  auto config = flags.config();
  config.port = port;
  app::Service service(app::Engine::load(config));
  const int bound = service.bind("0.0.0.0", port);
  spdlog::info("listening on port {}", bound);
  service.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Hybrid knowledge-graph and passage question answering over accident reports"};
  cli.require_subcommand(1);

  std::string reports, patterns, taxonomy, out;
  auto* build = cli.add_subcommand("build", "Build kg.nt and passage files from reports");
  build->add_option("--reports", reports, "Directory of report .txt files")->required();
  build->add_option("--patterns", patterns, "Extraction pattern JSON")->required();
  build->add_option("--taxonomy", taxonomy, "Occurrence taxonomy file");
  build->add_option("--out", out, "Output directory")->required();

  EngineFlags ask_flags;
  std::string question;
  bool json = false;
  auto* ask = cli.add_subcommand("ask", "Answer a question (interactive without QUESTION)");
  ask->add_option("question", question, "Question text");
  ask->add_flag("--json", json, "Print the response as JSON");
  bool explain = false;
  ask->add_flag("--explain", explain, "Show the question type, SPARQL query and top candidate triples");
  ask_flags.attach(ask);

  EngineFlags eval_flags;
  std::string testset, eval_out;
  auto* eval = cli.add_subcommand("eval", "Score KGQA, DLQA and the fused system on a test set");
  eval->add_option("--testset", testset, "Test set JSON")->required();
  eval->add_option("--out", eval_out, "Report JSON path (table goes next to it as .txt)")->required();
  eval_flags.attach(eval);

  EngineFlags serve_flags;
  int port = 8080;
  auto* serve = cli.add_subcommand("serve", "Serve /health and /ask over HTTP");
  serve->add_option("--port", port, "TCP port");
  serve_flags.attach(serve);

  CLI11_PARSE(cli, argc, argv);

  try {
    if (build->parsed()) return run_build(reports, patterns, taxonomy, out);
    if (ask->parsed()) return run_ask(ask_flags, question, json, explain);
    if (eval->parsed()) return run_eval(eval_flags, testset, eval_out);
    if (serve->parsed()) return run_serve(serve_flags, port);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
