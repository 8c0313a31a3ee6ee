#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace aeroqa::testing {

std::filesystem::path data_dir() { return AEROQA_DATA_DIR; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

const app::BuildResult& fixture_build() {
  static const app::BuildResult result = [] {
    app::BuildOptions opts;
    opts.reports_dir = data_dir() / "reports";
    opts.patterns = data_dir() / "patterns.json";
    opts.taxonomy = data_dir() / "taxonomy.txt";
    return app::build_corpus(opts);
  }();
  return result;
}

std::shared_ptr<const app::Engine> fixture_engine() {
  static const auto engine = std::make_shared<const app::Engine>(
      fixture_build().graph, fixture_build().passages, app::AppConfig{});
  return engine;
}

TempDir::TempDir() {
  std::random_device rd;
  const auto tag = std::to_string(rd()) + std::to_string(rd());
  path_ = std::filesystem::temp_directory_path() / ("aeroqa-test-" + tag);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace aeroqa::testing
