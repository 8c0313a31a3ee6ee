#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "aeroqa/build.hpp"
#include "aeroqa/engine.hpp"

namespace aeroqa::testing {

std::filesystem::path data_dir();
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Bundled corpus built once per process with the bundled patterns and taxonomy.
const app::BuildResult& fixture_build();

// Engine over fixture_build() with default configuration (hashed provider,
// fallback reader).
std::shared_ptr<const app::Engine> fixture_engine();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace aeroqa::testing
