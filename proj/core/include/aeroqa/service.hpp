#pragma once

#include <memory>
#include <string>

#include "aeroqa/engine.hpp"

namespace aeroqa::app {

// HTTP front end: GET /health and POST /ask {"question": ...}. /ask returns
// exactly what `aeroqa ask --json` prints.
class Service {
 public:
  explicit Service(std::shared_ptr<const Engine> engine);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws ConfigError.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void run();
  // Returns once run() is accepting connections.
  void wait_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aeroqa::app
