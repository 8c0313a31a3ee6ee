#include "aeroqa/service.hpp"

#include <spdlog/spdlog.h>

#include "aeroqa/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace aeroqa::app {
namespace {

std::string error_body(const std::string& message) {
  return nlohmann::json{{"error", message}}.dump();
}

}  // namespace

struct Service::Impl {
  std::shared_ptr<const Engine> engine;
  httplib::Server server;
};

Service::Service(std::shared_ptr<const Engine> engine) : impl_(std::make_unique<Impl>()) {
  impl_->engine = std::move(engine);
  auto& srv = impl_->server;

  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });

  srv.Post("/ask", [this](const httplib::Request& req, httplib::Response& res) {
    std::string question;
    try {
      const auto doc = nlohmann::json::parse(req.body);
      question = doc.at("question").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      res.status = 400;
      res.set_content(error_body(std::string("expected {\"question\": string}: ") + e.what()),
                      "application/json");
      return;
    }
    if (question.find_first_not_of(" \t\r\n") == std::string::npos) {
      res.status = 400;
      res.set_content(error_body("question is empty"), "application/json");
      return;
    }
    try {
      const auto response = impl_->engine->ask(question);
      res.set_content(response_json(question, response), "application/json");
    } catch (const std::exception& e) {
      spdlog::error("/ask failed: {}", e.what());
      res.status = 500;
      res.set_content(error_body(e.what()), "application/json");
    }
  });
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    const int bound = srv.bind_to_any_port(host);
    if (bound <= 0) throw ConfigError("cannot bind " + host);
    return bound;
  }
  if (!srv.bind_to_port(host, port)) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::wait_ready() const { impl_->server.wait_until_ready(); }

void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace aeroqa::app
