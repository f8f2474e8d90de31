#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "provis/flights.hpp"
#include "provis/server.hpp"

using namespace provis;

namespace {
HttpServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Provenance-backed visualization server"};
  ServerConfig cfg;
  std::size_t max_body_mb = cfg.max_body_bytes >> 20;
  std::string preload;
  app.add_option("--host", cfg.host, "listen address")->envname("PROVIS_HOST")->capture_default_str();
  app.add_option("--port", cfg.port, "listen port, 0 for any")->envname("PROVIS_PORT")->capture_default_str();
  app.add_option("--max-body-mb", max_body_mb, "largest request body")->envname("PROVIS_MAX_BODY_MB")->capture_default_str();
  app.add_option("--max-rows", cfg.max_rows, "largest uploaded table")->envname("PROVIS_MAX_ROWS")->capture_default_str();
  app.add_option("--timeout", cfg.request_timeout_seconds, "request read/write timeout in seconds")
      ->envname("PROVIS_TIMEOUT")
      ->capture_default_str();
  app.add_option("--preload", preload, "flight dataset directory to register at startup")
      ->envname("PROVIS_PRELOAD")
      ->check(CLI::ExistingDirectory);
  CLI11_PARSE(app, argc, argv);
  cfg.max_body_bytes = max_body_mb << 20;

  Api api(cfg);
  try {
    if (!preload.empty()) {
      const auto id = api.add_dataset(preload, load_flight_dataset(preload));
      std::cout << "preloaded " << preload << " as " << id << std::endl;
    }
  } catch (const std::exception& e) {
    std::cerr << "provis_server: " << e.what() << '\n';
    return 1;
  }
  HttpServer server(api);
  const int port = server.bind();
  if (port < 0) {
    std::cerr << "provis_server: cannot bind " << cfg.host << ':' << cfg.port << '\n';
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << cfg.host << ':' << port << std::endl;
  return server.listen() ? 0 : 1;
}
