#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"

#include "fgen/api.hpp"
#include "fgen/api_http.hpp"
#include "fgen/catalog.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Formation migration decision service", "formation-genius-server"};
  std::string catalogPath, host = "127.0.0.1", logDir;
  int port = 8080;
  int ttlMinutes = 240;
  app.add_option("--catalog", catalogPath)->required();
  app.add_option("--host", host);
  app.add_option("--port", port);
  app.add_option("--log-dir", logDir, "Append each session's event log to <dir>/<id>.jsonl");
  app.add_option("--session-ttl", ttlMinutes, "Idle minutes before a session expires");
  CLI11_PARSE(app, argc, argv);

  std::shared_ptr<const fgen::Catalog> catalog;
  try {
    catalog = std::make_shared<const fgen::Catalog>(fgen::load_catalog(catalogPath));
  } catch (const fgen::Error& e) {
    std::cerr << "cannot load catalog '" << catalogPath << "': " << e.what() << '\n';
    return 2;
  }
  for (const auto& w : catalog->warnings()) std::cerr << "warning: " << w << '\n';

  fgen::api::Config config;
  config.sessionTtl = std::chrono::minutes(ttlMinutes);
  if (!logDir.empty()) config.logDir = logDir;
  fgen::api::Service service(catalog, config);

  httplib::Server server;
  fgen::api::mount(server, service);
  if (!server.bind_to_port(host, port)) {
    std::cerr << "cannot listen on " << host << ':' << port
              << " (port in use or not permitted; try --port)\n";
    return 1;
  }
  std::cerr << "listening on http://" << host << ':' << port << '\n';
  server.listen_after_bind();
  return 0;
}
