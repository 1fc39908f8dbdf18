// HTTP service for the chat client. Port from FUZZEX_PORT (default 8080).
#include <csignal>
#include <iostream>

#include "CLI11.hpp"

#include "fuzzex/errors.h"
#include "fuzzex/http_server.h"

namespace {
fuzzex::HttpServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fuzzex HTTP service"};
  fuzzex::ServiceOptions opts;
  opts.data_dir = FUZZEX_DEFAULT_DATA_DIR;
  std::string host = "127.0.0.1";
  app.add_option("--data-dir", opts.data_dir, "folder searched for <name>.arff")->capture_default_str();
  app.add_option("--persist-dir", opts.persist_dir, "write session snapshots here");
  app.add_option("--symbols", opts.default_symbols, "default terms per numeric feature")->capture_default_str();
  app.add_option("--host", host, "bind address")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const int port = fuzzex::port_from_env();
    fuzzex::Service service(opts);
    fuzzex::HttpServer server(service);
    if (server.bind(host, port) < 0) {
      std::cerr << "error: cannot bind " << host << ":" << port << "\n";
      return 1;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    server.listen();
    g_server = nullptr;
  } catch (const fuzzex::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
