#pragma once

#include <memory>
#include <string>

#include "fuzzex/service.h"

namespace fuzzex {

// Port from FUZZEX_PORT, or `fallback` when unset. Throws ConfigError for a
// value that is not a port number.
int port_from_env(int fallback = 8080);

// HTTP+JSON front end for Service. Routes are documented in docs/http_api.md.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fuzzex
