#include "fuzzex/http_server.h"

#include <cstdlib>
#include <string>

#include "httplib.h"

#include "fuzzex/errors.h"

namespace fuzzex {

using json = nlohmann::json;

int port_from_env(int fallback) {
  const char* v = std::getenv("FUZZEX_PORT");
  if (!v || !*v) return fallback;
  try {
    std::size_t pos = 0;
    const int port = std::stoi(v, &pos);
    if (pos == std::string(v).size() && port > 0 && port < 65536) return port;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("FUZZEX_PORT is not a valid port: '") + v + "'");
}

namespace {

void send(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

// Query-string values that read as numbers are passed on as numbers.
json params_to_json(const httplib::Params& params) {
  json out = json::object();
  for (const auto& [k, v] : params) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (!v.empty() && end && *end == '\0') {
      if (v.find_first_of(".eE") == std::string::npos) {
        out[k] = std::stoll(v);
      } else {
        out[k] = d;
      }
    } else {
      out[k] = v;
    }
  }
  return out;
}

std::string op_name(std::string segment) {
  for (auto& c : segment) {
    if (c == '-') c = '_';
  }
  return segment;
}

}  // namespace

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  explicit Impl(Service& s) : service(s) {}
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  Service& svc = impl_->service;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  srv.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });

  srv.Post("/api/sessions", [&svc](const httplib::Request&, httplib::Response& res) {
    send(res, {201, {{"session_id", svc.create_session()}}});
  });

  srv.Get("/api/sessions", [&svc](const httplib::Request&, httplib::Response& res) {
    send(res, {200, {{"sessions", svc.session_ids()}}});
  });

  srv.Get(R"(/api/sessions/([0-9a-f]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.call(req.matches[1], "state", json::object()));
  });

  srv.Delete(R"(/api/sessions/([0-9a-f]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    if (svc.delete_session(req.matches[1])) {
      send(res, {200, {{"deleted", std::string(req.matches[1])}}});
    } else {
      send(res, {404, {{"error", {{"kind", "not_found"}, {"message", "unknown session"}}}}});
    }
  });

  srv.Get(R"(/api/sessions/([0-9a-f]+)/([a-z_-]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.call(req.matches[1], op_name(req.matches[2]), params_to_json(req.params)));
  });

  srv.Post(R"(/api/sessions/([0-9a-f]+)/([a-z_-]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    json body = json::object();
    if (!req.body.empty()) {
      body = json::parse(req.body, nullptr, false);
      if (body.is_discarded()) {
        send(res, {400, {{"error", {{"kind", "validation"}, {"message", "request body is not valid JSON"}}}}});
        return;
      }
    }
    send(res, svc.call(req.matches[1], op_name(req.matches[2]), body));
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    send(res, {500, {{"error", {{"kind", "internal"}, {"message", msg}}}}});
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace fuzzex
