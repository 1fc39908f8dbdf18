#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace fuzzex {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

struct ServiceOptions {
  std::string data_dir;     // where load_dataset looks for <name>.arff
  std::string persist_dir;  // empty: sessions live in memory only
  std::size_t default_symbols = 5;
};

struct Session;

// Conversation sessions: load -> explore -> train -> build -> query. Each
// operation is a thin wrapper over the library call of the same name.
//
// Sessions are independent; calls on one session are serialized.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  std::string create_session();
  bool delete_session(const std::string& id);
  std::vector<std::string> session_ids() const;

  // Runs operation `op` with JSON arguments. Status codes: 200 ok, 400 bad
  // arguments, 404 unknown session/operation/dataset, 409 out-of-order stage.
  // Error bodies are {"error": {"kind", "message"}}.
  ApiResponse call(const std::string& session_id, const std::string& op, const nlohmann::json& args);

  static const std::vector<std::string>& operations();

 private:
  std::shared_ptr<Session> find(const std::string& id) const;
  void persist(const Session& s) const;
  void restore();

  ServiceOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace fuzzex
