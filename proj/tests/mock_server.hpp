#pragma once

// In-process chat-completion endpoint for client tests: binds an ephemeral
// loopback port, serves whatever handler the test registers, and owns the
// listener thread.

#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace mock {

struct Server {
  httplib::Server srv;
  int port = 0;
  std::thread th;

  void start() {
    port = srv.bind_to_any_port("127.0.0.1");
    th = std::thread([this] { srv.listen_after_bind(); });
    srv.wait_until_ready();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port); }

  void stop() {
    srv.stop();
    if (th.joinable()) th.join();
  }

  ~Server() { stop(); }
};

inline std::string completion_json(const std::string& content, long long prompt_tokens = 0,
                                   long long completion_tokens = 0) {
  nlohmann::json j;
  j["choices"] =
      nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
  j["usage"] = {{"prompt_tokens", prompt_tokens}, {"completion_tokens", completion_tokens}};
  return j.dump();
}

}  // namespace mock
