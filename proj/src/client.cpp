#include "tmbench/client.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "tmbench/errors.hpp"
#include "tmbench/io.hpp"
#include "tmbench/transcript.hpp"

namespace tmbench {

using json = nlohmann::json;

void validate_config(const RunnerConfig& cfg) {
  if (cfg.base_url.empty()) throw ConfigError("base_url is required");
  if (cfg.base_url.rfind("http://", 0) != 0 && cfg.base_url.rfind("https://", 0) != 0)
    throw ConfigError("base_url must start with http:// or https://");
  if (cfg.model.empty()) throw ConfigError("model is required");
  if (cfg.api_key_env.empty()) throw ConfigError("api_key_env is required");
  if (cfg.temperature < 0) throw ConfigError("temperature must be non-negative");
  if (cfg.top_p <= 0 || cfg.top_p > 1) throw ConfigError("top_p must be in (0, 1]");
  if (cfg.max_output_tokens < 1) throw ConfigError("max_output_tokens must be positive");
  if (cfg.max_in_flight < 1) throw ConfigError("max_in_flight must be positive");
  if (cfg.timeout_ms < 1) throw ConfigError("timeout_ms must be positive");
  if (cfg.retry.max_attempts < 1) throw ConfigError("max_attempts must be positive");
  if (cfg.retry.initial_backoff_ms < 0) throw ConfigError("initial_backoff_ms must be non-negative");
  if (cfg.retry.multiplier < 1.0) throw ConfigError("backoff multiplier must be at least 1");
}

RunnerConfig load_runner_config(const std::string& path) {
  RunnerConfig cfg;
  std::string text = read_file(path);
  std::size_t pos = 0;
  int line_no = 0;
  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "base_url") cfg.base_url = val;
      else if (key == "api_key_env") cfg.api_key_env = val;
      else if (key == "model") cfg.model = val;
      else if (key == "temperature") cfg.temperature = std::stod(val);
      else if (key == "top_p") cfg.top_p = std::stod(val);
      else if (key == "max_output_tokens") cfg.max_output_tokens = std::stoi(val);
      else if (key == "max_in_flight") cfg.max_in_flight = std::stoi(val);
      else if (key == "timeout_ms") cfg.timeout_ms = std::stoi(val);
      else if (key == "max_attempts") cfg.retry.max_attempts = std::stoi(val);
      else if (key == "initial_backoff_ms") cfg.retry.initial_backoff_ms = std::stoi(val);
      else if (key == "backoff_multiplier") cfg.retry.multiplier = std::stod(val);
      else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key \"" + key + "\"");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": bad value for " + key);
    }
  }
  return cfg;
}

namespace {

bool retryable_status(int status) {
  return status == 408 || status == 429 || (status >= 500 && status <= 599);
}

}  // namespace

CallResult complete(const RunnerConfig& cfg, const std::string& prompt) {
  CallResult result;
  const auto t0 = std::chrono::steady_clock::now();

  json body;
  body["model"] = cfg.model;
  body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = cfg.temperature;
  body["top_p"] = cfg.top_p;
  body["max_tokens"] = cfg.max_output_tokens;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  httplib::Client client(cfg.base_url);
  const auto timeout = std::chrono::milliseconds(cfg.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  double backoff = static_cast<double>(cfg.retry.initial_backoff_ms);
  for (int attempt = 1; attempt <= cfg.retry.max_attempts; ++attempt) {
    result.attempts = attempt;
    httplib::Result res =
        client.Post("/v1/chat/completions", headers, payload, "application/json");

    bool retry = false;
    if (!res) {
      result.error = "transport error: " + httplib::to_string(res.error());
      retry = true;
    } else if (res->status != 200) {
      result.error = "HTTP " + std::to_string(res->status);
      if (!res->body.empty() && res->body.size() <= 512) result.error += ": " + res->body;
      retry = retryable_status(res->status);
    } else {
      try {
        json reply = json::parse(res->body);
        result.response = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        if (reply.contains("usage")) {
          result.usage.prompt_tokens = reply["usage"].value("prompt_tokens", int64_t{0});
          result.usage.completion_tokens = reply["usage"].value("completion_tokens", int64_t{0});
        }
        result.ok = true;
        result.error.clear();
      } catch (const json::exception& e) {
        result.error = std::string("malformed completion payload: ") + e.what();
        retry = false;
      }
    }
    if (result.ok || !retry || attempt == cfg.retry.max_attempts) break;
    if (backoff > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<int64_t>(backoff)));
    backoff *= cfg.retry.multiplier;
  }

  result.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

int run_benchmark(const RunnerConfig& cfg, const std::vector<BenchmarkInstance>& dataset,
                  const std::string& out_path) {
  validate_config(cfg);
  if (dataset.empty()) throw ConfigError("dataset is empty");

  std::set<std::string> done;
  if (std::filesystem::exists(out_path))
    for (const TranscriptRecord& rec : read_transcripts(out_path, /*lenient=*/true))
      done.insert(rec.id);

  std::vector<const BenchmarkInstance*> work;
  for (const BenchmarkInstance& inst : dataset)
    if (!done.count(inst.id)) work.push_back(&inst);
  std::sort(work.begin(), work.end(),
            [](const BenchmarkInstance* a, const BenchmarkInstance* b) { return a->id < b->id; });
  if (work.empty()) return 0;

  std::vector<std::optional<TranscriptRecord>> results(work.size());
  std::atomic<std::size_t> next_item{0};
  std::mutex write_mu;
  std::size_t next_write = 0;
  int written = 0;

  auto worker = [&]() {
    for (;;) {
      std::size_t k = next_item.fetch_add(1);
      if (k >= work.size()) return;
      const BenchmarkInstance& inst = *work[k];
      PromptText prompt = render_prompt(inst);
      CallResult call = complete(cfg, prompt);
      TranscriptRecord rec;
      rec.id = inst.id;
      rec.model = cfg.model;
      rec.prompt = std::move(prompt);
      rec.response = call.response;
      rec.usage = call.usage;
      rec.error = call.error;
      std::lock_guard<std::mutex> lock(write_mu);
      results[k] = std::move(rec);
      while (next_write < results.size() && results[next_write]) {
        append_transcript(out_path, *results[next_write]);
        results[next_write].reset();
        ++next_write;
        ++written;
      }
    }
  };

  std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.max_in_flight), work.size());
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return written;
}

}  // namespace tmbench
