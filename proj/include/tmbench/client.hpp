#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmbench/generator.hpp"

namespace tmbench {

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 500;
  double multiplier = 2.0;
};

struct RunnerConfig {
  std::string base_url;                          // e.g. "http://127.0.0.1:8080"
  std::string api_key_env = "TMBENCH_API_KEY";   // key read from this env var, never from files
  std::string model;
  double temperature = 0.0;
  double top_p = 1.0;
  int max_output_tokens = 16384;
  int max_in_flight = 4;
  int timeout_ms = 120000;
  RetryPolicy retry;
};

void validate_config(const RunnerConfig& cfg);  // throws ConfigError

// key=value lines, '#' comments. Unknown keys are errors.
RunnerConfig load_runner_config(const std::string& path);

struct TokenUsage {
  int64_t prompt_tokens = 0;
  int64_t completion_tokens = 0;
};

struct CallResult {
  std::string response;
  std::string error;  // exactly one of response/error is meaningful
  bool ok = false;
  int attempts = 0;
  double latency_ms = 0;
  TokenUsage usage;
};

// One chat-completion call. Retries transport errors, 408/429 and 5xx with
// exponential backoff; other HTTP errors (401 included) are terminal on the
// first response. Never throws for per-call failures.
CallResult complete(const RunnerConfig& cfg, const std::string& prompt);

struct TranscriptRecord {
  std::string id;
  std::string model;
  std::string prompt;
  std::string response;
  TokenUsage usage;
  std::string error;  // empty when the call succeeded
};

// Renders prompts, dispatches with at most max_in_flight concurrent calls,
// appends records to out_path ordered by instance id. Ids already present in
// the file are skipped, so interrupted runs resume. Returns the number of
// records written by this call.
int run_benchmark(const RunnerConfig& cfg, const std::vector<BenchmarkInstance>& dataset,
                  const std::string& out_path);

}  // namespace tmbench
