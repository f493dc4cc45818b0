#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmbench/tag_system.hpp"

namespace tmbench {

enum class AlphabetKind { Roman, Numeral, Greek, Special, Custom };

AlphabetKind alphabet_kind_from_name(const std::string& name);
const char* alphabet_kind_name(AlphabetKind kind);

// Deterministic prefix of the kind's canonical ordering. Roman A..Z (26),
// numeral "1".."size" (unbounded), greek lowercase letters (24), special
// punctuation repertoire (18).
std::vector<Symbol> alphabet(AlphabetKind kind, int size);

struct GenConfig {
  int m = 2;
  AlphabetKind kind = AlphabetKind::Roman;
  std::vector<Symbol> custom_alphabet;  // used when kind == Custom
  int alphabet_size = 5;
  int rule_len_min = 1;
  int rule_len_max = 5;
  int init_len_min = 2;
  int init_len_max = 9;
  int max_steps = 30;
  int count = 100;
  uint64_t seed = 0;
  int min_steps = 0;  // 0 = no filter; otherwise skip instances halting before min_steps
};

void validate_config(const GenConfig& cfg);  // throws ConfigError

struct BenchmarkInstance {
  std::string id;
  TagSystem system;
  Queue init;
  int max_steps = 30;
  Trace trace;
  bool halted = false;
  std::optional<int> halt_step;
};

std::string instance_id(uint64_t seed, uint64_t index);

// Pure function of (cfg, index): rule lengths and symbols uniform, init
// length and symbols uniform, each drawn from its own derived stream.
std::pair<TagSystem, Queue> sample_system(const GenConfig& cfg, uint64_t index);

// cfg.count instances at indices 0..count-1, ground truth precomputed. With
// min_steps > 0, indices that halt too early are skipped and sampling
// continues past count-1 until enough instances qualify (ids keep their
// sampling index, so skips remain visible).
std::vector<BenchmarkInstance> generate_dataset(const GenConfig& cfg);

}  // namespace tmbench
