#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmbench/generator.hpp"
#include "tmbench/tag_system.hpp"

namespace tmbench {

using PromptText = std::string;

struct PredictedTrace {
  std::vector<std::pair<int, Queue>> steps;  // (step index, cells), indices strictly increasing
  std::optional<int> halt_claimed_at;
  std::vector<std::string> warnings;

  const Queue* find_step(int i) const;
};

// The versioned prompt template with slots {m}, {ALPHABET}, {INIT}, {RULES},
// {MAX_STEPS}. The embedded copy is the default; assets/prompt_template.txt
// is the same bytes (asserted by tests).
const std::string& prompt_template();

PromptText render_prompt(const BenchmarkInstance& inst);

// Total parser: never throws on any byte string. Extracts "### step k:"
// blocks and their final "Queue State: [...]" line; "<halt>" sets
// halt_claimed_at to the enclosing block's step. Out-of-order or duplicate
// step headers keep the first occurrence and add a warning.
PredictedTrace parse_transcript(std::string_view text);

// Renders the ground-truth trace in the response shape the prompt's worked
// example teaches: step blocks with head symbol, action line, queue state,
// and "<halt>" appended at the halt step.
std::string format_ground_truth(const BenchmarkInstance& inst);

}  // namespace tmbench
