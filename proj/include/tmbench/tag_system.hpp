#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tmbench {

// A symbol is an atomic token. Valid symbol text is non-empty and contains
// no whitespace, commas, or square brackets; multi-character symbols such
// as "alpha_Q0" are fine. Enforced by validate_system and at parse
// boundaries, not by the type itself.
using Symbol = std::string;
using Queue = std::vector<Symbol>;

bool valid_symbol_text(const Symbol& s);

// An m-tag system: read the head symbol, append its production to the tail,
// delete m symbols from the head. Halts when the queue holds fewer than m
// symbols.
struct TagSystem {
  int m = 2;
  std::vector<Symbol> alphabet;  // ordered; order drives serialization
  std::unordered_map<Symbol, std::vector<Symbol>> rules;
};

struct Validation {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks m >= 1, symbol well-formedness, alphabet distinctness, rule
// totality, and that every production symbol is in the alphabet.
Validation validate_system(const TagSystem& sys);

struct StepOutcome {
  bool halted;  // true exactly when the input queue had fewer than m symbols
  Queue queue;  // successor queue, or the final queue unchanged when halted
};

// Single transition. Requires a validated system; a queue symbol outside the
// alphabet raises MalformedInput.
StepOutcome step(const TagSystem& sys, const Queue& q);

// Full run record. steps[0] is the initial queue. Exactly one of halt_step /
// truncated describes the end: halt_step == steps.size() - 1 when the system
// halted, truncated when the step budget ran out first.
struct Trace {
  std::vector<Queue> steps;
  std::optional<int> halt_step;
  bool truncated = false;
};

Trace run(const TagSystem& sys, const Queue& init, int max_steps);

// Textual queue form used throughout: "[B A E E C]", "[]" when empty.
std::string queue_to_string(const Queue& q);

}  // namespace tmbench
