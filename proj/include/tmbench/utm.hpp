#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmbench/tag_system.hpp"

namespace tmbench {

enum class Direction { Left, Right };

// Binary-alphabet Turing machine in write-move-read form: in state i the
// machine writes write_bit, moves one cell in dir, reads the bit b under the
// new head position, and enters next0/next1 accordingly.
struct TmState {
  std::string name;
  int write_bit = 0;
  Direction dir = Direction::Right;
  std::string next0;
  std::string next1;
};

struct TuringMachine {
  std::vector<TmState> states;        // non-halting states, in declaration order
  std::vector<std::string> halting;   // names; carry no transition record
  std::string start;
};

// Instantaneous description (state, left, right): the tape halves on each
// side of the head read as binary integers, least significant bit nearest
// the head. The cell under the head is not represented; it is written before
// it could ever be read.
struct TmConfig {
  std::string state;
  uint64_t left = 0;
  uint64_t right = 0;
  bool operator==(const TmConfig&) const = default;
};

// Roles of compiled tag symbols. A/Alpha/B/Beta head the canonical word's two
// counter halves; the Swap variants store the counters in (right, left)
// order; the Rot pair implements the half-rotation that realigns a word whose
// counter order does not match the state's pipeline.
enum class SymRole : uint8_t {
  A, X, Alpha, B, Beta,
  ASwap, AlphaSwap, BSwap, BetaSwap,
  ARot, AlphaRot,
  C, CLow, S, SLow,
  D1, D0, D1Low, D0Low,
  T1, T0, T1Low, T0Low,
};

const char* role_text(SymRole role);

enum class EntryFamily { Direct, Swapped };

struct SymKey {
  SymRole role;
  int state;  // index into TagProgram::state_names
  auto operator<=>(const SymKey&) const = default;
};

struct TagProgram {
  TagSystem system;  // m = 2
  std::vector<std::string> state_names;  // non-halting first, then halting
  std::vector<bool> state_halting;
  std::vector<EntryFamily> entry_convention;  // family used by encode_config
  std::map<SymKey, Symbol> symbol_of;
  std::map<Symbol, SymKey> key_of;

  int state_index(const std::string& name) const;
  const Symbol& sym(SymRole role, int state) const;
};

// Emits the full production system for tm: per non-halting state the six
// phase families, with direction handled by which entry family (direct or
// swapped) feeds the pipeline and which one routes through the rotation
// pair. Halting states get entry symbols with empty productions.
TagProgram compile(const TuringMachine& tm);

Queue encode_config(const TagProgram& prog, const TmConfig& cfg);

// Recognizes both entry families of every state; returns the normalized
// (state, left, right) or nullopt when the word is not canonical.
std::optional<TmConfig> decode_word(const TagProgram& prog, const Queue& q);

// One TM step on the counter representation; nullopt when cfg.state is
// halting. Rightward: left' = 2*left + S, right' = floor(right/2), branch on
// right's parity; leftward mirrors with the roles of left and right swapped.
std::optional<TmConfig> tm_step(const TuringMachine& tm, const TmConfig& cfg);

struct CycleResult {
  Queue word;
  uint64_t tag_steps = 0;
};

// Runs tag steps until the head lands on an entry-A symbol again (skipping
// the starting word) and returns that canonical word. Throws CycleError on
// budget exhaustion or a tag-level halt (the word of a halting state shrinks
// away if cycled).
CycleResult run_cycle(const TagProgram& prog, const Queue& word, uint64_t budget);

struct VerifyOutcome {
  bool pass = false;
  int tm_steps = 0;                 // TM steps checked in lockstep
  std::optional<int> halted_at;     // set when the machine halted before `steps`
  uint64_t tag_steps = 0;           // total tag steps spent
  std::string detail;               // first divergence, empty on pass
};

// Lockstep check: compiles tm, then for `steps` TM steps compares
// decode(cycle(word)) against tm_step on the counter side.
VerifyOutcome verify_equivalence(const TuringMachine& tm, const TmConfig& start, int steps);

}  // namespace tmbench
