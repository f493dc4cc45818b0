#pragma once

// Seeded random binary TMs for equivalence fuzzing: 2-4 working states, both
// directions, 1-2 halting states, transition targets drawn over all states so
// halting is reachable.

#include <string>

#include "tmbench/rng.hpp"
#include "tmbench/utm.hpp"

namespace oracle {

using tmbench::Direction;
using tmbench::SplitMix64;
using tmbench::TmState;
using tmbench::TuringMachine;

inline TuringMachine sample_tm(SplitMix64& rng) {
  TuringMachine tm;
  const int n = static_cast<int>(rng.range(2, 4));
  const int h = static_cast<int>(rng.range(1, 2));
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("Q" + std::to_string(i));
  for (int i = 0; i < h; ++i) tm.halting.push_back("H" + std::to_string(i));
  std::vector<std::string> targets = names;
  targets.insert(targets.end(), tm.halting.begin(), tm.halting.end());
  for (int i = 0; i < n; ++i) {
    TmState st;
    st.name = names[static_cast<std::size_t>(i)];
    st.write_bit = static_cast<int>(rng.below(2));
    st.dir = rng.below(2) ? Direction::Right : Direction::Left;
    st.next0 = targets[rng.below(targets.size())];
    st.next1 = targets[rng.below(targets.size())];
    tm.states.push_back(std::move(st));
  }
  tm.start = names[0];
  return tm;
}

}  // namespace oracle
