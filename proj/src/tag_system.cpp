#include "tmbench/tag_system.hpp"

#include <unordered_set>

#include "tmbench/errors.hpp"

namespace tmbench {

bool valid_symbol_text(const Symbol& s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (c == '[' || c == ']' || c == ',') return false;
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') return false;
  }
  return true;
}

Validation validate_system(const TagSystem& sys) {
  Validation v;
  if (sys.m < 1) v.violations.push_back("m must be >= 1");
  std::unordered_set<Symbol> seen;
  for (const Symbol& s : sys.alphabet) {
    if (!valid_symbol_text(s))
      v.violations.push_back("invalid symbol text: \"" + s + "\"");
    if (!seen.insert(s).second)
      v.violations.push_back("duplicate alphabet symbol: " + s);
  }
  for (const Symbol& s : sys.alphabet) {
    auto it = sys.rules.find(s);
    if (it == sys.rules.end()) {
      v.violations.push_back("missing rule for symbol: " + s);
      continue;
    }
    for (const Symbol& p : it->second)
      if (!seen.count(p))
        v.violations.push_back("rule for " + s + " uses symbol outside alphabet: " + p);
  }
  for (const auto& [s, _] : sys.rules)
    if (!seen.count(s)) v.violations.push_back("rule for symbol outside alphabet: " + s);
  return v;
}

StepOutcome step(const TagSystem& sys, const Queue& q) {
  if (q.size() < static_cast<std::size_t>(sys.m)) return {true, q};
  auto it = sys.rules.find(q[0]);
  if (it == sys.rules.end()) throw MalformedInput("symbol not in alphabet: " + q[0]);
  Queue next(q.begin() + sys.m, q.end());
  next.insert(next.end(), it->second.begin(), it->second.end());
  return {false, std::move(next)};
}

Trace run(const TagSystem& sys, const Queue& init, int max_steps) {
  Trace t;
  t.steps.push_back(init);
  for (int i = 0; i < max_steps; ++i) {
    StepOutcome out = step(sys, t.steps.back());
    if (out.halted) {
      t.halt_step = i;  // i transitions happened; the i-th check found |q| < m
      return t;
    }
    t.steps.push_back(std::move(out.queue));
  }
  if (t.steps.back().size() < static_cast<std::size_t>(sys.m))
    t.halt_step = static_cast<int>(t.steps.size()) - 1;
  else
    t.truncated = true;
  return t;
}

std::string queue_to_string(const Queue& q) {
  std::string out = "[";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += ' ';
    out += q[i];
  }
  out += ']';
  return out;
}

}  // namespace tmbench
