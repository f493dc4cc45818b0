#include "tmbench/generator.hpp"

#include <cstdio>
#include <unordered_set>

#include "tmbench/errors.hpp"
#include "tmbench/rng.hpp"

namespace tmbench {

namespace {

const std::vector<Symbol>& roman_repertoire() {
  static const std::vector<Symbol> v = [] {
    std::vector<Symbol> r;
    for (char c = 'A'; c <= 'Z'; ++c) r.emplace_back(1, c);
    return r;
  }();
  return v;
}

const std::vector<Symbol>& greek_repertoire() {
  static const std::vector<Symbol> v = {
      "α", "β", "γ", "δ", "ε", "ζ", "η", "θ", "ι", "κ", "λ", "μ",
      "ν", "ξ", "ο", "π", "ρ", "σ", "τ", "υ", "φ", "χ", "ψ", "ω"};
  return v;
}

const std::vector<Symbol>& special_repertoire() {
  static const std::vector<Symbol> v = {"@", "#", "$", "%", "&", "*", "+", "=", "?",
                                        "!", "^", "~", ";", ":", "/", "|", "<", ">"};
  return v;
}

// Stream keys: one independent draw sequence per sampled aspect.
enum Field : uint64_t {
  kRuleLen = 1,
  kRuleSym = 2,
  kInitLen = 3,
  kInitSym = 4,
};

}  // namespace

AlphabetKind alphabet_kind_from_name(const std::string& name) {
  if (name == "roman") return AlphabetKind::Roman;
  if (name == "numeral") return AlphabetKind::Numeral;
  if (name == "greek") return AlphabetKind::Greek;
  if (name == "special") return AlphabetKind::Special;
  if (name == "custom") return AlphabetKind::Custom;
  throw ConfigError("unknown alphabet kind: " + name);
}

const char* alphabet_kind_name(AlphabetKind kind) {
  switch (kind) {
    case AlphabetKind::Roman: return "roman";
    case AlphabetKind::Numeral: return "numeral";
    case AlphabetKind::Greek: return "greek";
    case AlphabetKind::Special: return "special";
    case AlphabetKind::Custom: return "custom";
  }
  return "?";
}

std::vector<Symbol> alphabet(AlphabetKind kind, int size) {
  if (size < 1) throw ConfigError("alphabet size must be at least 1");
  auto prefix = [&](const std::vector<Symbol>& rep) {
    if (static_cast<std::size_t>(size) > rep.size())
      throw ConfigError(std::string(alphabet_kind_name(kind)) + " alphabet has only " +
                        std::to_string(rep.size()) + " symbols");
    return std::vector<Symbol>(rep.begin(), rep.begin() + size);
  };
  switch (kind) {
    case AlphabetKind::Roman: return prefix(roman_repertoire());
    case AlphabetKind::Greek: return prefix(greek_repertoire());
    case AlphabetKind::Special: return prefix(special_repertoire());
    case AlphabetKind::Numeral: {
      std::vector<Symbol> v;
      v.reserve(static_cast<std::size_t>(size));
      for (int i = 1; i <= size; ++i) v.push_back(std::to_string(i));
      return v;
    }
    case AlphabetKind::Custom:
      throw ConfigError("custom alphabets have no canonical ordering; pass the symbols directly");
  }
  throw ConfigError("unknown alphabet kind");
}

void validate_config(const GenConfig& cfg) {
  if (cfg.m < 1) throw ConfigError("m must be at least 1");
  if (cfg.count < 0) throw ConfigError("count must be non-negative");
  if (cfg.rule_len_min < 0 || cfg.rule_len_max < cfg.rule_len_min)
    throw ConfigError("rule length bounds must satisfy 0 <= min <= max");
  if (cfg.init_len_min < 1 || cfg.init_len_max < cfg.init_len_min)
    throw ConfigError("init length bounds must satisfy 1 <= min <= max");
  if (cfg.max_steps < 1) throw ConfigError("max_steps must be at least 1");
  if (cfg.min_steps < 0) throw ConfigError("min_steps must be non-negative");
  if (cfg.kind == AlphabetKind::Custom) {
    if (cfg.custom_alphabet.empty()) throw ConfigError("custom alphabet is empty");
    std::unordered_set<Symbol> seen;
    for (const Symbol& s : cfg.custom_alphabet) {
      if (!valid_symbol_text(s)) throw ConfigError("invalid custom symbol: \"" + s + "\"");
      if (!seen.insert(s).second) throw ConfigError("duplicate custom symbol: " + s);
    }
  } else {
    alphabet(cfg.kind, cfg.alphabet_size);
  }
}

std::string instance_id(uint64_t seed, uint64_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "tm-%llu-%05llu", static_cast<unsigned long long>(seed),
                static_cast<unsigned long long>(index));
  return buf;
}

std::pair<TagSystem, Queue> sample_system(const GenConfig& cfg, uint64_t index) {
  std::vector<Symbol> alpha = cfg.kind == AlphabetKind::Custom
                                  ? cfg.custom_alphabet
                                  : alphabet(cfg.kind, cfg.alphabet_size);
  const uint64_t n = alpha.size();

  TagSystem sys;
  sys.m = cfg.m;
  sys.alphabet = alpha;

  SplitMix64 rule_len = stream(cfg.seed, index, kRuleLen);
  SplitMix64 rule_sym = stream(cfg.seed, index, kRuleSym);
  for (const Symbol& s : alpha) {
    uint64_t len = static_cast<uint64_t>(cfg.rule_len_min) +
                   rule_len.below(static_cast<uint64_t>(cfg.rule_len_max - cfg.rule_len_min) + 1);
    std::vector<Symbol> prod;
    prod.reserve(len);
    for (uint64_t i = 0; i < len; ++i) prod.push_back(alpha[rule_sym.below(n)]);
    sys.rules.emplace(s, std::move(prod));
  }

  SplitMix64 init_len = stream(cfg.seed, index, kInitLen);
  SplitMix64 init_sym = stream(cfg.seed, index, kInitSym);
  uint64_t len = static_cast<uint64_t>(cfg.init_len_min) +
                 init_len.below(static_cast<uint64_t>(cfg.init_len_max - cfg.init_len_min) + 1);
  Queue init;
  init.reserve(len);
  for (uint64_t i = 0; i < len; ++i) init.push_back(alpha[init_sym.below(n)]);

  return {std::move(sys), std::move(init)};
}

std::vector<BenchmarkInstance> generate_dataset(const GenConfig& cfg) {
  validate_config(cfg);
  std::vector<BenchmarkInstance> out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  const uint64_t attempt_cap =
      1000 + 200 * static_cast<uint64_t>(cfg.count);  // min_steps filter runaway guard
  uint64_t index = 0;
  while (out.size() < static_cast<std::size_t>(cfg.count)) {
    if (index >= attempt_cap)
      throw ConfigError("min_steps=" + std::to_string(cfg.min_steps) +
                        " rejects nearly every sampled system; relax the filter");
    auto [sys, init] = sample_system(cfg, index);
    Trace trace = run(sys, init, cfg.max_steps);
    if (cfg.min_steps > 0 && trace.halt_step && *trace.halt_step < cfg.min_steps) {
      ++index;
      continue;
    }
    BenchmarkInstance inst;
    inst.id = instance_id(cfg.seed, index);
    inst.system = std::move(sys);
    inst.init = std::move(init);
    inst.max_steps = cfg.max_steps;
    inst.halted = trace.halt_step.has_value();
    inst.halt_step = trace.halt_step;
    inst.trace = std::move(trace);
    out.push_back(std::move(inst));
    ++index;
  }
  return out;
}

}  // namespace tmbench
