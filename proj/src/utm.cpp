#include "tmbench/utm.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "tmbench/errors.hpp"
#include "tmbench/tag_engine.hpp"

namespace tmbench {

const char* role_text(SymRole role) {
  switch (role) {
    case SymRole::A: return "A";
    case SymRole::X: return "x";
    case SymRole::Alpha: return "alpha";
    case SymRole::B: return "B";
    case SymRole::Beta: return "beta";
    case SymRole::ASwap: return "A";
    case SymRole::AlphaSwap: return "alpha";
    case SymRole::BSwap: return "B";
    case SymRole::BetaSwap: return "beta";
    case SymRole::ARot: return "Ar";
    case SymRole::AlphaRot: return "alphar";
    case SymRole::C: return "C";
    case SymRole::CLow: return "c";
    case SymRole::S: return "S";
    case SymRole::SLow: return "s";
    case SymRole::D1: return "D1";
    case SymRole::D0: return "D0";
    case SymRole::D1Low: return "d1";
    case SymRole::D0Low: return "d0";
    case SymRole::T1: return "T1";
    case SymRole::T0: return "T0";
    case SymRole::T1Low: return "t1";
    case SymRole::T0Low: return "t0";
  }
  return "?";
}

namespace {

bool is_swap_family(SymRole r) {
  return r == SymRole::ASwap || r == SymRole::AlphaSwap || r == SymRole::BSwap ||
         r == SymRole::BetaSwap;
}

Symbol render_symbol(SymRole role, const std::string& state_name) {
  Symbol s = role_text(role);
  s += '_';
  s += state_name;
  if (is_swap_family(role)) s += '~';
  return s;
}

constexpr SymRole kDirectEntry[] = {SymRole::A, SymRole::Alpha, SymRole::B, SymRole::Beta};
constexpr SymRole kSwappedEntry[] = {SymRole::ASwap, SymRole::AlphaSwap, SymRole::BSwap,
                                     SymRole::BetaSwap};
constexpr SymRole kRot[] = {SymRole::ARot, SymRole::AlphaRot};
constexpr SymRole kPipeline[] = {SymRole::C,  SymRole::CLow, SymRole::S,  SymRole::SLow,
                                 SymRole::D1, SymRole::D0,   SymRole::D1Low, SymRole::D0Low,
                                 SymRole::T1, SymRole::T0,   SymRole::T1Low, SymRole::T0Low};

struct StatePlan {
  bool halting = false;
  bool has_direct = false;
  bool has_swapped = false;
  bool has_rot = false;
};

}  // namespace

int TagProgram::state_index(const std::string& name) const {
  for (std::size_t i = 0; i < state_names.size(); ++i)
    if (state_names[i] == name) return static_cast<int>(i);
  throw MalformedInput("unknown TM state: " + name);
}

const Symbol& TagProgram::sym(SymRole role, int state) const {
  auto it = symbol_of.find(SymKey{role, state});
  if (it == symbol_of.end()) throw Error("symbol not emitted: " + render_symbol(role, state_names[static_cast<std::size_t>(state)]));
  return it->second;
}

TagProgram compile(const TuringMachine& tm) {
  TagProgram prog;
  prog.system.m = 2;

  std::unordered_map<std::string, int> index;
  for (const TmState& st : tm.states) {
    if (!valid_symbol_text(st.name) || st.name.find('~') != std::string::npos)
      throw MalformedInput("invalid state name: " + st.name);
    if (!index.emplace(st.name, static_cast<int>(prog.state_names.size())).second)
      throw MalformedInput("duplicate state: " + st.name);
    prog.state_names.push_back(st.name);
    prog.state_halting.push_back(false);
    if (st.write_bit != 0 && st.write_bit != 1)
      throw MalformedInput("write bit must be 0 or 1 for state " + st.name);
  }
  for (const std::string& h : tm.halting) {
    if (!valid_symbol_text(h) || h.find('~') != std::string::npos)
      throw MalformedInput("invalid state name: " + h);
    if (!index.emplace(h, static_cast<int>(prog.state_names.size())).second)
      throw MalformedInput("duplicate state: " + h);
    prog.state_names.push_back(h);
    prog.state_halting.push_back(true);
  }
  auto resolve = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw MalformedInput("reference to undefined state: " + name);
    return it->second;
  };
  if (tm.start.empty()) throw MalformedInput("start state not set");
  resolve(tm.start);

  const int n_states = static_cast<int>(prog.state_names.size());
  const int n_plain = static_cast<int>(tm.states.size());
  std::vector<StatePlan> plan(static_cast<std::size_t>(n_states));
  for (int i = 0; i < n_states; ++i) plan[static_cast<std::size_t>(i)].halting = prog.state_halting[static_cast<std::size_t>(i)];

  // Aligned entry family: direct for right-movers, swapped for left-movers.
  for (int i = 0; i < n_plain; ++i) {
    if (tm.states[static_cast<std::size_t>(i)].dir == Direction::Right)
      plan[static_cast<std::size_t>(i)].has_direct = true;
    else
      plan[static_cast<std::size_t>(i)].has_swapped = true;
  }
  // Emission targets: a right-mover hands its successor a direct-family word,
  // a left-mover a swapped-family one.
  for (const TmState& st : tm.states) {
    int t0 = resolve(st.next0), t1 = resolve(st.next1);
    for (int t : {t0, t1}) {
      if (st.dir == Direction::Right)
        plan[static_cast<std::size_t>(t)].has_direct = true;
      else
        plan[static_cast<std::size_t>(t)].has_swapped = true;
    }
  }
  for (int i = 0; i < n_states; ++i) {
    StatePlan& p = plan[static_cast<std::size_t>(i)];
    if (p.halting) {
      if (!p.has_direct && !p.has_swapped) p.has_direct = true;  // unreachable halting state: keep it encodable
    } else {
      // A word can arrive in the family opposite to the pipeline's; the
      // rotation pair realigns it.
      bool aligned_direct = tm.states[static_cast<std::size_t>(i)].dir == Direction::Right;
      p.has_rot = aligned_direct ? p.has_swapped : p.has_direct;
    }
  }

  prog.entry_convention.resize(static_cast<std::size_t>(n_states), EntryFamily::Direct);
  for (int i = 0; i < n_states; ++i) {
    const StatePlan& p = plan[static_cast<std::size_t>(i)];
    if (p.halting)
      prog.entry_convention[static_cast<std::size_t>(i)] = p.has_direct ? EntryFamily::Direct : EntryFamily::Swapped;
    else
      prog.entry_convention[static_cast<std::size_t>(i)] =
          tm.states[static_cast<std::size_t>(i)].dir == Direction::Right ? EntryFamily::Direct : EntryFamily::Swapped;
  }

  auto emit = [&](SymRole role, int state) {
    Symbol s = render_symbol(role, prog.state_names[static_cast<std::size_t>(state)]);
    if (!prog.symbol_of.emplace(SymKey{role, state}, s).second) throw Error("duplicate symbol key");
    if (!prog.key_of.emplace(s, SymKey{role, state}).second)
      throw MalformedInput("state names collide after symbol rendering: " + s);
    prog.system.alphabet.push_back(s);
  };

  for (int i = 0; i < n_states; ++i) {
    const StatePlan& p = plan[static_cast<std::size_t>(i)];
    if (p.has_direct)
      for (SymRole r : kDirectEntry) emit(r, i);
    if (p.has_swapped)
      for (SymRole r : kSwappedEntry) emit(r, i);
    if (p.has_rot)
      for (SymRole r : kRot) emit(r, i);
    if (!p.halting)
      for (SymRole r : kPipeline) emit(r, i);
    emit(SymRole::X, i);
  }

  auto word = [&](std::initializer_list<std::pair<SymRole, int>> parts) {
    std::vector<Symbol> w;
    for (auto [r, s] : parts) w.push_back(prog.sym(r, s));
    return w;
  };
  auto rule = [&](SymRole r, int s, std::vector<Symbol> w) {
    prog.system.rules[prog.sym(r, s)] = std::move(w);
  };

  for (int i = 0; i < n_states; ++i) {
    const StatePlan& p = plan[static_cast<std::size_t>(i)];
    rule(SymRole::X, i, word({{SymRole::X, i}}));
    if (p.halting) {
      if (p.has_direct)
        for (SymRole r : kDirectEntry) rule(r, i, {});
      if (p.has_swapped)
        for (SymRole r : kSwappedEntry) rule(r, i, {});
      continue;
    }

    const TmState& st = tm.states[static_cast<std::size_t>(i)];
    const int q0 = resolve(st.next0), q1 = resolve(st.next1);
    const bool right = st.dir == Direction::Right;

    // Phase-1 entry production: C x, plus a leading c x when the written bit
    // is 1 (the new low bit of the doubled counter).
    std::vector<Symbol> entry = st.write_bit == 1
        ? word({{SymRole::C, i}, {SymRole::X, i}, {SymRole::CLow, i}, {SymRole::X, i}})
        : word({{SymRole::C, i}, {SymRole::X, i}});
    std::vector<Symbol> pair_cc =
        word({{SymRole::CLow, i}, {SymRole::X, i}, {SymRole::CLow, i}, {SymRole::X, i}});

    SymRole ea = right ? SymRole::A : SymRole::ASwap;
    SymRole eal = right ? SymRole::Alpha : SymRole::AlphaSwap;
    SymRole eb = right ? SymRole::B : SymRole::BSwap;
    SymRole ebe = right ? SymRole::Beta : SymRole::BetaSwap;
    rule(ea, i, entry);
    rule(eal, i, pair_cc);
    rule(eb, i, word({{SymRole::S, i}}));
    rule(ebe, i, word({{SymRole::SLow, i}}));

    if (p.has_rot) {
      // Misaligned family: rotate the leading half to the back, then run the
      // pipeline off the trailing half. The rotated copies take over the
      // B/beta duties of phase 2.
      SymRole ma = right ? SymRole::ASwap : SymRole::A;
      SymRole mal = right ? SymRole::AlphaSwap : SymRole::Alpha;
      SymRole mb = right ? SymRole::BSwap : SymRole::B;
      SymRole mbe = right ? SymRole::BetaSwap : SymRole::Beta;
      rule(ma, i, word({{SymRole::ARot, i}, {SymRole::X, i}}));
      rule(mal, i, word({{SymRole::AlphaRot, i}, {SymRole::X, i}}));
      rule(mb, i, entry);
      rule(mbe, i, pair_cc);
      rule(SymRole::ARot, i, word({{SymRole::S, i}}));
      rule(SymRole::AlphaRot, i, word({{SymRole::SLow, i}}));
    }

    rule(SymRole::C, i, word({{SymRole::D1, i}, {SymRole::D0, i}}));
    rule(SymRole::CLow, i, word({{SymRole::D1Low, i}, {SymRole::D0Low, i}}));
    rule(SymRole::S, i, word({{SymRole::T1, i}, {SymRole::T0, i}}));
    rule(SymRole::SLow, i, word({{SymRole::T1Low, i}, {SymRole::T0Low, i}}));

    // Successor emission; the odd branch fires when the trailing counter is
    // odd. D0 carries the extra x pad the even branch consumes.
    SymRole sa = right ? SymRole::A : SymRole::ASwap;
    SymRole sal = right ? SymRole::Alpha : SymRole::AlphaSwap;
    SymRole sb = right ? SymRole::B : SymRole::BSwap;
    SymRole sbe = right ? SymRole::Beta : SymRole::BetaSwap;
    rule(SymRole::D1, i, word({{sa, q1}, {SymRole::X, q1}}));
    rule(SymRole::D0, i, word({{SymRole::X, q0}, {sa, q0}, {SymRole::X, q0}}));
    rule(SymRole::D1Low, i, word({{sal, q1}, {SymRole::X, q1}}));
    rule(SymRole::D0Low, i, word({{sal, q0}, {SymRole::X, q0}}));
    rule(SymRole::T1, i, word({{sb, q1}, {SymRole::X, q1}}));
    rule(SymRole::T0, i, word({{sb, q0}, {SymRole::X, q0}}));
    rule(SymRole::T1Low, i, word({{sbe, q1}, {SymRole::X, q1}}));
    rule(SymRole::T0Low, i, word({{sbe, q0}, {SymRole::X, q0}}));
  }

  return prog;
}

Queue encode_config(const TagProgram& prog, const TmConfig& cfg) {
  int i = prog.state_index(cfg.state);
  EntryFamily fam = prog.entry_convention[static_cast<std::size_t>(i)];
  bool direct = fam == EntryFamily::Direct;
  SymRole a = direct ? SymRole::A : SymRole::ASwap;
  SymRole al = direct ? SymRole::Alpha : SymRole::AlphaSwap;
  SymRole b = direct ? SymRole::B : SymRole::BSwap;
  SymRole be = direct ? SymRole::Beta : SymRole::BetaSwap;
  uint64_t first = direct ? cfg.left : cfg.right;
  uint64_t second = direct ? cfg.right : cfg.left;

  Queue q;
  q.reserve(2 * (first + second) + 4);
  const Symbol& x = prog.sym(SymRole::X, i);
  q.push_back(prog.sym(a, i));
  q.push_back(x);
  for (uint64_t k = 0; k < first; ++k) {
    q.push_back(prog.sym(al, i));
    q.push_back(x);
  }
  q.push_back(prog.sym(b, i));
  q.push_back(x);
  for (uint64_t k = 0; k < second; ++k) {
    q.push_back(prog.sym(be, i));
    q.push_back(x);
  }
  return q;
}

namespace {

// Id-level view of a compiled program, built once and reused across cycles.
struct CompiledTables {
  TagEngine engine;
  std::vector<uint8_t> entry_a;  // ids that can head a canonical word
  struct Info {
    SymRole role = SymRole::X;
    int state = -1;
  };
  std::vector<Info> info;
  struct EntryIds {
    int32_t a = -1, alpha = -1, b = -1, beta = -1;
  };
  std::vector<EntryIds> direct_ids, swapped_ids;
  std::vector<int32_t> x_ids;

  explicit CompiledTables(const TagProgram& prog) : engine(prog.system) {
    std::size_t n = engine.alphabet_size();
    entry_a.assign(n, 0);
    info.resize(n);
    std::size_t ns = prog.state_names.size();
    direct_ids.resize(ns);
    swapped_ids.resize(ns);
    x_ids.assign(ns, -1);
    for (const auto& [key, sym] : prog.symbol_of) {
      int32_t id = engine.id_of(sym);
      info[static_cast<std::size_t>(id)] = {key.role, key.state};
      auto si = static_cast<std::size_t>(key.state);
      switch (key.role) {
        case SymRole::A: entry_a[static_cast<std::size_t>(id)] = 1; direct_ids[si].a = id; break;
        case SymRole::Alpha: direct_ids[si].alpha = id; break;
        case SymRole::B: direct_ids[si].b = id; break;
        case SymRole::Beta: direct_ids[si].beta = id; break;
        case SymRole::ASwap: entry_a[static_cast<std::size_t>(id)] = 1; swapped_ids[si].a = id; break;
        case SymRole::AlphaSwap: swapped_ids[si].alpha = id; break;
        case SymRole::BSwap: swapped_ids[si].b = id; break;
        case SymRole::BetaSwap: swapped_ids[si].beta = id; break;
        case SymRole::X: x_ids[si] = id; break;
        default: break;
      }
    }
  }

  // Pattern match A x (alpha x)^p B x (beta x)^q against a random-access
  // window; family and state come from the head symbol.
  template <class View>
  std::optional<TmConfig> decode(const View& at, std::size_t n, const TagProgram& prog) const {
    if (n < 4) return std::nullopt;
    auto head = static_cast<std::size_t>(at(0));
    const Info& in = info[head];
    bool swapped;
    if (in.role == SymRole::A) swapped = false;
    else if (in.role == SymRole::ASwap) swapped = true;
    else return std::nullopt;
    auto si = static_cast<std::size_t>(in.state);
    const EntryIds& ids = swapped ? swapped_ids[si] : direct_ids[si];
    const int32_t x = x_ids[si];
    if (at(1) != x) return std::nullopt;
    std::size_t pos = 2;
    uint64_t first = 0;
    while (pos + 1 < n && at(pos) == ids.alpha) {
      if (at(pos + 1) != x) return std::nullopt;
      first++;
      pos += 2;
    }
    if (pos + 1 >= n || at(pos) != ids.b || at(pos + 1) != x) return std::nullopt;
    pos += 2;
    uint64_t second = 0;
    while (pos + 1 < n && at(pos) == ids.beta) {
      if (at(pos + 1) != x) return std::nullopt;
      second++;
      pos += 2;
    }
    if (pos != n) return std::nullopt;
    TmConfig cfg;
    cfg.state = prog.state_names[si];
    cfg.left = swapped ? second : first;
    cfg.right = swapped ? first : second;
    return cfg;
  }
};

// One emulation cycle at id level: step until the head lands on an entry-A
// symbol again. Returns tag steps spent.
template <class Cell>
uint64_t cycle_ids(IdRun<Cell>& run, const CompiledTables& tab, uint64_t budget) {
  uint64_t used = 0;
  for (;;) {
    uint64_t room = budget - used;
    if (room == 0) throw CycleError(CycleError::Kind::BudgetExhausted, "cycle exceeded tag-step budget");
    std::size_t k = run.step_run(static_cast<std::size_t>(std::min<uint64_t>(room, 1u << 20)));
    if (k == 0) throw CycleError(CycleError::Kind::TagHalt, "tag-level halt inside cycle (halting-state word)");
    used += k;
    if (run.size() > 0 && tab.entry_a[static_cast<std::size_t>(run.head_symbol())]) return used;
  }
}

template <class Cell>
CycleResult run_cycle_typed(const CompiledTables& tab, const Queue& word, uint64_t budget) {
  IdRun<Cell> run(tab.engine);
  run.reset(tab.engine.intern(word));
  uint64_t used = cycle_ids(run, tab, budget);
  return {tab.engine.externalize(run.snapshot()), used};
}

template <class Cell>
VerifyOutcome verify_typed(const TuringMachine& tm, const TagProgram& prog,
                           const CompiledTables& tab, const TmConfig& start, int steps) {
  VerifyOutcome out;
  TmConfig cfg = start;
  IdRun<Cell> run(tab.engine);
  run.reset(tab.engine.intern(encode_config(prog, cfg)));
  auto view = [&run](std::size_t i) { return static_cast<int32_t>(run.at(i)); };

  for (int k = 0; k < steps; ++k) {
    std::optional<TmConfig> next = tm_step(tm, cfg);
    if (!next) {
      out.pass = true;
      out.halted_at = out.tm_steps;
      out.detail = "halted at step " + std::to_string(out.tm_steps);
      return out;
    }
    uint64_t budget = 8 * (cfg.left + cfg.right) + 64;
    try {
      out.tag_steps += cycle_ids(run, tab, budget);
    } catch (const CycleError& e) {
      out.detail = "step " + std::to_string(k + 1) + ": " + e.what();
      return out;
    }
    std::optional<TmConfig> dec = tab.decode(view, run.size(), prog);
    if (!dec) {
      out.detail = "step " + std::to_string(k + 1) + ": cycle ended on a non-canonical word";
      return out;
    }
    if (!(*dec == *next)) {
      out.detail = "step " + std::to_string(k + 1) + ": decoded (" + dec->state + "," +
                   std::to_string(dec->left) + "," + std::to_string(dec->right) +
                   ") expected (" + next->state + "," + std::to_string(next->left) + "," +
                   std::to_string(next->right) + ")";
      return out;
    }
    cfg = *next;
    out.tm_steps = k + 1;
  }
  out.pass = true;
  return out;
}

bool fits_u8(const CompiledTables& tab) { return tab.engine.alphabet_size() <= 255; }

}  // namespace

std::optional<TmConfig> decode_word(const TagProgram& prog, const Queue& q) {
  CompiledTables tab(prog);
  std::vector<int32_t> ids;
  ids.reserve(q.size());
  for (const Symbol& s : q) {
    auto it = prog.key_of.find(s);
    if (it == prog.key_of.end()) return std::nullopt;
    ids.push_back(tab.engine.id_of(s));
  }
  auto view = [&ids](std::size_t i) { return ids[i]; };
  return tab.decode(view, ids.size(), prog);
}

std::optional<TmConfig> tm_step(const TuringMachine& tm, const TmConfig& cfg) {
  for (const std::string& h : tm.halting)
    if (h == cfg.state) return std::nullopt;
  const TmState* st = nullptr;
  for (const TmState& s : tm.states)
    if (s.name == cfg.state) {
      st = &s;
      break;
    }
  if (!st) throw MalformedInput("unknown TM state: " + cfg.state);
  if (cfg.left > (UINT64_MAX >> 1) || cfg.right > (UINT64_MAX >> 1))
    throw Error("tape counter overflow");
  TmConfig next;
  if (st->dir == Direction::Right) {
    next.state = (cfg.right & 1) ? st->next1 : st->next0;
    next.left = 2 * cfg.left + static_cast<uint64_t>(st->write_bit);
    next.right = cfg.right >> 1;
  } else {
    next.state = (cfg.left & 1) ? st->next1 : st->next0;
    next.right = 2 * cfg.right + static_cast<uint64_t>(st->write_bit);
    next.left = cfg.left >> 1;
  }
  return next;
}

CycleResult run_cycle(const TagProgram& prog, const Queue& word, uint64_t budget) {
  CompiledTables tab(prog);
  if (fits_u8(tab)) return run_cycle_typed<uint8_t>(tab, word, budget);
  return run_cycle_typed<int32_t>(tab, word, budget);
}

VerifyOutcome verify_equivalence(const TuringMachine& tm, const TmConfig& start, int steps) {
  TagProgram prog = compile(tm);
  CompiledTables tab(prog);
  if (fits_u8(tab)) return verify_typed<uint8_t>(tm, prog, tab, start, steps);
  return verify_typed<int32_t>(tm, prog, tab, start, steps);
}

}  // namespace tmbench
