#include "tmbench/transcript.hpp"

#include <algorithm>
#include <cctype>

namespace tmbench {

const Queue* PredictedTrace::find_step(int i) const {
  auto it = std::lower_bound(steps.begin(), steps.end(), i,
                             [](const auto& p, int v) { return p.first < v; });
  if (it == steps.end() || it->first != i) return nullptr;
  return &it->second;
}

const std::string& prompt_template() {
  // Some lines carry significant trailing spaces; keeping one string literal
  // per line makes every byte explicit.
  static const std::string text =
      "Simulate a m-tag system. Your task is to simulate each transition step-by-step and "
      "provide the queue's state at each step. Follow the rules and examples closely, and stop "
      "upon reaching the halt condition or {MAX_STEPS} steps. Do not generate additional "
      "examples or new problems. No code.\n"
      "\n"
      "## Rules for Simulation:\n"
      "1. In each transition, the machine performs the following steps:\n"
      "\t- If the queue length is less than m, halt\n"
      "\t- Read the head symbol of queue\n"
      "\t- Append symbols to the tail based on the head symbol and the corresponding transition "
      "rule\n"
      "\t- Delete m symbols from the head of the queue\n"
      "\n"
      "2. The machine halt if:\n"
      " - The queue's length is less than m.\n"
      "\n"
      "## Example: \n"
      "m: 2\n"
      "Alphabet: {A, B, C} \n"
      "Init: [B C A]\n"
      "Transition rules:\n"
      "A : C A C\n"
      "B : A\n"
      "C : B\n"
      "Simulation steps:\n"
      "### step 0:\n"
      "   - Action: Init\n"
      "   - Queue State: [B C A]\n"
      "\n"
      "### step 1:\n"
      "   - Head Symbol: B\n"
      "   - Action: Append A to the end of the queue. Remove B C from the head.\n"
      "   - Queue State: [A A]\n"
      "...\n"
      "### step 4:\n"
      "   - Head Symbol: C\n"
      "   - Action: Append B to the end of the queue. Remove C B from the head.\n"
      "   - Queue State: [B] <halt>\n"
      "\n"
      "---\n"
      "\n"
      "## The Only Problem to Solve:\n"
      "m: {m}\n"
      "Alphabet: {ALPHABET}\n"
      "Init: {INIT}\n"
      "Transition Rules:\n"
      "{RULES}\n"
      "Simulation steps:\n";
  return text;
}

namespace {

std::string alphabet_text(const std::vector<Symbol>& alpha) {
  std::string s = "{";
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) s += ", ";
    s += alpha[i];
  }
  s += "}";
  return s;
}

std::string rules_text(const BenchmarkInstance& inst) {
  std::string s;
  for (std::size_t i = 0; i < inst.system.alphabet.size(); ++i) {
    if (i) s += "\n";
    const Symbol& sym = inst.system.alphabet[i];
    s += sym;
    s += " :";
    for (const Symbol& p : inst.system.rules.at(sym)) {
      s += ' ';
      s += p;
    }
  }
  return s;
}

char ascii_lower(char c) {
  return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c;
}

bool ci_match_at(std::string_view line, std::size_t pos, std::string_view lower_needle) {
  if (pos + lower_needle.size() > line.size()) return false;
  for (std::size_t i = 0; i < lower_needle.size(); ++i)
    if (ascii_lower(line[pos + i]) != lower_needle[i]) return false;
  return true;
}

std::size_t ci_find(std::string_view line, std::string_view lower_needle) {
  if (lower_needle.empty() || line.size() < lower_needle.size()) return std::string_view::npos;
  for (std::size_t i = 0; i + lower_needle.size() <= line.size(); ++i)
    if (ci_match_at(line, i, lower_needle)) return i;
  return std::string_view::npos;
}

bool in_set(char c, std::string_view set) { return set.find(c) != std::string_view::npos; }

struct HeaderMatch {
  long long step = 0;
  bool halt = false;
  bool implausible = false;
};

// "### step 12:" and the markdown variants models produce: junk prefix,
// "step" in any case, digits, then only decoration (and optionally <halt>)
// to end of line.
std::optional<HeaderMatch> match_header(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (in_set(line[i], "#*_->.)") || std::isspace(static_cast<unsigned char>(line[i])))) ++i;
  if (!ci_match_at(line, i, "step")) return std::nullopt;
  i += 4;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i >= line.size() || !std::isdigit(static_cast<unsigned char>(line[i]))) return std::nullopt;
  HeaderMatch m;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
    m.step = m.step * 10 + (line[i] - '0');
    if (m.step > 1000000) m.implausible = true, m.step = 1000001;
    ++i;
  }
  while (i < line.size()) {
    if (ci_match_at(line, i, "<halt>")) {
      m.halt = true;
      i += 6;
      continue;
    }
    if (in_set(line[i], "#*_-:.)]") || std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    return std::nullopt;
  }
  return m;
}

std::optional<Queue> match_queue_line(std::string_view line, bool& unterminated) {
  std::size_t q = ci_find(line, "queue");
  if (q == std::string_view::npos) return std::nullopt;
  std::size_t open = line.find('[', q);
  if (open == std::string_view::npos) return std::nullopt;
  std::size_t close = line.find(']', open);
  unterminated = close == std::string_view::npos;
  std::string_view body = unterminated ? line.substr(open + 1)
                                       : line.substr(open + 1, close - open - 1);
  Queue cells;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() &&
           (body[i] == ',' || std::isspace(static_cast<unsigned char>(body[i]))))
      ++i;
    std::size_t start = i;
    while (i < body.size() && body[i] != ',' &&
           !std::isspace(static_cast<unsigned char>(body[i])))
      ++i;
    if (i > start) cells.emplace_back(body.substr(start, i - start));
  }
  return cells;
}

}  // namespace

PromptText render_prompt(const BenchmarkInstance& inst) {
  const std::string& tmpl = prompt_template();
  struct Slot {
    std::string_view token;
    std::string value;
  };
  const Slot slots[] = {
      {"{m}", std::to_string(inst.system.m)},
      {"{ALPHABET}", alphabet_text(inst.system.alphabet)},
      {"{INIT}", queue_to_string(inst.init)},
      {"{RULES}", rules_text(inst)},
      {"{MAX_STEPS}", std::to_string(inst.max_steps)},
  };

  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      bool hit = false;
      for (const Slot& s : slots) {
        if (tmpl.compare(i, s.token.size(), s.token) == 0) {
          out += s.value;
          i += s.token.size();
          hit = true;
          break;
        }
      }
      if (hit) continue;
    }
    out += tmpl[i++];
  }
  return out;
}

PredictedTrace parse_transcript(std::string_view text) {
  PredictedTrace out;
  bool in_block = false, poisoned = false, has_queue = false;
  long long cur_step = 0;
  Queue cur_cells;

  auto claim_halt = [&](long long step) {
    if (out.halt_claimed_at && *out.halt_claimed_at != step)
      out.warnings.push_back("conflicting halt claims (step " +
                             std::to_string(*out.halt_claimed_at) + " then " +
                             std::to_string(step) + "); keeping the last");
    out.halt_claimed_at = static_cast<int>(step);
  };
  auto flush = [&]() {
    if (!in_block) return;
    in_block = false;
    if (poisoned || !has_queue) return;
    if (!out.steps.empty() && cur_step <= out.steps.back().first) {
      out.warnings.push_back("step " + std::to_string(cur_step) +
                             " repeats or goes backwards; keeping the first occurrence");
      return;
    }
    out.steps.emplace_back(static_cast<int>(cur_step), std::move(cur_cells));
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (auto h = match_header(line)) {
      flush();
      in_block = true;
      has_queue = false;
      cur_cells.clear();
      cur_step = h->step;
      poisoned = h->implausible;
      if (poisoned)
        out.warnings.push_back("implausible step index; ignoring that block");
      else if (h->halt)
        claim_halt(cur_step);
      continue;
    }

    bool unterminated = false;
    if (auto cells = match_queue_line(line, unterminated)) {
      if (in_block && !poisoned) {
        if (unterminated)
          out.warnings.push_back("unterminated queue state in step " + std::to_string(cur_step));
        if (has_queue)
          out.warnings.push_back("multiple queue states in step " + std::to_string(cur_step) +
                                 "; keeping the last");
        cur_cells = std::move(*cells);
        has_queue = true;
      } else if (!in_block) {
        out.warnings.push_back("queue state outside any step block");
      }
    }

    if (ci_find(line, "<halt>") != std::string_view::npos) {
      if (in_block && !poisoned)
        claim_halt(cur_step);
      else if (!in_block)
        out.warnings.push_back("halt marker outside any step block");
    }
  }
  flush();
  if (out.steps.empty()) out.warnings.push_back("no steps found");
  return out;
}

std::string format_ground_truth(const BenchmarkInstance& inst) {
  std::string s;
  const auto& steps = inst.trace.steps;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (k) s += "\n";
    s += "### step " + std::to_string(k) + ":\n";
    if (k == 0) {
      s += "- Action: Init\n";
    } else {
      const Queue& prev = steps[k - 1];
      const Symbol& head = prev[0];
      const auto& prod = inst.system.rules.at(head);
      s += "- Head Symbol: " + head + "\n";
      s += "- Action: Append ";
      if (prod.empty()) {
        s += "nothing";
      } else {
        for (std::size_t i = 0; i < prod.size(); ++i) {
          if (i) s += ' ';
          s += prod[i];
        }
      }
      s += " to the end of the queue. Remove ";
      for (int i = 0; i < inst.system.m; ++i) {
        if (i) s += ' ';
        s += prev[static_cast<std::size_t>(i)];
      }
      s += " from the head.\n";
    }
    s += "- Queue State: " + queue_to_string(steps[k]);
    if (inst.trace.halt_step && static_cast<std::size_t>(*inst.trace.halt_step) == k)
      s += " <halt>";
    s += "\n";
  }
  return s;
}

}  // namespace tmbench
