#include "tmbench/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tmbench/errors.hpp"

namespace tmbench {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInput("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MalformedInput("cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("short write: " + path);
}

namespace {

ordered_json system_to_json(const TagSystem& sys) {
  ordered_json j;
  j["m"] = sys.m;
  j["alphabet"] = sys.alphabet;
  ordered_json rules = ordered_json::object();
  for (const Symbol& s : sys.alphabet) {
    auto it = sys.rules.find(s);
    rules[s] = it == sys.rules.end() ? std::vector<Symbol>{} : it->second;
  }
  j["rules"] = rules;
  return j;
}

TagSystem system_from_json(const json& j) {
  TagSystem sys;
  sys.m = j.at("m").get<int>();
  sys.alphabet = j.at("alphabet").get<std::vector<Symbol>>();
  for (const auto& [key, val] : j.at("rules").items())
    sys.rules[key] = val.get<std::vector<Symbol>>();
  return sys;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

std::string instance_to_jsonl_line(const BenchmarkInstance& inst) {
  ordered_json j;
  j["id"] = inst.id;
  j["m"] = inst.system.m;
  j["alphabet"] = inst.system.alphabet;
  ordered_json rules = ordered_json::object();
  for (const Symbol& s : inst.system.alphabet) rules[s] = inst.system.rules.at(s);
  j["rules"] = rules;
  j["init"] = inst.init;
  j["max_steps"] = inst.max_steps;
  j["trace"] = inst.trace.steps;
  j["halted"] = inst.halted;
  if (inst.halt_step)
    j["halt_step"] = *inst.halt_step;
  else
    j["halt_step"] = nullptr;
  return j.dump();
}

BenchmarkInstance instance_from_jsonl_line(const std::string& line) {
  json j = parse_json(line, "dataset line");
  try {
    BenchmarkInstance inst;
    inst.id = j.at("id").get<std::string>();
    inst.system.m = j.at("m").get<int>();
    inst.system.alphabet = j.at("alphabet").get<std::vector<Symbol>>();
    for (const auto& [key, val] : j.at("rules").items())
      inst.system.rules[key] = val.get<std::vector<Symbol>>();
    inst.init = j.at("init").get<Queue>();
    inst.max_steps = j.at("max_steps").get<int>();
    inst.trace.steps = j.at("trace").get<std::vector<Queue>>();
    inst.halted = j.at("halted").get<bool>();
    if (!j.at("halt_step").is_null()) inst.halt_step = j.at("halt_step").get<int>();
    inst.trace.halt_step = inst.halt_step;
    inst.trace.truncated = !inst.halted;
    return inst;
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset line: ") + e.what());
  }
}

void write_dataset(const std::string& path, const std::vector<BenchmarkInstance>& ds) {
  std::string out;
  for (const BenchmarkInstance& inst : ds) {
    out += instance_to_jsonl_line(inst);
    out += '\n';
  }
  write_file(path, out);
}

std::vector<BenchmarkInstance> read_dataset(const std::string& path) {
  std::string text = read_file(path);
  std::vector<BenchmarkInstance> ds;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      ds.push_back(instance_from_jsonl_line(line));
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what(), line_no);
    }
  }
  return ds;
}

SystemFile read_system_file(const std::string& path) {
  json j = parse_json(read_file(path), path);
  try {
    SystemFile sf;
    sf.system = system_from_json(j);
    if (j.contains("init")) sf.init = j.at("init").get<Queue>();
    if (j.contains("max_steps")) sf.max_steps = j.at("max_steps").get<int>();
    return sf;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_system_file(const std::string& path, const SystemFile& sf) {
  ordered_json j = system_to_json(sf.system);
  j["init"] = sf.init;
  j["max_steps"] = sf.max_steps;
  write_file(path, j.dump(2) + "\n");
}

std::string transcript_to_jsonl_line(const TranscriptRecord& rec) {
  ordered_json j;
  j["id"] = rec.id;
  j["model"] = rec.model;
  j["prompt"] = rec.prompt;
  j["response"] = rec.response;
  j["usage"] = {{"prompt_tokens", rec.usage.prompt_tokens},
                {"completion_tokens", rec.usage.completion_tokens}};
  if (!rec.error.empty()) j["error"] = rec.error;
  return j.dump();
}

TranscriptRecord transcript_from_jsonl_line(const std::string& line) {
  json j = parse_json(line, "transcript line");
  try {
    TranscriptRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.model = j.at("model").get<std::string>();
    rec.prompt = j.at("prompt").get<std::string>();
    rec.response = j.at("response").get<std::string>();
    if (j.contains("usage")) {
      rec.usage.prompt_tokens = j["usage"].value("prompt_tokens", int64_t{0});
      rec.usage.completion_tokens = j["usage"].value("completion_tokens", int64_t{0});
    }
    rec.error = j.value("error", std::string{});
    return rec;
  } catch (const json::exception& e) {
    throw ParseError(std::string("transcript line: ") + e.what());
  }
}

void append_transcript(const std::string& path, const TranscriptRecord& rec) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw MalformedInput("cannot open file for append: " + path);
  std::string line = transcript_to_jsonl_line(rec);
  line += '\n';
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.flush();
  if (!out) throw Error("short write: " + path);
}

std::vector<TranscriptRecord> read_transcripts(const std::string& path, bool lenient) {
  std::string text = read_file(path);
  std::vector<TranscriptRecord> recs;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      recs.push_back(transcript_from_jsonl_line(line));
    } catch (const ParseError& e) {
      if (!lenient) throw ParseError(path + ": " + e.what(), line_no);
    }
  }
  return recs;
}

TuringMachine parse_tm_text(const std::string& text) {
  TuringMachine tm;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool start_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "start") {
      if (tok.size() != 2) throw ParseError("start takes exactly one state name", line_no);
      if (start_seen) throw ParseError("duplicate start directive", line_no);
      tm.start = tok[1];
      start_seen = true;
    } else if (tok[0] == "halt") {
      if (tok.size() < 2) throw ParseError("halt needs at least one state name", line_no);
      for (std::size_t i = 1; i < tok.size(); ++i) tm.halting.push_back(tok[i]);
    } else {
      if (tok.size() != 5)
        throw ParseError("expected: <state> <write-bit> <L|R> <next0> <next1>", line_no);
      TmState st;
      st.name = tok[0];
      if (tok[1] == "0")
        st.write_bit = 0;
      else if (tok[1] == "1")
        st.write_bit = 1;
      else
        throw ParseError("write bit must be 0 or 1, got \"" + tok[1] + "\"", line_no);
      if (tok[2] == "L" || tok[2] == "l")
        st.dir = Direction::Left;
      else if (tok[2] == "R" || tok[2] == "r")
        st.dir = Direction::Right;
      else
        throw ParseError("direction must be L or R, got \"" + tok[2] + "\"", line_no);
      st.next0 = tok[3];
      st.next1 = tok[4];
      tm.states.push_back(std::move(st));
    }
  }
  if (!start_seen) throw ParseError("missing start directive");
  return tm;
}

TuringMachine read_tm_file(const std::string& path) {
  try {
    return parse_tm_text(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line);
  }
}

namespace {

std::string role_tag(SymRole r) {
  std::string tag = role_text(r);
  switch (r) {
    case SymRole::ASwap:
    case SymRole::AlphaSwap:
    case SymRole::BSwap:
    case SymRole::BetaSwap: tag += '~'; break;
    default: break;
  }
  return tag;
}

SymRole role_from_tag(const std::string& tag) {
  static const std::pair<const char*, SymRole> table[] = {
      {"A", SymRole::A},        {"x", SymRole::X},
      {"alpha", SymRole::Alpha}, {"B", SymRole::B},
      {"beta", SymRole::Beta},  {"A~", SymRole::ASwap},
      {"alpha~", SymRole::AlphaSwap}, {"B~", SymRole::BSwap},
      {"beta~", SymRole::BetaSwap}, {"Ar", SymRole::ARot},
      {"alphar", SymRole::AlphaRot}, {"C", SymRole::C},
      {"c", SymRole::CLow},     {"S", SymRole::S},
      {"s", SymRole::SLow},     {"D1", SymRole::D1},
      {"D0", SymRole::D0},      {"d1", SymRole::D1Low},
      {"d0", SymRole::D0Low},   {"T1", SymRole::T1},
      {"T0", SymRole::T0},      {"t1", SymRole::T1Low},
      {"t0", SymRole::T0Low},
  };
  for (const auto& [k, v] : table)
    if (tag == k) return v;
  throw ParseError("unknown symbol role: " + tag);
}

}  // namespace

void write_program(const std::string& base_path, const TagProgram& prog) {
  write_file(base_path + ".system.json", system_to_json(prog.system).dump(2) + "\n");

  ordered_json j;
  j["states"] = prog.state_names;
  std::vector<bool> halting(prog.state_halting.begin(), prog.state_halting.end());
  j["halting"] = halting;
  std::vector<std::string> conv;
  for (EntryFamily f : prog.entry_convention)
    conv.push_back(f == EntryFamily::Direct ? "direct" : "swapped");
  j["convention"] = conv;
  ordered_json syms = ordered_json::array();
  for (const auto& [key, sym] : prog.symbol_of) {
    ordered_json e;
    e["role"] = role_tag(key.role);
    e["state"] = key.state;
    e["symbol"] = sym;
    syms.push_back(e);
  }
  j["symbols"] = syms;
  write_file(base_path + ".symbols.json", j.dump(2) + "\n");
}

TagProgram read_program(const std::string& base_path) {
  TagProgram prog;
  prog.system = system_from_json(parse_json(read_file(base_path + ".system.json"), base_path));
  json j = parse_json(read_file(base_path + ".symbols.json"), base_path);
  try {
    prog.state_names = j.at("states").get<std::vector<std::string>>();
    auto halting = j.at("halting").get<std::vector<bool>>();
    prog.state_halting.assign(halting.begin(), halting.end());
    for (const auto& c : j.at("convention"))
      prog.entry_convention.push_back(c.get<std::string>() == "direct" ? EntryFamily::Direct
                                                                       : EntryFamily::Swapped);
    for (const auto& e : j.at("symbols")) {
      SymKey key{role_from_tag(e.at("role").get<std::string>()), e.at("state").get<int>()};
      Symbol sym = e.at("symbol").get<Symbol>();
      prog.symbol_of[key] = sym;
      prog.key_of[sym] = key;
    }
    return prog;
  } catch (const json::exception& e) {
    throw ParseError(base_path + ": " + e.what());
  }
}

void write_report(const std::string& path, const ScoreReport& rep) {
  ordered_json j;
  j["model"] = rep.model;
  j["dataset_id"] = rep.dataset_id;
  j["n_instances"] = rep.n_instances;
  ordered_json curve = ordered_json::array();
  for (const StepAccuracyPoint& p : rep.acc_curve) {
    ordered_json e;
    e["step"] = p.step;
    e["acc"] = p.acc;
    e["n_total"] = p.n_total;
    e["n_correct"] = p.n_correct;
    curve.push_back(e);
  }
  j["acc_curve"] = curve;
  j["swa_uniform"] = rep.swa_uniform;
  j["swa_linear"] = rep.swa_linear;
  j["pass_rate"] = rep.pass_rate;
  ordered_json per = ordered_json::object();
  for (const auto& [id, score] : rep.per_instance) {
    ordered_json e;
    e["passed"] = score.passed;
    if (score.first_error_step)
      e["first_error_step"] = *score.first_error_step;
    else
      e["first_error_step"] = nullptr;
    per[id] = e;
  }
  j["per_instance"] = per;
  write_file(path, j.dump(2) + "\n");
}

ScoreReport read_report(const std::string& path) {
  json j = parse_json(read_file(path), path);
  try {
    ScoreReport rep;
    rep.model = j.at("model").get<std::string>();
    rep.dataset_id = j.at("dataset_id").get<std::string>();
    rep.n_instances = j.at("n_instances").get<int>();
    for (const auto& e : j.at("acc_curve"))
      rep.acc_curve.push_back({e.at("step").get<int>(), e.at("acc").get<double>(),
                               e.at("n_total").get<int>(), e.at("n_correct").get<int>()});
    rep.swa_uniform = j.at("swa_uniform").get<double>();
    rep.swa_linear = j.at("swa_linear").get<double>();
    rep.pass_rate = j.at("pass_rate").get<double>();
    for (const auto& [id, e] : j.at("per_instance").items()) {
      InstanceScore s;
      s.passed = e.at("passed").get<bool>();
      if (!e.at("first_error_step").is_null())
        s.first_error_step = e.at("first_error_step").get<int>();
      rep.per_instance[id] = s;
    }
    return rep;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_acc_curve_csv(const std::string& path, const ScoreReport& rep) {
  std::string out = "step,acc,n_total,n_correct\n";
  for (const StepAccuracyPoint& p : rep.acc_curve) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d,%.10g,%d,%d\n", p.step, p.acc, p.n_total, p.n_correct);
    out += buf;
  }
  write_file(path, out);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  throw ParseError("no such column: " + name);
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  int c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (static_cast<std::size_t>(c) >= row.size())
      throw ParseError("row too short for column " + name);
    try {
      out.push_back(std::stod(row[static_cast<std::size_t>(c)]));
    } catch (const std::exception&) {
      throw ParseError("non-numeric value in column " + name + ": \"" +
                       row[static_cast<std::size_t>(c)] + "\"");
    }
  }
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::string text = read_file(path);
  CsvTable table;
  std::size_t pos = 0;
  bool header_done = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (!header_done) {
      table.header = std::move(cells);
      header_done = true;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  if (!header_done) throw ParseError(path + ": no header line");
  return table;
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace tmbench
