#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tmbench/rng.hpp"
#include "tmbench/client.hpp"
#include "tmbench/errors.hpp"
#include "tmbench/generator.hpp"
#include "tmbench/io.hpp"
#include "tmbench/metrics.hpp"
#include "tmbench/tag_system.hpp"
#include "tmbench/transcript.hpp"
#include "tmbench/utm.hpp"

namespace {

using namespace tmbench;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t p = s.find(sep, start);
    if (p == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

GenConfig load_gen_config(const std::string& path) {
  GenConfig cfg;
  std::string text = read_file(path);
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "count") cfg.count = std::stoi(val);
      else if (key == "m") cfg.m = std::stoi(val);
      else if (key == "alphabet") cfg.kind = alphabet_kind_from_name(val);
      else if (key == "alphabet_size") cfg.alphabet_size = std::stoi(val);
      else if (key == "rule_len_min") cfg.rule_len_min = std::stoi(val);
      else if (key == "rule_len_max") cfg.rule_len_max = std::stoi(val);
      else if (key == "init_len_min") cfg.init_len_min = std::stoi(val);
      else if (key == "init_len_max") cfg.init_len_max = std::stoi(val);
      else if (key == "max_steps") cfg.max_steps = std::stoi(val);
      else if (key == "min_steps") cfg.min_steps = std::stoi(val);
      else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key \"" + key + "\"");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": bad value for " + key);
    }
  }
  return cfg;
}

void print_trace(const TagSystem& sys, const Trace& trace) {
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    std::string line = std::to_string(k) + ". " + queue_to_string(trace.steps[k]);
    if (k == 0) line += " (Init)";
    if (trace.halt_step && static_cast<std::size_t>(*trace.halt_step) == k) line += " (Halt)";
    std::cout << line << "\n";
  }
  if (trace.halt_step)
    std::cout << "# halted at step " << *trace.halt_step << "\n";
  else
    std::cout << "# truncated after " << trace.steps.size() - 1 << " steps\n";
}

TmConfig parse_tm_config(const std::string& text) {
  std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 3) throw ConfigError("--config expects \"STATE,M,N\"");
  TmConfig cfg;
  cfg.state = trim(parts[0]);
  try {
    cfg.left = std::stoull(trim(parts[1]));
    cfg.right = std::stoull(trim(parts[2]));
  } catch (const std::exception&) {
    throw ConfigError("--config counters must be non-negative integers");
  }
  return cfg;
}

const BenchmarkInstance& find_instance(const std::vector<BenchmarkInstance>& ds,
                                       const std::string& id) {
  for (const BenchmarkInstance& inst : ds)
    if (inst.id == id) return inst;
  throw MalformedInput("no instance with id " + id + " in dataset");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ParseError*>(&e)) return 3;
  if (dynamic_cast<const MalformedInput*>(&e)) return 4;
  if (dynamic_cast<const CycleError*>(&e)) return 5;
  if (dynamic_cast<const StatsError*>(&e)) return 6;
  if (dynamic_cast<const ClientError*>(&e)) return 7;
  return 10;
}

const char* error_class(int code) {
  switch (code) {
    case 2: return "invalid-config";
    case 3: return "parse-error";
    case 4: return "malformed-input";
    case 5: return "emulation-error";
    case 6: return "stats-error";
    case 7: return "client-error";
    default: return "internal-error";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"m-tag system benchmark toolkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a seeded benchmark dataset");
  struct {
    std::string config, out, alphabet;
    GenConfig cfg;
  } g;
  gen->add_option("--config", g.config, "key=value config file");
  gen->add_option("--out", g.out, "output dataset (JSON lines)")->required();
  gen->add_option("--seed", g.cfg.seed, "RNG seed");
  gen->add_option("--count", g.cfg.count, "number of instances");
  gen->add_option("--m", g.cfg.m, "deletion count");
  gen->add_option("--alphabet", g.alphabet, "roman|numeral|greek|special");
  gen->add_option("--alphabet-size", g.cfg.alphabet_size, "alphabet size");
  gen->add_option("--rule-min", g.cfg.rule_len_min, "min production length");
  gen->add_option("--rule-max", g.cfg.rule_len_max, "max production length");
  gen->add_option("--init-min", g.cfg.init_len_min, "min init length");
  gen->add_option("--init-max", g.cfg.init_len_max, "max init length");
  gen->add_option("--max-steps", g.cfg.max_steps, "simulation budget");
  gen->add_option("--min-steps", g.cfg.min_steps, "skip systems halting before this step");
  gen->callback([&] {
    GenConfig cfg = g.config.empty() ? GenConfig{} : load_gen_config(g.config);
    if (gen->count("--seed")) cfg.seed = g.cfg.seed;
    if (gen->count("--count")) cfg.count = g.cfg.count;
    if (gen->count("--m")) cfg.m = g.cfg.m;
    if (gen->count("--alphabet")) cfg.kind = alphabet_kind_from_name(g.alphabet);
    if (gen->count("--alphabet-size")) cfg.alphabet_size = g.cfg.alphabet_size;
    if (gen->count("--rule-min")) cfg.rule_len_min = g.cfg.rule_len_min;
    if (gen->count("--rule-max")) cfg.rule_len_max = g.cfg.rule_len_max;
    if (gen->count("--init-min")) cfg.init_len_min = g.cfg.init_len_min;
    if (gen->count("--init-max")) cfg.init_len_max = g.cfg.init_len_max;
    if (gen->count("--max-steps")) cfg.max_steps = g.cfg.max_steps;
    if (gen->count("--min-steps")) cfg.min_steps = g.cfg.min_steps;
    if (cfg.count < 1) throw ConfigError("--count must be at least 1");
    std::vector<BenchmarkInstance> ds = generate_dataset(cfg);
    write_dataset(g.out, ds);
    int halted = 0;
    for (const auto& inst : ds) halted += inst.halted ? 1 : 0;
    std::cout << "wrote " << ds.size() << " instances to " << g.out << " (halted early: " << halted
              << ")\n";
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a tag system and print the trace");
  struct {
    std::string system, dataset, id, init;
    int steps = -1;
  } s;
  sim->add_option("--system", s.system, "system JSON file");
  sim->add_option("--dataset", s.dataset, "dataset JSON lines");
  sim->add_option("--id", s.id, "instance id inside --dataset");
  sim->add_option("--init", s.init, "override initial queue, symbols separated by spaces");
  sim->add_option("--steps", s.steps, "step budget (0 = init only)");
  sim->callback([&] {
    TagSystem sys;
    Queue init;
    int max_steps = 30;
    if (!s.system.empty()) {
      SystemFile sf = read_system_file(s.system);
      sys = sf.system;
      init = sf.init;
      max_steps = sf.max_steps;
    } else if (!s.dataset.empty() && !s.id.empty()) {
      std::vector<BenchmarkInstance> ds = read_dataset(s.dataset);
      const BenchmarkInstance& inst = find_instance(ds, s.id);
      sys = inst.system;
      init = inst.init;
      max_steps = inst.max_steps;
    } else {
      throw ConfigError("need --system or --dataset with --id");
    }
    if (!s.init.empty()) {
      init.clear();
      for (const std::string& tok : split(s.init, ' '))
        if (!tok.empty()) init.push_back(tok);
    }
    if (s.steps >= 0) max_steps = s.steps;
    Validation v = validate_system(sys);
    if (!v.ok()) throw MalformedInput("invalid system: " + v.violations.front());
    print_trace(sys, run(sys, init, max_steps));
  });

  // compile-tm
  auto* comp = app.add_subcommand("compile-tm", "Compile a binary TM into a 2-tag program");
  struct {
    std::string tm, out;
  } c;
  comp->add_option("--tm", c.tm, "TM description file")->required();
  comp->add_option("--out", c.out, "output base path")->required();
  comp->callback([&] {
    TagProgram prog = compile(read_tm_file(c.tm));
    write_program(c.out, prog);
    std::cout << "compiled " << prog.state_names.size() << " states into "
              << prog.system.alphabet.size() << " tag symbols; wrote " << c.out << ".system.json"
              << " and " << c.out << ".symbols.json\n";
  });

  // verify-utm
  auto* ver = app.add_subcommand("verify-utm", "Check TM-vs-tag lockstep equivalence");
  struct {
    std::string tm, config;
    int tm_steps = 20;
    int random = 0;
    uint64_t seed = 0;
  } v;
  ver->add_option("--tm", v.tm, "TM description file")->required();
  ver->add_option("--config", v.config, "start configuration \"STATE,M,N\"");
  ver->add_option("--tm-steps", v.tm_steps, "TM steps to verify in lockstep");
  ver->add_option("--random", v.random, "fuzz mode: number of random start configs");
  ver->add_option("--seed", v.seed, "fuzz seed");
  ver->callback([&] {
    TuringMachine tm = read_tm_file(v.tm);
    auto report = [&](const TmConfig& start, const VerifyOutcome& out) {
      if (out.pass) {
        std::cout << "PASS " << start.state << "," << start.left << "," << start.right << ": "
                  << out.tm_steps << " TM steps, " << out.tag_steps << " tag steps";
        if (out.halted_at) std::cout << " (" << out.detail << ")";
        std::cout << "\n";
      } else {
        std::cout << "FAIL " << start.state << "," << start.left << "," << start.right << ": "
                  << out.detail << "\n";
        exit_code = 1;
      }
    };
    if (v.random > 0) {
      SplitMix64 rng = stream(v.seed, 0, 7);
      for (int i = 0; i < v.random; ++i) {
        TmConfig start;
        start.state = tm.start;
        start.left = rng.below(64);
        start.right = rng.below(64);
        report(start, verify_equivalence(tm, start, v.tm_steps));
      }
    } else if (!v.config.empty()) {
      TmConfig start = parse_tm_config(v.config);
      report(start, verify_equivalence(tm, start, v.tm_steps));
    } else {
      throw ConfigError("need --config or --random");
    }
  });

  // render
  auto* ren = app.add_subcommand("render", "Render prompts or ground-truth transcripts");
  struct {
    std::string dataset, out, id;
    bool ground_truth = false;
  } r;
  ren->add_option("--dataset", r.dataset, "dataset JSON lines")->required();
  ren->add_option("--out", r.out, "output JSON lines");
  ren->add_option("--id", r.id, "print a single instance's prompt to stdout");
  ren->add_flag("--ground-truth", r.ground_truth, "emit ground-truth responses as transcripts");
  ren->callback([&] {
    std::vector<BenchmarkInstance> ds = read_dataset(r.dataset);
    if (!r.id.empty()) {
      std::cout << render_prompt(find_instance(ds, r.id));
      return;
    }
    if (r.out.empty()) throw ConfigError("need --out (or --id for stdout)");
    if (r.ground_truth) {
      std::string text;
      for (const BenchmarkInstance& inst : ds) {
        TranscriptRecord rec;
        rec.id = inst.id;
        rec.model = "ground-truth";
        rec.prompt = render_prompt(inst);
        rec.response = format_ground_truth(inst);
        text += transcript_to_jsonl_line(rec);
        text += '\n';
      }
      write_file(r.out, text);
      std::cout << "wrote " << ds.size() << " ground-truth transcripts to " << r.out << "\n";
    } else {
      std::string text;
      for (const BenchmarkInstance& inst : ds) {
        nlohmann::ordered_json j;
        j["id"] = inst.id;
        j["prompt"] = render_prompt(inst);
        text += j.dump();
        text += '\n';
      }
      write_file(r.out, text);
      std::cout << "wrote " << ds.size() << " prompts to " << r.out << "\n";
    }
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Query a chat-completion endpoint for every instance");
  struct {
    std::string dataset, out, config;
    RunnerConfig cfg;
  } e;
  ev->add_option("--dataset", e.dataset, "dataset JSON lines")->required();
  ev->add_option("--out", e.out, "transcript output (JSON lines, appended)")->required();
  ev->add_option("--config", e.config, "key=value runner config file");
  ev->add_option("--base-url", e.cfg.base_url, "endpoint base URL");
  ev->add_option("--model", e.cfg.model, "model name");
  ev->add_option("--api-key-env", e.cfg.api_key_env, "environment variable holding the API key");
  ev->add_option("--temperature", e.cfg.temperature, "sampling temperature");
  ev->add_option("--top-p", e.cfg.top_p, "nucleus sampling cutoff");
  ev->add_option("--max-output-tokens", e.cfg.max_output_tokens, "completion token cap");
  ev->add_option("--max-in-flight,--jobs", e.cfg.max_in_flight, "max concurrent requests");
  ev->add_option("--timeout-ms", e.cfg.timeout_ms, "per-request timeout");
  ev->add_option("--max-attempts", e.cfg.retry.max_attempts, "attempts per request");
  ev->add_option("--initial-backoff-ms", e.cfg.retry.initial_backoff_ms, "first retry delay");
  ev->add_option("--backoff-multiplier", e.cfg.retry.multiplier, "retry delay growth factor");
  ev->callback([&] {
    RunnerConfig cfg = e.config.empty() ? RunnerConfig{} : load_runner_config(e.config);
    if (ev->count("--base-url")) cfg.base_url = e.cfg.base_url;
    if (ev->count("--model")) cfg.model = e.cfg.model;
    if (ev->count("--api-key-env")) cfg.api_key_env = e.cfg.api_key_env;
    if (ev->count("--temperature")) cfg.temperature = e.cfg.temperature;
    if (ev->count("--top-p")) cfg.top_p = e.cfg.top_p;
    if (ev->count("--max-output-tokens")) cfg.max_output_tokens = e.cfg.max_output_tokens;
    if (ev->count("--max-in-flight")) cfg.max_in_flight = e.cfg.max_in_flight;
    if (ev->count("--timeout-ms")) cfg.timeout_ms = e.cfg.timeout_ms;
    if (ev->count("--max-attempts")) cfg.retry.max_attempts = e.cfg.retry.max_attempts;
    if (ev->count("--initial-backoff-ms")) cfg.retry.initial_backoff_ms = e.cfg.retry.initial_backoff_ms;
    if (ev->count("--backoff-multiplier")) cfg.retry.multiplier = e.cfg.retry.multiplier;
    int written = run_benchmark(cfg, read_dataset(e.dataset), e.out);
    std::cout << "wrote " << written << " transcripts to " << e.out << "\n";
  });

  // score
  auto* sc = app.add_subcommand("score", "Score transcripts against their dataset");
  struct {
    std::string dataset, transcripts, out, csv, model;
  } k;
  sc->add_option("--dataset", k.dataset, "dataset JSON lines")->required();
  sc->add_option("--transcripts", k.transcripts, "transcript JSON lines")->required();
  sc->add_option("--out", k.out, "score report JSON");
  sc->add_option("--csv", k.csv, "accuracy-curve CSV");
  sc->add_option("--model", k.model, "model label override");
  sc->callback([&] {
    std::vector<BenchmarkInstance> ds = read_dataset(k.dataset);
    std::vector<TranscriptRecord> recs = read_transcripts(k.transcripts);
    std::map<std::string, const TranscriptRecord*> by_id;
    for (const TranscriptRecord& rec : recs) by_id[rec.id] = &rec;
    int T = 1;
    std::vector<Judgment> js;
    js.reserve(ds.size());
    std::string model = k.model;
    for (const BenchmarkInstance& inst : ds) {
      T = std::max(T, inst.max_steps);
      auto it = by_id.find(inst.id);
      PredictedTrace pred;
      if (it != by_id.end() && it->second->error.empty()) {
        pred = parse_transcript(it->second->response);
        if (model.empty()) model = it->second->model;
      }
      js.push_back(compare(inst, pred));
    }
    ScoreReport rep = build_report(js, T, model.empty() ? "unknown" : model,
                                   k.dataset + "#" + std::to_string(ds.size()));
    if (!k.out.empty()) write_report(k.out, rep);
    if (!k.csv.empty()) write_acc_curve_csv(k.csv, rep);
    std::cout << "model=" << rep.model << " n=" << rep.n_instances
              << " swa_uniform=" << rep.swa_uniform << " swa_linear=" << rep.swa_linear
              << " pass_rate=" << rep.pass_rate << "\n";
  });

  // stats
  auto* st = app.add_subcommand("stats", "Correlation and fit over score CSV columns");
  struct {
    std::string csv, x, y;
    bool normalize = false, fit = false;
  } t;
  st->add_option("--csv", t.csv, "input CSV")->required();
  st->add_option("--x", t.x, "x column")->required();
  st->add_option("--y", t.y, "y column, or comma-separated columns averaged per row")->required();
  st->add_flag("--normalize", t.normalize, "min-max normalize both series first");
  st->add_flag("--fit", t.fit, "also print the least-squares line");
  st->callback([&] {
    CsvTable table = read_csv(t.csv);
    std::vector<double> xs = table.numeric_column(t.x);
    std::vector<std::vector<double>> ycols;
    for (const std::string& name : split(t.y, ','))
      ycols.push_back(table.numeric_column(trim(name)));
    std::vector<double> ys(xs.size(), 0.0);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      for (const auto& col : ycols) ys[i] += col[i];
      ys[i] /= static_cast<double>(ycols.size());
    }
    if (t.normalize) {
      xs = minmax_normalize(xs);
      ys = minmax_normalize(ys);
    }
    std::printf("n: %zu\n", xs.size());
    std::printf("pearson: %.10f\n", pearson(xs, ys));
    if (t.fit) {
      LinearFit fit = linear_fit(xs, ys);
      std::printf("slope: %.10f\n", fit.slope);
      std::printf("intercept: %.10f\n", fit.intercept);
      std::printf("r_squared: %.10f\n", fit.r_squared);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: invalid-config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    int code = exit_code_for(e);
    std::cerr << "error: " << error_class(code) << ": " << e.what() << "\n";
    return code;
  }
  return exit_code;
}
