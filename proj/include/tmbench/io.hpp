#pragma once

#include <map>
#include <string>
#include <vector>

#include "tmbench/client.hpp"
#include "tmbench/generator.hpp"
#include "tmbench/metrics.hpp"
#include "tmbench/utm.hpp"

namespace tmbench {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Dataset JSONL: one instance per line, fixed field order
// {id, m, alphabet, rules, init, max_steps, trace, halted, halt_step}.
std::string instance_to_jsonl_line(const BenchmarkInstance& inst);
BenchmarkInstance instance_from_jsonl_line(const std::string& line);
void write_dataset(const std::string& path, const std::vector<BenchmarkInstance>& ds);
std::vector<BenchmarkInstance> read_dataset(const std::string& path);

// System file: single JSON document {m, alphabet, rules, init?, max_steps?}.
struct SystemFile {
  TagSystem system;
  Queue init;
  int max_steps = 30;
};
SystemFile read_system_file(const std::string& path);
void write_system_file(const std::string& path, const SystemFile& sf);

// Transcript JSONL: {id, model, prompt, response, usage, error?}.
std::string transcript_to_jsonl_line(const TranscriptRecord& rec);
TranscriptRecord transcript_from_jsonl_line(const std::string& line);
void append_transcript(const std::string& path, const TranscriptRecord& rec);
// lenient: skip unparseable lines (resume after a torn write) instead of throwing
std::vector<TranscriptRecord> read_transcripts(const std::string& path, bool lenient = false);

// TM description file; see assets/tm_example.txt for the grammar.
TuringMachine parse_tm_text(const std::string& text);
TuringMachine read_tm_file(const std::string& path);

// Compiled program: system JSON plus a symbol-table sidecar.
void write_program(const std::string& base_path, const TagProgram& prog);
TagProgram read_program(const std::string& base_path);

void write_report(const std::string& path, const ScoreReport& rep);
ScoreReport read_report(const std::string& path);
void write_acc_curve_csv(const std::string& path, const ScoreReport& rep);

// Minimal CSV: first non-comment line is the header; '#' lines skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;                 // throws ParseError when absent
  std::vector<double> numeric_column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

uint64_t fnv1a64(const std::string& bytes);

}  // namespace tmbench
