#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmbench/generator.hpp"
#include "tmbench/transcript.hpp"

namespace tmbench {

// Per-instance judgment. horizon h = halt_step when the truth halted, else
// max_steps; per_step[i-1] holds the verdict for step i, i = 1..h.
struct Judgment {
  std::string id;
  int horizon = 0;
  std::vector<bool> per_step;
  bool passed = false;
  bool init_echo_mismatch = false;  // step 0, when present, disagreed with init
  std::optional<int> first_error_step;
};

Judgment compare(const BenchmarkInstance& inst, const PredictedTrace& predicted);

// ACC(i) = N_correct(i) / N_total(i) over instances with horizon >= i;
// absent when no instance reaches step i.
std::optional<double> step_accuracy(const std::vector<Judgment>& js, int i);

enum class Weighting { Uniform, Linear };

// Sum w_i * ACC(i) / sum w_i over i = 1..T, skipping steps where ACC is
// undefined from both sums.
double swa(const std::vector<Judgment>& js, Weighting w, int T);

double pass_rate(const std::vector<Judgment>& js);  // throws StatsError on empty

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);
std::vector<double> minmax_normalize(const std::vector<double>& xs);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  std::vector<double> residuals;
};

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

// fraction -> percentage with half-up rounding to one decimal.
double percent(double fraction);

struct StepAccuracyPoint {
  int step = 0;
  double acc = 0;  // fraction
  int n_total = 0;
  int n_correct = 0;
};

struct InstanceScore {
  bool passed = false;
  std::optional<int> first_error_step;
};

struct ScoreReport {
  std::string model;
  std::string dataset_id;
  int n_instances = 0;
  std::vector<StepAccuracyPoint> acc_curve;  // defined steps only
  double swa_uniform = 0;  // percentages, one decimal
  double swa_linear = 0;
  double pass_rate = 0;
  std::map<std::string, InstanceScore> per_instance;
};

// Aggregates judgments into the report; T is the evaluation horizon
// (max_steps of the dataset).
ScoreReport build_report(const std::vector<Judgment>& js, int T,
                         const std::string& model, const std::string& dataset_id);

}  // namespace tmbench
