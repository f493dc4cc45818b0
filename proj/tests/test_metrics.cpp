#include <cmath>
#include <vector>

#include "doctest.h"
#include "tmbench/errors.hpp"
#include "tmbench/generator.hpp"
#include "tmbench/metrics.hpp"
#include "tmbench/rng.hpp"
#include "tmbench/transcript.hpp"

using namespace tmbench;

namespace {

Judgment judged(int horizon, std::vector<bool> per_step, bool passed) {
  Judgment j;
  j.horizon = horizon;
  j.per_step = std::move(per_step);
  j.passed = passed;
  return j;
}

// m=2 over {A}, A -> empty: [A A A A A] shrinks to [A] and halts at step 2.
BenchmarkInstance shrinking_instance(int max_steps) {
  BenchmarkInstance inst;
  inst.id = "shrink";
  inst.system.m = 2;
  inst.system.alphabet = {"A"};
  inst.system.rules = {{"A", {}}};
  inst.init = {"A", "A", "A", "A", "A"};
  inst.max_steps = max_steps;
  inst.trace = run(inst.system, inst.init, max_steps);
  inst.halted = inst.trace.halt_step.has_value();
  inst.halt_step = inst.trace.halt_step;
  return inst;
}

// m=1 over {B}, B -> B B: grows forever; truth is truncated at max_steps.
BenchmarkInstance growing_instance(int max_steps) {
  BenchmarkInstance inst;
  inst.id = "grow";
  inst.system.m = 1;
  inst.system.alphabet = {"B"};
  inst.system.rules = {{"B", {"B", "B"}}};
  inst.init = {"B"};
  inst.max_steps = max_steps;
  inst.trace = run(inst.system, inst.init, max_steps);
  inst.halted = inst.trace.halt_step.has_value();
  inst.halt_step = inst.trace.halt_step;
  return inst;
}

PredictedTrace perfect_prediction(const BenchmarkInstance& inst) {
  return parse_transcript(format_ground_truth(inst));
}

}  // namespace

TEST_CASE("weighted accuracy spot values") {
  std::vector<Judgment> js = {judged(2, {true, true}, true), judged(2, {true, false}, false)};
  CHECK(std::abs(*step_accuracy(js, 1) - 1.0) <= 1e-12);
  CHECK(std::abs(*step_accuracy(js, 2) - 0.5) <= 1e-12);
  CHECK(std::abs(swa(js, Weighting::Uniform, 2) - 0.75) <= 1e-12);
  CHECK(std::abs(swa(js, Weighting::Linear, 2) - 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(pass_rate(js) - 0.5) <= 1e-12);
}

TEST_CASE("an early halt must be claimed at the right step and nothing after") {
  BenchmarkInstance inst = shrinking_instance(30);
  REQUIRE(inst.halt_step == 2);

  PredictedTrace good = perfect_prediction(inst);
  Judgment j = compare(inst, good);
  CHECK(j.horizon == 2);
  CHECK(j.passed);
  CHECK_FALSE(j.first_error_step.has_value());

  PredictedTrace no_claim = good;
  no_claim.halt_claimed_at.reset();
  j = compare(inst, no_claim);
  CHECK_FALSE(j.passed);
  CHECK(j.first_error_step == 2);
  CHECK(j.per_step == std::vector<bool>{true, true});  // the steps themselves were right

  PredictedTrace wrong_claim = good;
  wrong_claim.halt_claimed_at = 1;
  j = compare(inst, wrong_claim);
  CHECK_FALSE(j.passed);

  PredictedTrace overshoot = good;
  overshoot.steps.emplace_back(3, Queue{});
  j = compare(inst, overshoot);
  CHECK_FALSE(j.passed);
  CHECK(j.first_error_step == 2);
}

TEST_CASE("a halt at the budget edge needs no claim") {
  BenchmarkInstance inst = shrinking_instance(2);
  REQUIRE(inst.halt_step == 2);
  REQUIRE(inst.max_steps == 2);

  PredictedTrace pred = perfect_prediction(inst);
  pred.halt_claimed_at.reset();
  Judgment j = compare(inst, pred);
  CHECK(j.passed);
}

TEST_CASE("truncated truth ignores halt claims and trailing extras") {
  BenchmarkInstance inst = growing_instance(3);
  REQUIRE_FALSE(inst.halted);

  PredictedTrace pred = perfect_prediction(inst);
  pred.halt_claimed_at = 3;  // spurious claim; the pass rule does not mention it
  pred.steps.emplace_back(9, Queue{"Z"});
  Judgment j = compare(inst, pred);
  CHECK(j.horizon == 3);
  CHECK(j.passed);
}

TEST_CASE("missing and wrong steps set the first error") {
  BenchmarkInstance inst = shrinking_instance(30);
  PredictedTrace pred = perfect_prediction(inst);
  pred.steps[1].second = Queue{"A"};  // step 1 wrong
  Judgment j = compare(inst, pred);
  CHECK_FALSE(j.passed);
  CHECK(j.first_error_step == 1);
  CHECK(j.per_step == std::vector<bool>{false, true});

  PredictedTrace empty;
  empty.warnings.push_back("no steps found");
  j = compare(inst, empty);
  CHECK_FALSE(j.passed);
  CHECK(j.first_error_step == 1);
  CHECK(j.per_step == std::vector<bool>{false, false});
  CHECK_FALSE(j.init_echo_mismatch);  // no step 0 present at all
}

TEST_CASE("step zero is an echo check, not a scored step") {
  BenchmarkInstance inst = shrinking_instance(30);
  PredictedTrace pred = perfect_prediction(inst);
  pred.steps[0].second = Queue{"A", "A"};  // botched init echo
  Judgment j = compare(inst, pred);
  CHECK(j.init_echo_mismatch);
  CHECK(j.passed);  // steps 1..h still correct
}

TEST_CASE("step accuracy respects horizons") {
  std::vector<Judgment> js = {judged(2, {true, false}, false),
                              judged(2, {true, true}, true),
                              judged(5, {false, true, true, true, false}, false)};
  CHECK(std::abs(*step_accuracy(js, 1) - 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(*step_accuracy(js, 2) - 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(*step_accuracy(js, 3) - 1.0) <= 1e-12);  // only the long instance counts
  CHECK(std::abs(*step_accuracy(js, 5) - 0.0) <= 1e-12);
  CHECK_FALSE(step_accuracy(js, 6).has_value());
  CHECK_THROWS_AS(step_accuracy(js, 0), StatsError);
}

TEST_CASE("weighted accuracy skips undefined steps entirely") {
  std::vector<Judgment> js = {judged(2, {true, false}, false), judged(2, {false, true}, false)};
  CHECK(swa(js, Weighting::Uniform, 10) == swa(js, Weighting::Uniform, 2));
  CHECK(swa(js, Weighting::Linear, 10) == swa(js, Weighting::Linear, 2));
  CHECK(swa({}, Weighting::Uniform, 5) == 0.0);
  CHECK_THROWS_AS(swa(js, Weighting::Uniform, 0), StatsError);
  CHECK_THROWS_AS(pass_rate({}), StatsError);
}

TEST_CASE("damage never raises a score") {
  GenConfig cfg;
  cfg.count = 40;
  cfg.seed = 2025;
  auto data = generate_dataset(cfg);
  const int T = 30;

  std::vector<PredictedTrace> preds;
  preds.reserve(data.size());
  for (const auto& inst : data) preds.push_back(perfect_prediction(inst));

  SplitMix64 rng(stream(2025, 0, 6));
  auto mutate = [&](PredictedTrace& p, const BenchmarkInstance& inst) {
    switch (rng.below(5)) {
      case 0: {  // corrupt one queue cell with a symbol no truth contains
        if (p.steps.empty()) return;
        auto& [idx, q] = p.steps[rng.below(p.steps.size())];
        if (q.empty())
          q.push_back("ZZ");
        else
          q[rng.below(q.size())] = "ZZ";
        return;
      }
      case 1:  // drop one step block
        if (!p.steps.empty()) p.steps.erase(p.steps.begin() + static_cast<std::ptrdiff_t>(rng.below(p.steps.size())));
        return;
      case 2:  // truncate the tail
        if (!p.steps.empty()) p.steps.resize(rng.below(p.steps.size()));
        return;
      case 3:  // forget the halt claim
        p.halt_claimed_at.reset();
        return;
      default:  // claim a halt far past anything real
        p.halt_claimed_at = inst.max_steps + 1000;
        return;
    }
  };

  std::vector<Judgment> js;
  js.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) js.push_back(compare(data[i], preds[i]));

  // Pre-damage a third of the predictions so mutations act on non-perfect
  // baselines too.
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (rng.below(3) == 0) {
      mutate(preds[i], data[i]);
      js[i] = compare(data[i], preds[i]);
    }
  }

  double base_u = swa(js, Weighting::Uniform, T);
  double base_l = swa(js, Weighting::Linear, T);
  double base_p = pass_rate(js);

  for (int t = 0; t < 10000; ++t) {
    std::size_t i = rng.below(data.size());
    PredictedTrace damaged = preds[i];
    mutate(damaged, data[i]);
    Judgment backup = js[i];
    js[i] = compare(data[i], damaged);
    REQUIRE(swa(js, Weighting::Uniform, T) <= base_u + 1e-12);
    REQUIRE(swa(js, Weighting::Linear, T) <= base_l + 1e-12);
    REQUIRE(pass_rate(js) <= base_p + 1e-12);
    js[i] = backup;
  }
}

TEST_CASE("pearson correlation on known series") {
  CHECK(std::abs(pearson({1, 2, 3}, {3, 5, 7}) - 1.0) <= 1e-15);
  CHECK(std::abs(pearson({1, 2, 3}, {4, 2, 0}) + 1.0) <= 1e-15);
  CHECK(std::abs(pearson({1, 2, 3, 4}, {1, 3, 2, 4}) - 0.8) <= 1e-15);
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), StatsError);
  CHECK_THROWS_AS(pearson({1, 2, 3}, {5, 5, 5}), StatsError);
  CHECK_THROWS_AS(pearson({1}, {2}), StatsError);
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), StatsError);
}

TEST_CASE("min-max normalization and its degenerate inputs") {
  auto out = minmax_normalize({2, 4, 6});
  REQUIRE(out.size() == 3);
  CHECK(out[0] == 0.0);
  CHECK(std::abs(out[1] - 0.5) <= 1e-15);
  CHECK(out[2] == 1.0);
  CHECK_THROWS_AS(minmax_normalize({5, 5}), StatsError);
  CHECK_THROWS_AS(minmax_normalize({5}), StatsError);
}

TEST_CASE("least squares recovers exact and noisy lines") {
  LinearFit fit = linear_fit({0, 1, 2, 3}, {-2, 1, 4, 7});
  CHECK(std::abs(fit.slope - 3.0) <= 1e-12);
  CHECK(std::abs(fit.intercept + 2.0) <= 1e-12);
  CHECK(std::abs(fit.r_squared - 1.0) <= 1e-12);
  for (double r : fit.residuals) CHECK(std::abs(r) <= 1e-12);

  std::vector<double> xs = {0, 1, 2, 3, 4}, ys = {1, 3, 2, 5, 4};
  fit = linear_fit(xs, ys);
  double sum = 0;
  for (double r : fit.residuals) sum += r;
  CHECK(std::abs(sum) <= 1e-9);
  double r = pearson(xs, ys);
  CHECK(std::abs(fit.r_squared - r * r) <= 1e-12);

  fit = linear_fit({0, 1, 2}, {4, 4, 4});  // flat target: slope 0, perfect fit
  CHECK(fit.slope == 0.0);
  CHECK(fit.r_squared == 1.0);
  CHECK_THROWS_AS(linear_fit({2, 2, 2}, {1, 2, 3}), StatsError);
}

TEST_CASE("percent rounds half up to one decimal") {
  CHECK(percent(0.0) == 0.0);
  CHECK(percent(1.0) == 100.0);
  CHECK(percent(0.75) == 75.0);
  CHECK(percent(2.0 / 3.0) == 66.7);
  CHECK(percent(0.12345) == 12.3);
  CHECK(percent(0.0625) == 6.3);  // 62.5 is exact in binary; half rounds up
  CHECK(percent(0.4567) == 45.7);
}

TEST_CASE("report aggregation carries curve, scores, and per-instance verdicts") {
  std::vector<Judgment> js = {judged(2, {true, true}, true),
                              judged(2, {true, false}, false),
                              judged(4, {true, true, false, true}, false)};
  js[0].id = "a";
  js[1].id = "b";
  js[2].id = "c";
  js[1].first_error_step = 2;
  js[2].first_error_step = 3;

  ScoreReport rep = build_report(js, 5, "some-model", "ds#3");
  CHECK(rep.model == "some-model");
  CHECK(rep.dataset_id == "ds#3");
  CHECK(rep.n_instances == 3);
  REQUIRE(rep.acc_curve.size() == 4);  // step 5 is beyond every horizon
  CHECK(rep.acc_curve[0].step == 1);
  CHECK(rep.acc_curve[0].n_total == 3);
  CHECK(rep.acc_curve[0].n_correct == 3);
  CHECK(rep.acc_curve[2].step == 3);
  CHECK(rep.acc_curve[2].n_total == 1);
  CHECK(rep.acc_curve[2].n_correct == 0);
  CHECK(rep.swa_uniform == percent(swa(js, Weighting::Uniform, 5)));
  CHECK(rep.swa_linear == percent(swa(js, Weighting::Linear, 5)));
  CHECK(rep.pass_rate == percent(1.0 / 3.0));
  REQUIRE(rep.per_instance.size() == 3);
  CHECK(rep.per_instance.at("a").passed);
  CHECK_FALSE(rep.per_instance.at("b").passed);
  CHECK(rep.per_instance.at("b").first_error_step == 2);
  CHECK(rep.per_instance.at("c").first_error_step == 3);

  ScoreReport blank = build_report({}, 5, "m", "d");
  CHECK(blank.n_instances == 0);
  CHECK(blank.acc_curve.empty());
  CHECK(blank.swa_uniform == 0.0);
  CHECK(blank.pass_rate == 0.0);
}
