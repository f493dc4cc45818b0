#include "tmbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tmbench/errors.hpp"

namespace tmbench {

Judgment compare(const BenchmarkInstance& inst, const PredictedTrace& predicted) {
  Judgment j;
  j.id = inst.id;
  const int h = inst.halt_step ? std::min(*inst.halt_step, inst.max_steps) : inst.max_steps;
  j.horizon = h;
  const auto& truth = inst.trace.steps;

  if (const Queue* q0 = predicted.find_step(0))
    j.init_echo_mismatch = truth.empty() || *q0 != truth[0];

  j.per_step.assign(static_cast<std::size_t>(h), false);
  bool all_correct = true;
  for (int i = 1; i <= h; ++i) {
    const Queue* q = predicted.find_step(i);
    bool ok = q && static_cast<std::size_t>(i) < truth.size() && *q == truth[static_cast<std::size_t>(i)];
    j.per_step[static_cast<std::size_t>(i - 1)] = ok;
    if (!ok) {
      all_correct = false;
      if (!j.first_error_step) j.first_error_step = i;
    }
  }
  j.passed = all_correct;

  // A halt strictly inside the budget must be claimed at the right step, with
  // nothing simulated past it. At the budget edge the claim is optional.
  if (inst.halt_step && h < inst.max_steps && j.passed) {
    bool claim_ok = predicted.halt_claimed_at && *predicted.halt_claimed_at == h;
    bool beyond = !predicted.steps.empty() && predicted.steps.back().first > h;
    if (!claim_ok || beyond) {
      j.passed = false;
      if (!j.first_error_step) j.first_error_step = h;
    }
  }
  return j;
}

std::optional<double> step_accuracy(const std::vector<Judgment>& js, int i) {
  if (i < 1) throw StatsError("step index must be >= 1");
  int total = 0, correct = 0;
  for (const Judgment& j : js) {
    if (j.horizon < i) continue;
    ++total;
    if (j.per_step[static_cast<std::size_t>(i - 1)]) ++correct;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(total);
}

double swa(const std::vector<Judgment>& js, Weighting w, int T) {
  if (T < 1) throw StatsError("horizon T must be >= 1");
  double num = 0, den = 0;
  for (int i = 1; i <= T; ++i) {
    std::optional<double> acc = step_accuracy(js, i);
    if (!acc) continue;
    double wi = w == Weighting::Uniform ? 1.0 : static_cast<double>(i);
    num += wi * *acc;
    den += wi;
  }
  return den == 0 ? 0.0 : num / den;
}

double pass_rate(const std::vector<Judgment>& js) {
  if (js.empty()) throw StatsError("pass rate of an empty judgment set is undefined");
  std::size_t passed = 0;
  for (const Judgment& j : js)
    if (j.passed) ++passed;
  return static_cast<double>(passed) / static_cast<double>(js.size());
}

namespace {

struct Moments {
  double mean_x = 0, mean_y = 0, var_x = 0, var_y = 0, cov = 0;
};

Moments moments(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw StatsError("series lengths differ");
  if (xs.size() < 2) throw StatsError("need at least 2 points");
  Moments m;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) m.mean_x += x;
  for (double y : ys) m.mean_y += y;
  m.mean_x /= n;
  m.mean_y /= n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - m.mean_x, dy = ys[i] - m.mean_y;
    m.var_x += dx * dx;
    m.var_y += dy * dy;
    m.cov += dx * dy;
  }
  return m;
}

}  // namespace

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  Moments m = moments(xs, ys);
  if (m.var_x == 0 || m.var_y == 0)
    throw StatsError("correlation undefined for a zero-variance series");
  return m.cov / std::sqrt(m.var_x * m.var_y);
}

std::vector<double> minmax_normalize(const std::vector<double>& xs) {
  if (xs.size() < 2) throw StatsError("need at least 2 points");
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*lo == *hi) throw StatsError("min-max normalization undefined for a constant series");
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((x - *lo) / (*hi - *lo));
  return out;
}

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  Moments m = moments(xs, ys);
  if (m.var_x == 0) throw StatsError("fit undefined for constant x");
  LinearFit fit;
  fit.slope = m.cov / m.var_x;
  fit.intercept = m.mean_y - fit.slope * m.mean_x;
  fit.residuals.reserve(xs.size());
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.residuals.push_back(r);
    ss_res += r * r;
  }
  fit.r_squared = m.var_y == 0 ? 1.0 : 1.0 - ss_res / m.var_y;
  return fit;
}

double percent(double fraction) {
  return std::floor(fraction * 1000.0 + 0.5) / 10.0;
}

ScoreReport build_report(const std::vector<Judgment>& js, int T, const std::string& model,
                         const std::string& dataset_id) {
  ScoreReport rep;
  rep.model = model;
  rep.dataset_id = dataset_id;
  rep.n_instances = static_cast<int>(js.size());
  for (int i = 1; i <= T; ++i) {
    int total = 0, correct = 0;
    for (const Judgment& j : js) {
      if (j.horizon < i) continue;
      ++total;
      if (j.per_step[static_cast<std::size_t>(i - 1)]) ++correct;
    }
    if (total == 0) continue;
    rep.acc_curve.push_back(
        {i, static_cast<double>(correct) / static_cast<double>(total), total, correct});
  }
  rep.swa_uniform = percent(swa(js, Weighting::Uniform, T));
  rep.swa_linear = percent(swa(js, Weighting::Linear, T));
  rep.pass_rate = js.empty() ? 0.0 : percent(pass_rate(js));
  for (const Judgment& j : js) rep.per_instance[j.id] = {j.passed, j.first_error_step};
  return rep;
}

}  // namespace tmbench
