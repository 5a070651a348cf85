#include "deflab/deficiency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

#include "deflab/curve.hpp"
#include "deflab/linalg.hpp"

namespace deflab {

namespace {

int thread_cap() {
  const char* env = std::getenv("DEFLAB_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  if (v < 1) return 1;
  unsigned hw = std::thread::hardware_concurrency();
  return std::min<int>(v, hw == 0 ? 1 : static_cast<int>(hw));
}

// Evaluate fn over all indices; chunked threads when DEFLAB_THREADS allows.
// Results land by index, so the outcome is order-independent.
template <class Fn>
void parallel_for(int count, Fn&& fn) {
  int threads = std::min(thread_cap(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

double golden_max(const std::function<double(double)>& g, double a, double b,
                  double tolerance, double* arg) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  while (b - a > tolerance) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = g(x1);
    }
  }
  *arg = 0.5 * (a + b);
  return g(*arg);
}

}  // namespace

DeficiencyReport two_deficiency_index(const BinaryExperiment& e,
                                      const BinaryExperiment& f,
                                      const DeficiencyOptions& options) {
  auto gap = [&](double t) {
    return std::max(f_value(f, t) - f_value(e, t), 0.0) / (1.0 + t);
  };

  std::vector<double> kinks = breakpoints(e);
  for (double b : breakpoints(f)) kinks.push_back(b);
  double largest = 0.0;
  for (double b : kinks) largest = std::max(largest, b);
  const double t_star = 2.0 * largest + 2.0;

  std::vector<double> ts = kinks;
  const int n = std::max(options.grid_points, 2);
  for (int i = 0; i < n; ++i)
    ts.push_back(t_star * static_cast<double>(i) / (n - 1));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-12; }),
           ts.end());

  DeficiencyReport report;
  report.method = "breakpoint-grid+golden";
  report.samples.resize(ts.size());
  parallel_for(static_cast<int>(ts.size()), [&](int i) {
    report.samples[i] = {ts[i], f_value(e, ts[i]), f_value(f, ts[i])};
  });

  int best = 0;
  double best_val = -1.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    double v = std::max(report.samples[i][2] - report.samples[i][1], 0.0) /
               (1.0 + ts[i]);
    if (v > best_val) {
      best_val = v;
      best = static_cast<int>(i);
    }
  }

  double lo = ts[std::max(best - 1, 0)];
  double hi = ts[std::min<size_t>(best + 1, ts.size() - 1)];
  double arg = ts[best];
  double refined = best_val;
  if (hi > lo) refined = golden_max(gap, lo, hi, options.refine_tolerance, &arg);
  if (refined < best_val) {
    refined = best_val;
    arg = ts[best];
  }

  // Beyond t_star both curves are constant, so the tail is maximal at t_star
  // itself, which the grid already contains.
  report.epsilon = refined;
  report.witness_t = arg;
  if (report.epsilon < tol::deficiency) report.epsilon = 0.0;
  return report;
}

std::pair<bool, std::optional<double>> check_two_deficiency(
    const BinaryExperiment& e, const BinaryExperiment& f, double eps,
    const DeficiencyOptions& options) {
  DeficiencyReport report = two_deficiency_index(e, f, options);
  if (report.epsilon <= eps + tol::deficiency) return {true, std::nullopt};
  return {false, report.witness_t};
}

double bayes_risk(const Experiment& e, const LossFunction& w) {
  if (w.parameters() != e.size())
    throw ValidationError("loss table rows do not match the parameter count");
  const int k = w.decisions();
  if (k < 2) throw ValidationError("a decision problem needs at least two decisions");

  double value;
  if (k == 2) {
    Mat weighted = Mat::Zero(e.dim(), e.dim());
    double offset = 0.0;
    for (int t = 0; t < e.size(); ++t) {
      weighted += w.coefficient(t) * e.densities[t].mat();
      offset += w.table(t, 0);
    }
    value = offset - positive_part_trace(weighted);
  } else {
    std::vector<Mat> bs;
    bs.reserve(k);
    for (int d = 0; d < k; ++d) {
      Mat b = Mat::Zero(e.dim(), e.dim());
      for (int t = 0; t < e.size(); ++t) b += w.table(t, d) * e.densities[t].mat();
      bs.push_back(std::move(b));
    }
    PovmSolveResult r = minimize_bayes(bs);
    if (!r.converged)
      throw SolverError("Bayes risk solver failed to certify its optimum");
    value = r.value;
  }
  return std::clamp(value, 0.0, w.total_norm());
}

MeasurementCheck check_deficiency_vs_measurements(
    const Experiment& e, const Experiment& f, double eps,
    const std::vector<Povm>& measurements, const MatchPovmOptions& options) {
  MeasurementCheck out;
  for (const auto& n : measurements) {
    if (n.dim() != f.dim())
      throw ValidationError("measurement dimension does not match the target experiment");
    std::vector<RVec> targets;
    targets.reserve(f.size());
    for (const auto& sigma : f.densities) targets.push_back(apply_povm(n, sigma));
    PovmSolveResult r = match_povm(e, targets, options);
    out.residuals.push_back(r.value);
    if (r.value > eps + 10.0 * options.tolerance) out.deficient = false;
  }
  return out;
}

}  // namespace deflab
