#include "deflab/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deflab/curve.hpp"

namespace deflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double classical_f(const RVec& p, const RVec& q, double t) {
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) s += std::max(p[i] - t * q[i], 0.0);
  return s;
}

}  // namespace

WitnessConstruction tangent_witness(const BinaryExperiment& e, double s1, double s2) {
  if (!(0.0 < s1 && s1 < s2))
    throw PreconditionError("tangency points must satisfy 0 < s1 < s2");
  BinaryExperiment en = normalize_support(e);
  for (double b : breakpoints(en))
    for (double s : {s1, s2})
      if (std::abs(s - b) <= 1e-6)
        throw PreconditionError("breakpoint proximity: f is not differentiable there");

  std::array<double, 4> a{1.0, 0.0, 0.0, 0.0};
  std::array<double, 4> b{1.0, 0.0, 0.0, 0.0};
  const std::array<double, 2> s{s1, s2};
  for (int i = 0; i < 2; ++i) {
    double fv = f_value(en, s[i]);
    double fd = f_derivative(en, s[i]);
    a[i + 1] = fv - s[i] * fd;
    b[i + 1] = -fd;
  }

  // Convexity and monotonicity force 1 >= a1 >= a2 >= 0 and
  // 1 >= b1 >= b2 >= 0 up to roundoff; enforce the chains exactly.
  for (int i = 1; i <= 2; ++i) {
    if (a[i] > a[i - 1] + 1e-9 || b[i] > b[i - 1] + 1e-9)
      throw ConstructionError("tangent data violates the monotone chain");
    a[i] = std::clamp(a[i], 0.0, a[i - 1]);
    b[i] = std::clamp(b[i], 0.0, b[i - 1]);
  }

  RVec p(3), q(3);
  for (int i = 1; i <= 3; ++i) {
    p[i - 1] = a[i - 1] - a[i];
    q[i - 1] = b[i - 1] - b[i];
  }

  WitnessConstruction w{s1, s2, a, b, {}, ClassicalBinaryExperiment(p, q)};
  w.crossings = crossing_points(w);

  // Verification summary: domination on a dense grid and tangency at s1, s2.
  double hi = 1.5 * std::max(s2, breakpoints(en).back()) + 1.0;
  for (int i = 0; i <= 1024; ++i) {
    double t = hi * static_cast<double>(i) / 1024.0;
    w.domination_violation = std::max(
        w.domination_violation, classical_f(p, q, t) - f_value(en, t));
  }
  for (int i = 0; i < 2; ++i)
    w.tangency_error[i] = std::abs(classical_f(p, q, s[i]) - f_value(en, s[i]));
  return w;
}

std::array<double, 4> crossing_points(const WitnessConstruction& w) {
  std::array<double, 4> t{0.0, 0.0, 0.0, 0.0};
  for (int i = 1; i <= 3; ++i) {
    double da = w.intercepts[i - 1] - w.intercepts[i];
    double db = w.slopes[i - 1] - w.slopes[i];
    if (da <= 1e-12 && db <= 1e-12) {
      t[i] = t[i - 1];  // identical lines
    } else if (db <= 1e-12) {
      t[i] = kInf;  // parallel, the earlier line stays above forever
    } else {
      t[i] = da / db;
    }
  }
  return t;
}

std::pair<double, double> default_witness_points(const BinaryExperiment& e) {
  BinaryExperiment en = normalize_support(e);
  std::vector<double> bps = breakpoints(en);
  ExtremalTs ext = extremal_ts(en);

  double s1, s2;
  if (ext.tmax_finite) {
    // Both points must sit strictly inside (t1, tmax); beyond tmax the curve
    // vanishes and the second tangent degenerates to the zero line.
    double lo = ext.t1;
    s1 = lo + 0.3 * (ext.tmax - lo);
    s2 = lo + 0.7 * (ext.tmax - lo);
  } else {
    std::vector<double> positive;
    for (double b : bps)
      if (b > 1e-6) positive.push_back(b);
    if (positive.size() >= 2)
      s1 = std::sqrt(positive[0] * positive[1]);
    else if (positive.size() == 1)
      s1 = 0.5 * positive[0];
    else
      s1 = 1.0;
    s2 = 1.5 * bps.back();
    if (s2 <= s1) s2 = 2.0 * s1;
  }

  auto nudge = [&](double s) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      bool clear = s > 1e-6;
      for (double b : bps)
        if (std::abs(s - b) <= 1.1e-3) clear = false;
      if (clear) return s;
      s += 1.2e-3;
    }
    return s;
  };
  s1 = nudge(s1);
  s2 = nudge(std::max(s2, s1 + 2.5e-3));
  return {s1, s2};
}

SeparationReport separation_demo(const BinaryExperiment& e,
                                 std::optional<double> s1_opt,
                                 std::optional<double> s2_opt,
                                 const MatchPovmOptions& options) {
  auto [s1_def, s2_def] = default_witness_points(e);
  double s1 = s1_opt.value_or(s1_def);
  double s2 = s2_opt.value_or(s2_def);

  BinaryExperiment en = normalize_support(e);
  WitnessConstruction w = tangent_witness(en, s1, s2);

  SeparationReport report{w,
                          two_deficiency_index(en, w.witness.to_binary()),
                          match_povm(en.to_experiment(), {w.witness.p, w.witness.q},
                                     options),
                          false,
                          0.0,
                          is_abelian(en.to_experiment())};
  report.feasible = report.matching.value <= options.tolerance;
  report.margin = report.feasible ? report.matching.value
                                  : report.matching.certificate;
  return report;
}

}  // namespace deflab
