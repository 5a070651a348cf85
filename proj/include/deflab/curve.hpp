#pragma once

#include <vector>

#include "deflab/experiment.hpp"
#include "deflab/types.hpp"

namespace deflab {

// Optimal weighted testing payoff f(t) = Tr(rho1 - t*rho2)_+. Defined for any
// real t; equals (||rho1 - t*rho2||_1 + 1 - t) / 2.
double f_value(const BinaryExperiment& e, double t);

struct NpProjections {
  Mat p_plus;  // support of (rho1 - t*rho2)_+
  Mat p_zero;  // kernel projection of rho1 - t*rho2
};

// The essentially unique optimal test at threshold t: every maximizer of
// Tr((rho1 - t*rho2) M) over 0 <= M <= I has the form p_plus + X with
// 0 <= X <= p_zero.
NpProjections np_projection(const BinaryExperiment& e, double t);

// All t >= 0 where rho1 - t*rho2 is singular on the common support; the kinks
// of f. Always nonempty for a support-normalized pair, at most dim entries.
std::vector<double> breakpoints(const BinaryExperiment& e);

struct ExtremalTs {
  double t1 = 0.0;       // max{t >= 0 : rho1 - t*rho2 >= 0}
  double tmax = 0.0;     // min{t >= 0 : rho1 - t*rho2 <= 0}, valid when finite
  bool tmax_finite = false;
};

ExtremalTs extremal_ts(const BinaryExperiment& e);

// Slope of the i-th eigenvalue branch of rho1 - t*rho2 at s, computed from
// -(1/m_i) Tr(rho2 P_i(s)). Branches are indexed by descending eigenvalue of
// the support-compressed pencil. Errors at exceptional points where distinct
// branches collide.
double eigencurve_derivative(const BinaryExperiment& e, double s, int branch);

// f'(s) = -Tr(rho2 P_{s,+}) for s >= 0 away from the breakpoints; always in
// [-1, 0].
double f_derivative(const BinaryExperiment& e, double s);

struct EigenBranch {
  int multiplicity = 0;
  std::vector<double> values;       // one per grid node
  std::vector<Mat> projections;     // populated only when requested
};

// Sampled analytics of t -> f(t): breakpoints, extremal thresholds, and the
// eigenvalue branches matched across a uniform grid by projector overlap.
class TestingCurve {
 public:
  static TestingCurve build(const BinaryExperiment& e, double grid_step = 1e-2,
                            bool keep_projections = false);

  const BinaryExperiment& experiment() const { return experiment_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  double t1() const { return extremal_.t1; }
  double tmax() const { return extremal_.tmax; }
  bool tmax_finite() const { return extremal_.tmax_finite; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<EigenBranch>& branches() const { return branches_; }
  const std::vector<double>& exceptional_points() const { return exceptional_; }
  double value(double t) const { return f_value(experiment_, t); }

 private:
  explicit TestingCurve(BinaryExperiment e) : experiment_(std::move(e)) {}

  BinaryExperiment experiment_;  // support-normalized
  std::vector<double> breakpoints_;
  ExtremalTs extremal_;
  std::vector<double> grid_;
  std::vector<EigenBranch> branches_;
  std::vector<double> exceptional_;
};

}  // namespace deflab
