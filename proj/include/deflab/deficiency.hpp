#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "deflab/experiment.hpp"
#include "deflab/solver.hpp"
#include "deflab/types.hpp"

namespace deflab {

struct DeficiencyReport {
  double epsilon = 0.0;
  double witness_t = 0.0;                      // argmax location
  std::vector<std::array<double, 3>> samples;  // (t, f_E, f_F)
  std::string method;
};

struct DeficiencyOptions {
  int grid_points = 512;
  double refine_tolerance = 1e-9;
};

// Minimal eps with f_E(t) >= f_F(t) - (1+t) eps for all t >= 0, located by a
// breakpoint-aware grid plus golden-section refinement. Values below the
// exact-deficiency clamp are reported as zero.
DeficiencyReport two_deficiency_index(const BinaryExperiment& e,
                                      const BinaryExperiment& f,
                                      const DeficiencyOptions& options = {});

// True when two_deficiency_index(e, f) <= eps; on failure also reports a
// threshold where the trace-norm inequality fails beyond tolerance.
std::pair<bool, std::optional<double>> check_two_deficiency(
    const BinaryExperiment& e, const BinaryExperiment& f, double eps,
    const DeficiencyOptions& options = {});

// Minimal summed risk over POVMs with |D| decisions. Two decisions use the
// closed form sum_theta W(theta,0) - Tr[sum_theta A_theta rho_theta]_+; more
// decisions delegate to minimize_bayes.
double bayes_risk(const Experiment& e, const LossFunction& w);

struct MeasurementCheck {
  bool deficient = true;
  std::vector<double> residuals;  // min-max matching value per measurement
};

// Necessary test of (k, eps)-deficiency against the supplied measurements on
// F: each N must admit an M on E with max_theta (1/2)||M(rho) - N(sigma)||_1
// within eps.
MeasurementCheck check_deficiency_vs_measurements(
    const Experiment& e, const Experiment& f, double eps,
    const std::vector<Povm>& measurements, const MatchPovmOptions& options = {});

}  // namespace deflab
