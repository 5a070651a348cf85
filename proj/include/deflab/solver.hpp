#pragma once

#include <vector>

#include "deflab/experiment.hpp"
#include "deflab/types.hpp"

namespace deflab {

struct PovmSolveResult {
  Povm povm;
  double value = 0.0;
  double certificate = 0.0;        // dual bound / trusted infeasibility floor
  std::vector<double> residuals;   // per-constraint diagnostics
  int iterations = 0;
  bool converged = false;
};

struct MinimizeBayesOptions {
  int max_iterations = 100000;
  double gap_target = 1e-8;
  bool warm_start = true;   // closed-form start for two outcomes
};

// Minimize sum_d Tr(B_d M_d) over POVMs by projected subgradient with Polyak
// steps; the certificate is a feasible value of the dual
// max{Tr Y : Y <= B_d for all d}.
PovmSolveResult minimize_bayes(const std::vector<Mat>& bs,
                               const MinimizeBayesOptions& options = {});

struct MatchPovmOptions {
  int sweep_cap = 20000;
  double tolerance = tol::solver;
  unsigned seed = 1234;
  int restarts = 5;
};

// Minimize max_theta (1/2) || M(rho_theta) - q_theta ||_1 over POVMs via
// cyclic projections plus an epigraph bisection. A value at solver tolerance
// certifies an exact match; for strictly positive optima the certificate
// holds the restart-agreed level below which every feasibility attempt
// failed.
PovmSolveResult match_povm(const Experiment& e, const std::vector<RVec>& targets,
                           const MatchPovmOptions& options = {});

// Nearest (Frobenius) POVM to a family of Hermitian matrices, by Dykstra
// alternation between the product PSD cone and the sum-to-identity subspace.
Povm project_to_povm(const std::vector<Mat>& raw);

}  // namespace deflab
