#pragma once

#include "deflab/channel.hpp"
#include "deflab/experiment.hpp"
#include "deflab/types.hpp"

namespace deflab {

// Linear map on span{rho1, rho2} sending rho_i to sigma_i. Exists as a
// function iff equal sources map to equal targets; trace-norm contractive
// whenever E dominates F in the testing order.
struct MorphismData {
  BinaryExperiment source;
  BinaryExperiment target;
  // max over sampled span elements of ||L(x)||_1 / ||x||_1
  double contractivity_certificate = 0.0;

  // Image a*sigma1 + b*sigma2 of the span element a*rho1 + b*rho2.
  Mat apply(double a, double b) const;
  // Decompose x in span{rho1, rho2} (least squares; errors when x is not in
  // the span within tolerance) and map it.
  Mat apply_span_element(const Mat& x) const;
};

MorphismData statistical_morphism(const BinaryExperiment& e, const BinaryExperiment& f);

// Completely positive extension of the span morphism, built from extremal
// positive span elements u, v and vectors annihilating exactly one of them.
// Generally not trace preserving.
struct CpExtensionData {
  Mat u;
  Mat v;
  CVec phi;  // u phi = 0, <phi, v phi> > 0
  CVec psi;  // v psi = 0, <psi, u psi> > 0
  ChoiMatrix map;
  double trace_defect_value = 0.0;
  int branch = 0;  // 0: tmax finite, 1: tmax = inf & t1 > 0, 2: both trivial,
                   // 3: one-dimensional span
};

CpExtensionData cp_extension(const BinaryExperiment& e, const BinaryExperiment& f);

}  // namespace deflab
