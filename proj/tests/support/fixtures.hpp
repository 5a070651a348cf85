#pragma once

#include "deflab/experiment.hpp"

namespace deflab::testing {

// Diagonal pair with breakpoints {0.5, 1.5}: f(t) = (.75-.5t)_+ + (.25-.5t)_+.
inline BinaryExperiment e0() {
  Mat r1 = Mat::Zero(2, 2), r2 = Mat::Zero(2, 2);
  r1(0, 0) = 0.75;
  r1(1, 1) = 0.25;
  r2(0, 0) = 0.5;
  r2(1, 1) = 0.5;
  return BinaryExperiment(DensityMatrix(r1), DensityMatrix(r2));
}

// Noncommuting qubit pair; breakpoints are the roots of
// 0.09 t^2 - 0.5 t + 0.09 = 0.
inline BinaryExperiment e1() {
  Mat r1 = Mat::Zero(2, 2), r2 = Mat::Zero(2, 2);
  r1(0, 0) = 0.9;
  r1(1, 1) = 0.1;
  r2(0, 0) = 0.5;
  r2(0, 1) = 0.4;
  r2(1, 0) = 0.4;
  r2(1, 1) = 0.5;
  return BinaryExperiment(DensityMatrix(r1), DensityMatrix(r2));
}

// Totally uninformative pair (I/2, I/2).
inline BinaryExperiment f0() {
  Mat half = 0.5 * Mat::Identity(2, 2);
  return BinaryExperiment(DensityMatrix(half), DensityMatrix(half));
}

inline Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline Mat diag3(double a, double b, double c) {
  Mat m = Mat::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

}  // namespace deflab::testing
