#pragma once

#include <array>
#include <optional>

#include "deflab/deficiency.hpp"
#include "deflab/experiment.hpp"
#include "deflab/solver.hpp"
#include "deflab/types.hpp"

namespace deflab {

// Three-point classical experiment whose testing curve is the upper envelope
// of the tangents to f at 0, s1 and s2 (plus the zero line): it never exceeds
// f and touches it at s1 and s2.
struct WitnessConstruction {
  double s1 = 0.0;
  double s2 = 0.0;
  std::array<double, 4> intercepts{};  // a_0..a_3, a_i = f(s_i) - s_i f'(s_i)
  std::array<double, 4> slopes{};      // b_0..b_3, b_i = -f'(s_i)
  std::array<double, 4> crossings{};   // t'_0..t'_3, possibly infinite
  ClassicalBinaryExperiment witness;

  // Largest f_F - f_E over a dense grid (should stay within tolerance of 0)
  // and the tangency mismatches at s1, s2.
  double domination_violation = 0.0;
  std::array<double, 2> tangency_error{};
};

WitnessConstruction tangent_witness(const BinaryExperiment& e, double s1, double s2);

// Where consecutive tangent lines meet; equal lines collapse onto the
// previous crossing and a final horizontal positive tangent yields infinity.
std::array<double, 4> crossing_points(const WitnessConstruction& w);

struct SeparationReport {
  WitnessConstruction construction;
  DeficiencyReport deficiency;   // E versus the witness; expected 0
  PovmSolveResult matching;      // match_povm(E, {p, q})
  bool feasible = false;
  double margin = 0.0;           // trusted infeasibility floor when infeasible
  bool abelian = false;
};

// Certify E >= witness in the testing order, then ask whether any POVM on E
// reproduces the witness exactly. Feasible for abelian experiments; a
// strictly positive margin exhibits the gap between the testing order and
// full deficiency.
SeparationReport separation_demo(const BinaryExperiment& e,
                                 std::optional<double> s1 = std::nullopt,
                                 std::optional<double> s2 = std::nullopt,
                                 const MatchPovmOptions& options = {});

// Default tangency points: interior of (t1, tmax) when the curve hits zero,
// otherwise spread across the positive breakpoints.
std::pair<double, double> default_witness_points(const BinaryExperiment& e);

}  // namespace deflab
