#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "deflab/curve.hpp"
#include "deflab/deficiency.hpp"
#include "deflab/witness.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_gen.hpp"

using namespace deflab;
using namespace deflab::testing;

TEST_SUITE("tangent_witness") {
  TEST_CASE("equal states collapse onto the classical floor") {
    Rng rng(1);
    DensityMatrix rho = random_density(2, rng);
    WitnessConstruction w = tangent_witness(BinaryExperiment(rho, rho), 0.5, 2.0);
    CHECK(w.witness.p[0] == doctest::Approx(0.0));
    CHECK(w.witness.p[1] == doctest::Approx(1.0));
    CHECK(w.witness.p[2] == doctest::Approx(0.0));
    CHECK((w.witness.p - w.witness.q).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("fixture E0 on its middle linear piece") {
    WitnessConstruction w = tangent_witness(e0(), 1.0, 1.25);
    CHECK(w.intercepts[1] == doctest::Approx(0.75));
    CHECK(w.intercepts[2] == doctest::Approx(0.75));
    CHECK(w.slopes[1] == doctest::Approx(0.5));
    CHECK(w.slopes[2] == doctest::Approx(0.5));
    CHECK(w.witness.p[0] == doctest::Approx(0.25));
    CHECK(w.witness.p[1] == doctest::Approx(0.0));
    CHECK(w.witness.p[2] == doctest::Approx(0.75));
    CHECK(w.witness.q[0] == doctest::Approx(0.5));
    CHECK(w.witness.q[1] == doctest::Approx(0.0));
    CHECK(w.witness.q[2] == doctest::Approx(0.5));
  }

  TEST_CASE("fixture E1 satisfies the tangency postconditions") {
    WitnessConstruction w = tangent_witness(e1(), 1.0, 4.0);
    CHECK(w.domination_violation <= 1e-9);
    CHECK(w.tangency_error[0] <= 1e-9);
    CHECK(w.tangency_error[1] <= 1e-9);
    CHECK(two_deficiency_index(e1(), w.witness.to_binary()).epsilon == 0.0);
  }

  TEST_CASE("breakpoint proximity is rejected") {
    CHECK_THROWS_AS(tangent_witness(e0(), 0.5, 1.0), PreconditionError);
    CHECK_THROWS_AS(tangent_witness(e0(), 0.2, 1.5 + 5e-7), PreconditionError);
    CHECK_THROWS_AS(tangent_witness(e0(), -1.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(tangent_witness(e0(), 1.2, 1.0), PreconditionError);
  }

  TEST_CASE("random experiments: probability rows, domination, tangency") {
    Rng rng(2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int done = 0;
    while (done < 100) {
      int dim = 2 + static_cast<int>(rng() % 4);
      BinaryExperiment e = random_binary(dim, rng);
      ExtremalTs ext = extremal_ts(e);
      double hi = ext.tmax_finite ? ext.tmax : 2.0 * breakpoints(e).back() + 1.0;
      double lo = ext.t1;
      double s1 = lo + (0.1 + 0.4 * unif(rng)) * (hi - lo);
      double s2 = lo + (0.55 + 0.4 * unif(rng)) * (hi - lo);
      bool clear = s1 > 1e-4;
      for (double b : breakpoints(e)) {
        if (std::abs(s1 - b) < 2e-4 || std::abs(s2 - b) < 2e-4) clear = false;
      }
      if (!clear) continue;
      ++done;

      WitnessConstruction w = tangent_witness(e, s1, s2);
      CHECK(w.witness.p.minCoeff() >= 0.0);
      CHECK(w.witness.q.minCoeff() >= 0.0);
      CHECK(std::abs(w.witness.p.sum() - 1.0) <= 1e-12);
      CHECK(std::abs(w.witness.q.sum() - 1.0) <= 1e-12);
      for (int i = 1; i < 4; ++i) {
        CHECK(w.intercepts[i] <= w.intercepts[i - 1] + 1e-12);
        CHECK(w.slopes[i] <= w.slopes[i - 1] + 1e-12);
      }
      CHECK(w.domination_violation <= 1e-9);
      CHECK(w.tangency_error[0] <= 1e-9);
      CHECK(w.tangency_error[1] <= 1e-9);
      CHECK(two_deficiency_index(e, w.witness.to_binary()).epsilon <= 1e-9);
    }
  }
}

TEST_SUITE("crossing_points") {
  TEST_CASE("fixture E0 at s = (1, 1.25)") {
    WitnessConstruction w = tangent_witness(e0(), 1.0, 1.25);
    CHECK(w.crossings[0] == 0.0);
    CHECK(w.crossings[1] == doctest::Approx(0.5));
    CHECK(w.crossings[2] == doctest::Approx(0.5));  // equal tangents collapse
    CHECK(w.crossings[3] == doctest::Approx(1.5));
  }

  TEST_CASE("equal states collapse the chain") {
    Rng rng(3);
    DensityMatrix rho = random_density(2, rng);
    WitnessConstruction w = tangent_witness(BinaryExperiment(rho, rho), 0.5, 2.0);
    CHECK(w.crossings[0] == 0.0);
    CHECK(w.crossings[1] == 0.0);
    CHECK(w.crossings[2] == doctest::Approx(1.0));
    CHECK(w.crossings[3] == doctest::Approx(1.0));
  }

  TEST_CASE("ordering and the piecewise formula on random data") {
    Rng rng(4);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int done = 0;
    while (done < 50) {
      BinaryExperiment e = random_binary(2 + static_cast<int>(rng() % 3), rng);
      ExtremalTs ext = extremal_ts(e);
      double hi = ext.tmax_finite ? ext.tmax : 2.0 * breakpoints(e).back() + 1.0;
      double s1 = ext.t1 + (0.15 + 0.3 * unif(rng)) * (hi - ext.t1);
      double s2 = ext.t1 + (0.6 + 0.3 * unif(rng)) * (hi - ext.t1);
      bool clear = s1 > 1e-4;
      for (double b : breakpoints(e))
        if (std::abs(s1 - b) < 2e-4 || std::abs(s2 - b) < 2e-4) clear = false;
      if (!clear) continue;
      ++done;

      WitnessConstruction w = tangent_witness(e, s1, s2);
      auto t = crossing_points(w);
      CHECK(t[0] == 0.0);
      CHECK(t[0] <= t[1] + 1e-12);
      CHECK(t[1] <= s1 + 1e-9);
      if (t[2] != t[1]) {
        CHECK(t[2] > s1 - 1e-9);
        CHECK(t[2] < s2 + 1e-9);
      }
      if (std::isfinite(t[3]) && t[3] != t[2]) CHECK(t[3] > s2 - 1e-9);

      // Piecewise envelope formula versus direct evaluation.
      for (int i = 0; i <= 200; ++i) {
        double tt = (hi * 1.2) * i / 200.0;
        double direct = classical_f(w.witness.p, w.witness.q, tt);
        double envelope = 0.0;
        for (int piece = 0; piece < 4; ++piece) {
          double line = w.intercepts[piece] - tt * w.slopes[piece];
          envelope = std::max(envelope, line);
        }
        CHECK(std::abs(direct - envelope) <= 1e-10);
      }
    }
  }
}

TEST_SUITE("separation_demo") {
  TEST_CASE("abelian fixture is feasible") {
    SeparationReport r = separation_demo(e0());
    CHECK(r.abelian);
    CHECK(r.deficiency.epsilon == 0.0);
    CHECK(r.feasible);
    CHECK(r.matching.value <= 1e-7);
  }

  TEST_CASE("noncommuting fixture is infeasible with a margin") {
    SeparationReport r = separation_demo(e1());
    CHECK_FALSE(r.abelian);
    CHECK(r.deficiency.epsilon == 0.0);
    CHECK_FALSE(r.feasible);
    CHECK(r.margin >= 1e-4);
  }

  TEST_CASE("equal states are trivially feasible") {
    Rng rng(5);
    DensityMatrix rho = random_density(2, rng);
    SeparationReport r = separation_demo(BinaryExperiment(rho, rho));
    CHECK(r.abelian);
    CHECK(r.feasible);
  }

  TEST_CASE("default points stay inside the informative range") {
    for (const BinaryExperiment& e : {e0(), e1()}) {
      auto [s1, s2] = default_witness_points(e);
      ExtremalTs ext = extremal_ts(e);
      CHECK(s1 > ext.t1);
      CHECK(s2 > s1);
      if (ext.tmax_finite) CHECK(s2 < ext.tmax);
      for (double b : breakpoints(e)) {
        CHECK(std::abs(s1 - b) > 1e-3);
        CHECK(std::abs(s2 - b) > 1e-3);
      }
    }
  }
}
