#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deflab/channel.hpp"
#include "deflab/linalg.hpp"
#include "support/fixtures.hpp"
#include "support/random_gen.hpp"

using namespace deflab;
using namespace deflab::testing;

TEST_SUITE("choi") {
  TEST_CASE("identity channel is CPTP") {
    Channel id = identity_channel(3);
    CHECK(is_completely_positive(id.choi(), 1e-12));
    CHECK(id.choi().tp_defect() < 1e-12);
    Rng rng(1);
    DensityMatrix rho = random_density(3, rng);
    CHECK((id(rho).mat() - rho.mat()).norm() < 1e-12);
  }

  TEST_CASE("transpose map is positive but not completely positive") {
    ChoiMatrix t = ChoiMatrix::from_action(2, 2, [](const Mat& a) {
      return Mat(a.transpose());
    });
    CHECK_FALSE(is_completely_positive(t, 1e-9));
    CHECK(t.tp_defect() < 1e-12);  // trace preserving nonetheless
  }

  TEST_CASE("apply matches the defining action") {
    Rng rng(2);
    Channel t = random_channel(3, 2, rng);
    Mat a = random_hermitian(3, rng);
    Mat via_blocks = t.choi().apply(a);
    // Rebuild from matrix units directly.
    Mat direct = Mat::Zero(2, 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Mat unit = Mat::Zero(3, 3);
        unit(i, j) = 1.0;
        direct += a(i, j) * t.choi().apply(unit);
      }
    CHECK((via_blocks - direct).norm() < 1e-10);
  }

  TEST_CASE("channel constructor rejects non-CP and non-TP data") {
    ChoiMatrix transpose = ChoiMatrix::from_action(2, 2, [](const Mat& a) {
      return Mat(a.transpose());
    });
    CHECK_THROWS_AS(Channel{transpose}, ValidationError);
    ChoiMatrix lossy = ChoiMatrix::from_action(2, 2, [](const Mat& a) {
      return Mat(0.5 * a);
    });
    CHECK_THROWS_AS(Channel{lossy}, ValidationError);
  }
}

TEST_SUITE("trace_defect") {
  TEST_CASE("CPTP channels have none") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      Channel t = random_channel(2 + static_cast<int>(rng() % 3),
                                 2 + static_cast<int>(rng() % 3), rng);
      CHECK(trace_defect(t.choi()) <= 1e-9);
    }
  }

  TEST_CASE("zero map scores one on the normalized basis") {
    ChoiMatrix zero = ChoiMatrix::from_action(2, 2, [](const Mat&) {
      return Mat(Mat::Zero(2, 2));
    });
    CHECK(trace_defect(zero) == doctest::Approx(1.0));
  }

  TEST_CASE("halving map scores a half") {
    ChoiMatrix half = ChoiMatrix::from_action(2, 2, [](const Mat& a) {
      return Mat(0.5 * a);
    });
    CHECK(trace_defect(half) == doctest::Approx(0.5));
  }
}

TEST_SUITE("measure_prepare") {
  TEST_CASE("classical embedding produces diagonal states") {
    Povm pvm({diag2(1.0, 0.0), diag2(0.0, 1.0)});
    std::vector<DensityMatrix> outputs{DensityMatrix(diag2(1.0, 0.0)),
                                       DensityMatrix(diag2(0.0, 1.0))};
    Channel t = measure_prepare(pvm, outputs);
    DensityMatrix out = t(e1().rho2);
    CHECK(std::abs(out.mat()(0, 1)) < 1e-12);
    CHECK(out.mat()(0, 0).real() == doctest::Approx(0.5));
  }
}
