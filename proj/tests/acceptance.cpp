// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Runs the whole battery at desk scale (dimensions 2-8, fixed seeds).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "deflab/channel.hpp"
#include "deflab/curve.hpp"
#include "deflab/deficiency.hpp"
#include "deflab/morphism.hpp"
#include "deflab/solver.hpp"
#include "deflab/witness.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_gen.hpp"

using namespace deflab;
using namespace deflab::testing;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream note;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      note << what;
    }
  }
};

bool criterion_formula_consistency(Check& c) {
  Rng rng(101);
  std::uniform_real_distribution<double> ts(0.0, 6.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    BinaryExperiment e = random_binary(2 + static_cast<int>(rng() % 7), rng);
    double t = ts(rng);
    Mat d = e.rho1.mat() - t * e.rho2.mat();
    double gap = std::abs(positive_part_trace(d) - 0.5 * (trace_norm(d) + 1.0 - t));
    worst = std::max(worst, gap);
  }
  c.note << "max |Tr(.)_+ - (||.||_1+1-t)/2| = " << worst;
  c.require(worst <= 1e-9, " exceeded 1e-9");
  return c.ok;
}

bool criterion_curve_laws(Check& c) {
  Rng rng(102);
  std::uniform_real_distribution<double> ts(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 7);
    BinaryExperiment e = random_binary(dim, rng);
    auto bps = breakpoints(e);
    c.require(!bps.empty() && bps.size() <= static_cast<size_t>(dim),
              "breakpoint count out of range");
    for (int rep = 0; rep < 6; ++rep) {
      double a = ts(rng), b = ts(rng);
      if (a > b) std::swap(a, b);
      double fa = f_value(e, a), fb = f_value(e, b);
      double fm = f_value(e, 0.5 * (a + b));
      c.require(fm <= 0.5 * (fa + fb) + 1e-9, "convexity violated");
      c.require(fa >= fb - 1e-9, "monotonicity violated");
      c.require(fm >= std::max(1.0 - 0.5 * (a + b), 0.0) - 1e-9,
                "classical floor violated");
    }
    if (!c.ok) return false;
  }
  c.note << "200 experiments, all laws hold";
  return c.ok;
}

bool criterion_neyman_pearson(Check& c) {
  Rng rng(103);
  std::uniform_real_distribution<double> ts(0.05, 3.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_eq = 0.0, best_margin = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    BinaryExperiment e = random_binary(2 + static_cast<int>(rng() % 5), rng);
    double t = ts(rng);
    Mat d = e.rho1.mat() - t * e.rho2.mat();
    NpProjections np = np_projection(e, t);
    double f = f_value(e, t);
    worst_eq = std::max(worst_eq, std::abs((d * np.p_plus).trace().real() - f));

    // Perturbing away from the P_plus (+X) structure must strictly lose.
    const double delta = 0.2;
    Mat flip = Mat::Identity(d.rows(), d.cols()) - np.p_plus;
    double flipped = (d * ((1.0 - delta) * np.p_plus + delta * flip)).trace().real();
    if (trace_norm(d) > 1e-9) {
      c.require(flipped < f - 1e-10, "flipped candidate did not lose");
      best_margin = std::min(best_margin, f - flipped);
    }
    Mat g = ginibre(d.rows(), d.cols(), rng);
    Mat r = g * g.adjoint();
    r /= (eig_hermitian(r).values.maxCoeff() + unif(rng));  // 0 <= r <= I
    Mat cand = (1.0 - delta) * np.p_plus + delta * r;
    double scored = (d * cand).trace().real();
    if ((r - np.p_plus).norm() > 1e-3 && np.p_zero.norm() < 1e-9)
      c.require(scored < f + 1e-12, "random candidate beat the optimum");
  }
  c.note << "max equality gap " << worst_eq << ", min strict margin " << best_margin;
  c.require(worst_eq <= 1e-9, " equality gap above 1e-9");
  return c.ok;
}

bool criterion_derivative_formula(Check& c) {
  Rng rng(104);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  std::vector<BinaryExperiment> experiments{e0(), e1()};
  for (int i = 0; i < 8; ++i)
    experiments.push_back(random_binary(2 + static_cast<int>(rng() % 5), rng));
  for (const auto& e : experiments) {
    auto bps = breakpoints(e);
    double hi = 1.5 * bps.back() + 0.5;
    int done = 0;
    while (done < 50) {
      double s = 0.02 + unif(rng) * hi;
      bool clear = true;
      for (double b : bps)
        if (std::abs(s - b) < 2e-3) clear = false;
      if (!clear) continue;
      BinaryExperiment en = normalize_support(e);
      int branches =
          eig_hermitian(Mat(en.rho1.mat() - s * en.rho2.mat())).cluster_count();
      int branch = static_cast<int>(rng() % branches);
      double analytic;
      try {
        analytic = eigencurve_derivative(e, s, branch);
      } catch (const PreconditionError&) {
        continue;  // exceptional point; draw another s
      }
      double fd = branch_derivative_fd(e, s, branch);
      worst = std::max(worst, std::abs(analytic - fd));
      ++done;
    }
  }
  c.note << "max |analytic - finite difference| = " << worst;
  c.require(worst <= 1e-6, " exceeded 1e-6");
  return c.ok;
}

bool criterion_deficiency_oracle(Check& c) {
  Rng rng(105);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 4);
    RVec pe = random_probability(dim, rng), qe = random_probability(dim, rng);
    RVec pf = random_probability(dim, rng), qf = random_probability(dim, rng);
    DeficiencyReport fast =
        two_deficiency_index(ClassicalBinaryExperiment(pe, qe).to_binary(),
                             ClassicalBinaryExperiment(pf, qf).to_binary());
    ClassicalDeficiency brute = classical_two_deficiency_brute(pe, qe, pf, qf);
    worst = std::max(worst, std::abs(fast.epsilon - brute.epsilon));
  }
  DeficiencyReport documented = two_deficiency_index(f0(), e0());
  c.note << "max |engine - brute force| = " << worst << ", documented eps = "
         << documented.epsilon << " at t = " << documented.witness_t;
  c.require(worst <= 1e-7, " oracle gap above 1e-7");
  c.require(std::abs(documented.epsilon - 0.125) <= 1e-6, " documented eps wrong");
  c.require(std::abs(documented.witness_t - 1.0) <= 1e-4, " documented t wrong");
  return c.ok;
}

bool criterion_witness_lemma(Check& c) {
  Rng rng(106);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int done = 0;
  double worst_dom = 0.0, worst_tan = 0.0;
  while (done < 100) {
    int dim = 2 + static_cast<int>(rng() % 5);
    BinaryExperiment e = random_binary(dim, rng);
    ExtremalTs ext = extremal_ts(e);
    double hi = ext.tmax_finite ? ext.tmax : 2.0 * breakpoints(e).back() + 1.0;
    double s1 = ext.t1 + (0.1 + 0.4 * unif(rng)) * (hi - ext.t1);
    double s2 = ext.t1 + (0.55 + 0.4 * unif(rng)) * (hi - ext.t1);
    bool clear = s1 > 1e-4;
    for (double b : breakpoints(e))
      if (std::abs(s1 - b) < 2e-4 || std::abs(s2 - b) < 2e-4) clear = false;
    if (!clear) continue;
    ++done;

    WitnessConstruction w = tangent_witness(e, s1, s2);
    worst_dom = std::max(worst_dom, w.domination_violation);
    worst_tan = std::max(worst_tan, std::max(w.tangency_error[0], w.tangency_error[1]));
    c.require(w.witness.p.minCoeff() >= 0.0 && w.witness.q.minCoeff() >= 0.0,
              "witness rows not nonnegative");
    for (int i = 1; i < 4; ++i) {
      c.require(w.intercepts[i] <= w.intercepts[i - 1], "intercept chain broken");
      c.require(w.slopes[i] <= w.slopes[i - 1], "slope chain broken");
    }
    if (!c.ok) return false;
  }
  c.note << "100 witnesses: max domination violation " << worst_dom
         << ", max tangency error " << worst_tan;
  c.require(worst_dom <= 1e-9, " domination above 1e-9");
  c.require(worst_tan <= 1e-9, " tangency above 1e-9");
  return c.ok;
}

bool criterion_separation(Check& c) {
  SeparationReport abelian = separation_demo(e0());
  c.require(abelian.feasible, "abelian fixture not feasible");
  c.require(abelian.matching.value <= 1e-7, "abelian residual above 1e-7");
  c.require(abelian.deficiency.epsilon == 0.0, "abelian witness not dominated");

  SeparationReport split = separation_demo(e1(), 1.0, 4.0);
  c.require(split.deficiency.epsilon == 0.0, "E1 does not dominate its witness");
  c.require(!split.feasible, "E1 matching unexpectedly feasible");
  c.require(split.margin >= 1e-4, "E1 margin below 1e-4");

  // Independent cross-validation: dense Bloch search over three-outcome
  // qubit POVMs for the same targets.
  Rng rng(107);
  BlochSearchResult oracle =
      bloch_povm_search(e1(), split.construction.witness.p,
                        split.construction.witness.q, 1000000, rng);
  c.note << "abelian residual " << abelian.matching.value << "; E1 solver value "
         << split.matching.value << ", floor " << split.matching.certificate
         << ", oracle best " << oracle.best;
  c.require(oracle.best >= 1e-4, " oracle found a near-feasible POVM");
  c.require(split.matching.value <= oracle.best + 1e-4,
            " solver lost to the sampling oracle");
  return c.ok;
}

bool criterion_bayes_equivalence(Check& c) {
  Rng rng(108);
  double worst = -1.0;
  for (int trial = 0; trial < 200; ++trial) {
    BinaryExperiment e = random_binary(2 + static_cast<int>(rng() % 3), rng);
    BinaryExperiment f = random_binary(2 + static_cast<int>(rng() % 3), rng);
    double eps = two_deficiency_index(e, f).epsilon;
    auto [ok, bad_t] = check_two_deficiency(e, f, eps);
    c.require(ok, "index fails its own level");
    LossFunction w = random_loss(2, 2, rng);
    double slack = bayes_risk(f.to_experiment(), w) + eps * w.total_norm() + 1e-8 -
                   bayes_risk(e.to_experiment(), w);
    worst = std::max(worst, -slack);
    if (!c.ok) return false;
  }
  c.note << "200 triples, worst slack violation " << worst;
  c.require(worst <= 0.0, " risk inequality violated");
  return c.ok;
}

bool criterion_cp_extension(Check& c) {
  Rng rng(109);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int done = 0;
  double worst_cp = 0.0, worst_ext = 0.0;
  while (done < 50) {
    int dim = 2 + static_cast<int>(rng() % 3);
    BinaryExperiment e = normalize_support(random_binary(dim, rng));
    BinaryExperiment f = e;
    bool witness_pair = done % 3 == 2;
    if (witness_pair) {
      ExtremalTs ext = extremal_ts(e);
      double hi = ext.tmax_finite ? ext.tmax : 2.0 * breakpoints(e).back() + 1.0;
      double s1 = ext.t1 + 0.35 * (hi - ext.t1);
      double s2 = ext.t1 + 0.75 * (hi - ext.t1);
      bool clear = true;
      for (double b : breakpoints(e))
        if (std::abs(s1 - b) < 2e-4 || std::abs(s2 - b) < 2e-4) clear = false;
      if (!clear) continue;
      f = tangent_witness(e, s1, s2).witness.to_binary();
    } else {
      Channel t = random_channel(dim, 2 + static_cast<int>(rng() % 3), rng);
      Experiment image = randomize(e.to_experiment(), t);
      f = BinaryExperiment(image.densities[0], image.densities[1]);
    }
    ++done;

    CpExtensionData x = cp_extension(e, f);
    worst_cp = std::max(worst_cp, x.map.cp_defect());
    worst_ext = std::max(
        worst_ext,
        std::max(trace_norm(x.map.apply(e.rho1.mat()) - f.rho1.mat()),
                 trace_norm(x.map.apply(e.rho2.mat()) - f.rho2.mat())));
    if (!c.ok) return false;
  }

  WitnessConstruction w = tangent_witness(e1(), 1.0, 4.0);
  CpExtensionData documented = cp_extension(e1(), w.witness.to_binary());
  c.note << "50 pairs: worst CP defect " << worst_cp << ", worst extension error "
         << worst_ext << "; documented trace defect "
         << documented.trace_defect_value;
  c.require(worst_cp <= 1e-9, " CP defect above 1e-9");
  c.require(worst_ext <= 1e-8, " extension error above 1e-8");
  c.require(documented.trace_defect_value > 1e-3,
            " documented trace defect not above 1e-3");
  return c.ok;
}

bool criterion_data_processing(Check& c) {
  Rng rng(110);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 3);
    BinaryExperiment e = random_binary(dim, rng);
    Channel t = random_channel(dim, 2 + static_cast<int>(rng() % 3), rng,
                               2 + static_cast<int>(rng() % 2));
    Experiment image = randomize(e.to_experiment(), t);
    double eps =
        two_deficiency_index(e, BinaryExperiment(image.densities[0],
                                                 image.densities[1]))
            .epsilon;
    worst = std::max(worst, eps);
  }
  c.note << "100 channels, worst index " << worst;
  c.require(worst <= 1e-8, " exceeded 1e-8");
  return c.ok;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<bool(Check&)> run;
  };
  std::vector<Criterion> criteria{
      {"formula consistency", criterion_formula_consistency},
      {"curve laws", criterion_curve_laws},
      {"Neyman-Pearson optimality", criterion_neyman_pearson},
      {"eigenvalue derivative formula", criterion_derivative_formula},
      {"deficiency index oracle", criterion_deficiency_oracle},
      {"tangent witness lemma", criterion_witness_lemma},
      {"separation demonstration", criterion_separation},
      {"Bayes risk equivalence", criterion_bayes_equivalence},
      {"completely positive extension", criterion_cp_extension},
      {"data processing", criterion_data_processing},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string error;
    try {
      ok = criteria[i].run(check);
    } catch (const std::exception& e) {
      error = e.what();
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::string detail = check.note.str();
    if (!error.empty()) detail += " [exception: " + error + "]";
    std::printf("[%2zu/10] %s %-32s (%s; %.1f s)\n", i + 1, ok ? "PASS" : "FAIL",
                criteria[i].name, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
