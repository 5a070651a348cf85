#pragma once

#include <vector>

#include "deflab/linalg.hpp"
#include "deflab/types.hpp"

namespace deflab {

class Channel;

// Unit-trace positive semidefinite Hermitian matrix. Validates on
// construction; the payload is immutable afterwards.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat m, double tolerance = tol::numeric);

  const Mat& mat() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Mat m_;
};

// Finite parametrized family of states on a common matrix algebra.
struct Experiment {
  std::vector<DensityMatrix> densities;

  explicit Experiment(std::vector<DensityMatrix> states);
  int dim() const { return densities.front().dim(); }
  int size() const { return static_cast<int>(densities.size()); }
};

// Two-hypothesis experiment (rho1, rho2); the central object here.
struct BinaryExperiment {
  DensityMatrix rho1;
  DensityMatrix rho2;

  BinaryExperiment(DensityMatrix r1, DensityMatrix r2);
  int dim() const { return rho1.dim(); }
  Experiment to_experiment() const { return Experiment({rho1, rho2}); }
};

// Pair of probability vectors over a common finite outcome set.
struct ClassicalBinaryExperiment {
  RVec p;
  RVec q;

  ClassicalBinaryExperiment(RVec pp, RVec qq);
  int outcomes() const { return static_cast<int>(p.size()); }
  // Embed as diagonal density matrices of dimension |outcomes|.
  BinaryExperiment to_binary() const;
};

// Positive operator valued measure: PSD elements summing to the identity.
class Povm {
 public:
  explicit Povm(std::vector<Mat> elements, double tolerance = tol::numeric);

  const std::vector<Mat>& elements() const { return elements_; }
  const Mat& element(int d) const { return elements_[d]; }
  int outcomes() const { return static_cast<int>(elements_.size()); }
  int dim() const { return static_cast<int>(elements_.front().rows()); }
  bool is_projective(double tolerance = tol::numeric) const;

 private:
  std::vector<Mat> elements_;
};

// Nonnegative loss table W(theta, d).
struct LossFunction {
  RMat table;  // rows: theta, cols: decisions

  explicit LossFunction(RMat w);
  int parameters() const { return static_cast<int>(table.rows()); }
  int decisions() const { return static_cast<int>(table.cols()); }
  double theta_norm(int theta) const { return table.row(theta).maxCoeff(); }
  double total_norm() const;
  // A_theta = W(theta, 0) - W(theta, 1); only defined for two decisions.
  double coefficient(int theta) const;
};

// Compress both states onto supp(rho1 + rho2); output dimension is the rank
// of the sum and traces are preserved.
BinaryExperiment normalize_support(const BinaryExperiment& e);

bool is_support_normalized(const BinaryExperiment& e);

// True when all pairs of densities commute within the Frobenius tolerance.
bool is_abelian(const Experiment& e, double tolerance = tol::breakpoint);

// Joint eigenbasis reduction of an abelian experiment: a rank-one PVM P and
// the probability rows p_theta = P(rho_theta).
struct ClassicalReduction {
  Povm pvm;
  RMat rows;  // |Theta| x |X|

  ClassicalBinaryExperiment binary() const;
};

ClassicalReduction classical_reduction(const Experiment& e,
                                       double tolerance = tol::breakpoint);

// Outcome distribution d -> Tr(M_d rho).
RVec apply_povm(const Povm& m, const DensityMatrix& rho);

// sum_d f(d) (Tr M_d)^{-1} M_d; every element must have positive trace.
Mat povm_embed(const Povm& m, const RVec& f);

// Image experiment {T(rho_theta)} under a CPTP channel.
Experiment randomize(const Experiment& e, const Channel& t);

// Per-theta average loss of the decision procedure M.
RVec risk(const Experiment& e, const LossFunction& w, const Povm& m);

}  // namespace deflab
