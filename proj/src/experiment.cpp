#include "deflab/experiment.hpp"

#include <cmath>
#include <random>

#include "deflab/channel.hpp"

namespace deflab {

DensityMatrix::DensityMatrix(Mat m, double tolerance) : m_(std::move(m)) {
  require_hermitian(m_);
  if (!psd_check(m_, tolerance))
    throw ValidationError("density matrix is not positive semidefinite");
  double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > tolerance)
    throw ValidationError("density matrix trace is " + std::to_string(tr) +
                          ", expected 1");
}

Experiment::Experiment(std::vector<DensityMatrix> states)
    : densities(std::move(states)) {
  if (densities.empty()) throw ValidationError("experiment needs at least one state");
  for (const auto& d : densities)
    if (d.dim() != densities.front().dim())
      throw ValidationError("experiment states live on different dimensions");
}

BinaryExperiment::BinaryExperiment(DensityMatrix r1, DensityMatrix r2)
    : rho1(std::move(r1)), rho2(std::move(r2)) {
  if (rho1.dim() != rho2.dim())
    throw ValidationError("binary experiment states live on different dimensions");
}

ClassicalBinaryExperiment::ClassicalBinaryExperiment(RVec pp, RVec qq)
    : p(std::move(pp)), q(std::move(qq)) {
  if (p.size() != q.size())
    throw ValidationError("classical experiment rows have different lengths");
  if (p.size() == 0) throw ValidationError("classical experiment has no outcomes");
  for (const RVec* v : {&p, &q}) {
    if (v->minCoeff() < -1e-12)
      throw ValidationError("classical experiment has a negative probability");
    if (std::abs(v->sum() - 1.0) > 1e-12)
      throw ValidationError("classical experiment row does not sum to 1");
  }
}

BinaryExperiment ClassicalBinaryExperiment::to_binary() const {
  const int n = outcomes();
  Mat dp = Mat::Zero(n, n), dq = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    dp(i, i) = std::max(p[i], 0.0);
    dq(i, i) = std::max(q[i], 0.0);
  }
  return BinaryExperiment(DensityMatrix(dp), DensityMatrix(dq));
}

Povm::Povm(std::vector<Mat> elements, double tolerance)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw ValidationError("POVM has no elements");
  const int n = static_cast<int>(elements_.front().rows());
  Mat sum = Mat::Zero(n, n);
  for (const auto& m : elements_) {
    require_hermitian(m);
    if (m.rows() != n) throw ValidationError("POVM elements have mixed dimensions");
    if (!psd_check(m, tolerance))
      throw ValidationError("POVM element is not positive semidefinite");
    sum += m;
  }
  if ((sum - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > tolerance)
    throw ValidationError("POVM elements do not sum to the identity");
}

bool Povm::is_projective(double tolerance) const {
  for (const auto& m : elements_)
    if ((m * m - m).cwiseAbs().maxCoeff() > tolerance) return false;
  return true;
}

LossFunction::LossFunction(RMat w) : table(std::move(w)) {
  if (table.rows() < 1 || table.cols() < 1)
    throw ValidationError("loss table is empty");
  if (table.minCoeff() < 0.0)
    throw ValidationError("loss table has a negative entry");
}

double LossFunction::total_norm() const {
  double s = 0.0;
  for (int t = 0; t < parameters(); ++t) s += theta_norm(t);
  return s;
}

double LossFunction::coefficient(int theta) const {
  if (decisions() != 2)
    throw ValidationError("loss coefficients are defined for two decisions only");
  return table(theta, 0) - table(theta, 1);
}

BinaryExperiment normalize_support(const BinaryExperiment& e) {
  Mat sum = e.rho1.mat() + e.rho2.mat();
  EigenSystem es = eig_hermitian(sum);
  double cut = kernel_cut(sum);
  int rank = 0;
  while (rank < es.dim() && es.values[rank] > cut) ++rank;
  if (rank == 0) throw ValidationError("experiment support is empty");
  Mat basis = es.vectors.leftCols(rank);
  Mat r1 = basis.adjoint() * e.rho1.mat() * basis;
  Mat r2 = basis.adjoint() * e.rho2.mat() * basis;
  return BinaryExperiment(DensityMatrix(0.5 * (r1 + r1.adjoint())),
                          DensityMatrix(0.5 * (r2 + r2.adjoint())));
}

bool is_support_normalized(const BinaryExperiment& e) {
  Mat sum = e.rho1.mat() + e.rho2.mat();
  EigenSystem es = eig_hermitian(sum);
  return es.values.minCoeff() > kernel_cut(sum);
}

bool is_abelian(const Experiment& e, double tolerance) {
  for (int i = 0; i < e.size(); ++i)
    for (int j = i + 1; j < e.size(); ++j) {
      Mat comm = e.densities[i].mat() * e.densities[j].mat() -
                 e.densities[j].mat() * e.densities[i].mat();
      if (comm.norm() > tolerance) return false;
    }
  return true;
}

ClassicalBinaryExperiment ClassicalReduction::binary() const {
  if (rows.rows() != 2)
    throw ValidationError("binary view requires exactly two parameters");
  return ClassicalBinaryExperiment(rows.row(0).transpose(), rows.row(1).transpose());
}

ClassicalReduction classical_reduction(const Experiment& e, double tolerance) {
  if (!is_abelian(e, tolerance))
    throw PreconditionError("classical reduction requires an abelian experiment");

  const int n = e.dim();
  // A generic positive combination separates the joint eigenspaces almost
  // surely; retry with fresh coefficients if an unlucky draw leaves some
  // density non-diagonal.
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int attempt = 0; attempt < 3; ++attempt) {
    Mat mix = Mat::Zero(n, n);
    if (attempt == 0 && e.size() >= 1) {
      mix = e.densities[0].mat();
      for (int k = 1; k < e.size(); ++k) mix += unif(rng) * e.densities[k].mat();
    } else {
      for (int k = 0; k < e.size(); ++k) mix += unif(rng) * e.densities[k].mat();
    }
    EigenSystem es = eig_hermitian(mix);

    bool diagonal = true;
    RMat rows(e.size(), n);
    for (int t = 0; t < e.size() && diagonal; ++t) {
      Mat d = es.vectors.adjoint() * e.densities[t].mat() * es.vectors;
      Mat off = d;
      off.diagonal().setZero();
      if (off.cwiseAbs().maxCoeff() > 1e-9) diagonal = false;
      for (int x = 0; x < n; ++x) rows(t, x) = d(x, x).real();
    }
    if (!diagonal) continue;

    std::vector<Mat> projectors;
    projectors.reserve(n);
    for (int x = 0; x < n; ++x)
      projectors.push_back(es.vectors.col(x) * es.vectors.col(x).adjoint());
    return ClassicalReduction{Povm(std::move(projectors)), std::move(rows)};
  }
  throw PreconditionError(
      "joint diagonalization failed; commutators may exceed the tolerance");
}

RVec apply_povm(const Povm& m, const DensityMatrix& rho) {
  if (m.dim() != rho.dim())
    throw ValidationError("POVM dimension does not match the state");
  RVec out(m.outcomes());
  for (int d = 0; d < m.outcomes(); ++d)
    out[d] = (m.element(d) * rho.mat()).trace().real();
  return out;
}

Mat povm_embed(const Povm& m, const RVec& f) {
  if (f.size() != m.outcomes())
    throw ValidationError("embedding vector length does not match the POVM");
  Mat out = Mat::Zero(m.dim(), m.dim());
  for (int d = 0; d < m.outcomes(); ++d) {
    double tr = m.element(d).trace().real();
    if (tr <= 1e-12)
      throw ValidationError("POVM element " + std::to_string(d) +
                            " has zero trace; embedding undefined");
    out += (f[d] / tr) * m.element(d);
  }
  return out;
}

Experiment randomize(const Experiment& e, const Channel& t) {
  if (t.dim_in() != e.dim())
    throw ValidationError("channel input dimension does not match the experiment");
  std::vector<DensityMatrix> out;
  out.reserve(e.densities.size());
  for (const auto& rho : e.densities) out.push_back(t(rho));
  return Experiment(std::move(out));
}

RVec risk(const Experiment& e, const LossFunction& w, const Povm& m) {
  if (w.parameters() != e.size())
    throw ValidationError("loss table rows do not match the parameter count");
  if (w.decisions() != m.outcomes())
    throw ValidationError("loss table columns do not match the POVM outcomes");
  RVec out(e.size());
  for (int t = 0; t < e.size(); ++t) {
    RVec probs = apply_povm(m, e.densities[t]);
    out[t] = w.table.row(t).dot(probs);
  }
  return out;
}

}  // namespace deflab
