#include "deflab/morphism.hpp"

#include <cmath>
#include <random>

#include "deflab/curve.hpp"
#include "deflab/deficiency.hpp"
#include "deflab/linalg.hpp"

namespace deflab {

namespace {

void require_dominates(const BinaryExperiment& e, const BinaryExperiment& f) {
  DeficiencyReport r = two_deficiency_index(e, f);
  if (r.epsilon > 1e-8)
    throw DeficiencyPreconditionError(
        "source does not dominate the target in the testing order (eps = " +
        std::to_string(r.epsilon) + ")");
}

bool states_equal(const Mat& a, const Mat& b) {
  return trace_norm(a - b) <= 1e-12;
}

// Kernel vector of u maximizing <x, w x>, via the compression of w onto
// ker(u). Returns false when the kernel is empty or w vanishes on it.
bool kernel_vector_maximizing(const Mat& u, const Mat& w, CVec* out) {
  EigenSystem es = eig_hermitian(u);
  double cut = std::max(1e-8 * std::max(1.0, es.values.cwiseAbs().maxCoeff()), 1e-12);
  int first = es.dim();
  while (first > 0 && std::abs(es.values[first - 1]) <= cut) --first;
  int kdim = es.dim() - first;
  if (kdim == 0) return false;
  Mat basis = es.vectors.rightCols(kdim);
  EigenSystem cs = eig_hermitian(Mat(basis.adjoint() * w * basis));
  if (cs.values[0] <= 1e-9) return false;
  *out = basis * cs.vectors.col(0);
  return true;
}

}  // namespace

Mat MorphismData::apply(double a, double b) const {
  return a * target.rho1.mat() + b * target.rho2.mat();
}

Mat MorphismData::apply_span_element(const Mat& x) const {
  const Mat& r1 = source.rho1.mat();
  const Mat& r2 = source.rho2.mat();
  Eigen::Matrix2d gram;
  gram << (r1 * r1).trace().real(), (r1 * r2).trace().real(),
      (r2 * r1).trace().real(), (r2 * r2).trace().real();
  Eigen::Vector2d rhs((r1 * x).trace().real(), (r2 * x).trace().real());
  Eigen::Vector2d coeff = gram.completeOrthogonalDecomposition().solve(rhs);
  Mat residual = x - coeff[0] * r1 - coeff[1] * r2;
  if (residual.cwiseAbs().maxCoeff() > tol::numeric * std::max(1.0, x.cwiseAbs().maxCoeff()))
    throw ValidationError("element is not in the span of the experiment");
  return apply(coeff[0], coeff[1]);
}

MorphismData statistical_morphism(const BinaryExperiment& e, const BinaryExperiment& f) {
  if (states_equal(e.rho1.mat(), e.rho2.mat()) &&
      !states_equal(f.rho1.mat(), f.rho2.mat()))
    throw ConstructionError(
        "morphism is ill-defined: equal sources with distinct targets");
  require_dominates(e, f);

  MorphismData data{e, f, 0.0};
  std::mt19937_64 rng(0x40a5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double a = gauss(rng), b = gauss(rng);
    double source_norm = trace_norm(a * e.rho1.mat() + b * e.rho2.mat());
    if (source_norm <= 1e-12) continue;
    double target_norm = trace_norm(data.apply(a, b));
    data.contractivity_certificate =
        std::max(data.contractivity_certificate, target_norm / source_norm);
  }
  return data;
}

CpExtensionData cp_extension(const BinaryExperiment& e, const BinaryExperiment& f) {
  if (!is_support_normalized(e))
    throw PreconditionError("source experiment must be support-normalized");
  require_dominates(e, f);

  const Mat& r1 = e.rho1.mat();
  const Mat& r2 = e.rho2.mat();
  const Mat& m1 = f.rho1.mat();
  const Mat& m2 = f.rho2.mat();
  const int din = e.dim();
  const int dout = f.dim();

  CpExtensionData data;

  if (states_equal(r1, r2)) {
    // One-dimensional span: a rank-one completely positive map suffices.
    if (!states_equal(m1, m2))
      throw ConstructionError(
          "morphism is ill-defined: equal sources with distinct targets");
    data.branch = 3;
    data.u = r1;
    data.v = r2;
    double denom = (r1 * r1).trace().real();
    data.map = ChoiMatrix::from_action(din, dout, [&](const Mat& a) {
      return Mat((a * r1).trace() / denom * m1);
    });
    data.trace_defect_value = trace_defect(data.map);
    return data;
  }

  ExtremalTs ext = extremal_ts(e);
  Mat lu, lv;  // images of u, v under the span morphism
  if (ext.tmax_finite) {
    data.branch = 0;
    data.u = ext.tmax * r2 - r1;
    data.v = r1 - ext.t1 * r2;
    lu = ext.tmax * m2 - m1;
    lv = m1 - ext.t1 * m2;
  } else if (ext.t1 > 0.0) {
    data.branch = 1;
    data.u = r1 / ext.t1 - r2;
    data.v = r2;
    lu = m1 / ext.t1 - m2;
    lv = m2;
  } else {
    data.branch = 2;
    data.u = r1;
    data.v = r2;
    lu = m1;
    lv = m2;
  }

  if (!kernel_vector_maximizing(data.u, data.v, &data.phi))
    throw ConstructionError(
        "no kernel vector of u with positive weight under v was found");
  if (!kernel_vector_maximizing(data.v, data.u, &data.psi))
    throw ConstructionError(
        "no kernel vector of v with positive weight under u was found");

  double wu = (data.psi.adjoint() * data.u * data.psi).value().real();
  double wv = (data.phi.adjoint() * data.v * data.phi).value().real();
  CVec psi = data.psi, phi = data.phi;
  Mat su = lu, sv = lv;
  data.map = ChoiMatrix::from_action(din, dout, [&, wu, wv](const Mat& a) {
    Complex cu = (psi.adjoint() * a * psi).value();
    Complex cv = (phi.adjoint() * a * phi).value();
    return Mat(cu / wu * su + cv / wv * sv);
  });
  data.trace_defect_value = trace_defect(data.map);
  return data;
}

}  // namespace deflab
