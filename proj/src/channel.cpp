#include "deflab/channel.hpp"

#include <cmath>

#include "deflab/linalg.hpp"

namespace deflab {

ChoiMatrix::ChoiMatrix(Mat m, int din, int dout)
    : matrix(std::move(m)), dim_in(din), dim_out(dout) {
  if (matrix.rows() != static_cast<long>(din) * dout || matrix.rows() != matrix.cols())
    throw ValidationError("Choi matrix size does not match the declared dimensions");
}

ChoiMatrix ChoiMatrix::from_action(int din, int dout,
                                   const std::function<Mat(const Mat&)>& action) {
  Mat choi = Mat::Zero(static_cast<long>(din) * dout, static_cast<long>(din) * dout);
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j) {
      Mat unit = Mat::Zero(din, din);
      unit(i, j) = 1.0;
      choi.block(i * dout, j * dout, dout, dout) = action(unit);
    }
  return ChoiMatrix(std::move(choi), din, dout);
}

Mat ChoiMatrix::apply(const Mat& a) const {
  if (a.rows() != dim_in || a.cols() != dim_in)
    throw ValidationError("map input has the wrong dimension");
  Mat out = Mat::Zero(dim_out, dim_out);
  for (int i = 0; i < dim_in; ++i)
    for (int j = 0; j < dim_in; ++j)
      out += a(i, j) * matrix.block(i * dim_out, j * dim_out, dim_out, dim_out);
  return out;
}

Mat ChoiMatrix::dual_identity() const {
  Mat x(dim_in, dim_in);
  for (int i = 0; i < dim_in; ++i)
    for (int j = 0; j < dim_in; ++j)
      x(j, i) = matrix.block(i * dim_out, j * dim_out, dim_out, dim_out).trace();
  return x;
}

double ChoiMatrix::cp_defect() const {
  return std::max(0.0, -min_eigenvalue(matrix));
}

double ChoiMatrix::tp_defect() const {
  return (dual_identity() - Mat::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff();
}

bool is_completely_positive(const ChoiMatrix& t, double tolerance) {
  return min_eigenvalue(t.matrix) >= -tolerance;
}

double trace_defect(const ChoiMatrix& t) {
  const int n = t.dim_in;
  Mat x = t.dual_identity() - Mat::Identity(n, n);
  // Evaluate |Tr T(a) - Tr a| = |Tr(a (T*(I) - I))| over the orthonormal
  // Hermitian basis {|i><i|, (|i><j|+|j><i|)/sqrt2, (i|i><j|-i|j><i|)/sqrt2}.
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(x(i, i).real()));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      worst = std::max(worst, std::sqrt(2.0) * std::abs(x(i, j).real()));
      worst = std::max(worst, std::sqrt(2.0) * std::abs(x(i, j).imag()));
    }
  return worst;
}

Channel::Channel(ChoiMatrix choi, double tolerance) : choi_(std::move(choi)) {
  if (choi_.cp_defect() > tolerance)
    throw ValidationError("channel is not completely positive");
  if (choi_.tp_defect() > tolerance)
    throw ValidationError("channel is not trace preserving");
}

DensityMatrix Channel::operator()(const DensityMatrix& rho) const {
  Mat out = choi_.apply(rho.mat());
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

Channel identity_channel(int dim) {
  return Channel(ChoiMatrix::from_action(dim, dim, [](const Mat& a) { return a; }));
}

Channel completely_depolarizing(int dim) {
  return Channel(ChoiMatrix::from_action(dim, dim, [dim](const Mat& a) {
    return Mat(a.trace() / static_cast<double>(dim) * Mat::Identity(dim, dim));
  }));
}

Channel measure_prepare(const Povm& m, const std::vector<DensityMatrix>& outputs) {
  if (static_cast<int>(outputs.size()) != m.outcomes())
    throw ValidationError("measure-prepare needs one output state per outcome");
  const int dout = outputs.front().dim();
  for (const auto& s : outputs)
    if (s.dim() != dout)
      throw ValidationError("measure-prepare output states have mixed dimensions");
  return Channel(ChoiMatrix::from_action(m.dim(), dout, [&](const Mat& a) {
    Mat out = Mat::Zero(dout, dout);
    for (int d = 0; d < m.outcomes(); ++d)
      out += (m.element(d) * a).trace() * outputs[d].mat();
    return out;
  }));
}

}  // namespace deflab
