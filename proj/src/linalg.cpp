#include "deflab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace deflab {

namespace {

// Lexicographic comparison of phase-normalized eigenvectors, used only to fix
// an order inside degenerate clusters.
bool lex_less(const CVec& a, const CVec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

CVec phase_normalize(CVec v) {
  for (int i = 0; i < v.size(); ++i) {
    double m = std::abs(v[i]);
    if (m > 1e-12) {
      v *= std::conj(v[i]) / m;
      break;
    }
  }
  return v;
}

}  // namespace

double EigenSystem::cluster_value(int c) const {
  auto [b, e] = clusters[c];
  double s = 0.0;
  for (int i = b; i < e; ++i) s += values[i];
  return s / static_cast<double>(e - b);
}

Mat EigenSystem::cluster_projector(int c) const {
  auto [b, e] = clusters[c];
  Mat block = vectors.middleCols(b, e - b);
  return block * block.adjoint();
}

bool is_hermitian(const Mat& h, double tau) {
  if (h.rows() != h.cols()) return false;
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tau * scale;
}

void require_hermitian(const Mat& h, double tau) {
  if (h.rows() != h.cols())
    throw ValidationError("matrix is not square: " + std::to_string(h.rows()) + "x" +
                          std::to_string(h.cols()));
  if (!is_hermitian(h, tau))
    throw ValidationError("matrix is not Hermitian within tolerance");
}

EigenSystem eig_hermitian(const Mat& h) {
  require_hermitian(h);
  const int n = static_cast<int>(h.rows());
  Eigen::SelfAdjointEigenSolver<Mat> solver(Mat(0.5 * (h + h.adjoint())));
  if (solver.info() != Eigen::Success)
    throw ValidationError("Hermitian eigendecomposition failed to converge");

  EigenSystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = phase_normalize(solver.eigenvectors().col(n - 1 - i));
  }

  double scale = std::max(out.values.cwiseAbs().maxCoeff(), 0.0);
  double gap = tol::cluster * std::max(scale, 1e-300);
  int begin = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || out.values[begin] - out.values[i] > gap) {
      out.clusters.emplace_back(begin, i);
      begin = i;
    }
  }

  // Deterministic order inside each cluster.
  for (auto [b, e] : out.clusters) {
    if (e - b < 2) continue;
    std::vector<int> idx(e - b);
    std::iota(idx.begin(), idx.end(), b);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) {
      return lex_less(out.vectors.col(i), out.vectors.col(j));
    });
    Mat cols(n, e - b);
    RVec vals(e - b);
    for (int k = 0; k < e - b; ++k) {
      cols.col(k) = out.vectors.col(idx[k]);
      vals[k] = out.values[idx[k]];
    }
    out.vectors.middleCols(b, e - b) = cols;
    out.values.segment(b, e - b) = vals;
  }
  return out;
}

double trace_norm(const Mat& h) {
  return eig_hermitian(h).values.cwiseAbs().sum();
}

double positive_part_trace(const Mat& h) {
  return eig_hermitian(h).values.cwiseMax(0.0).sum();
}

Mat positive_part(const Mat& h) {
  EigenSystem es = eig_hermitian(h);
  return es.vectors * es.values.cwiseMax(0.0).asDiagonal() * es.vectors.adjoint();
}

double min_eigenvalue(const Mat& h) {
  return eig_hermitian(h).values.minCoeff();
}

double kernel_cut(const Mat& h) {
  double scale = h.cwiseAbs().maxCoeff();
  return tol::numeric * std::max(1.0, scale);
}

Mat support_projection(const Mat& h, SupportPart part) {
  EigenSystem es = eig_hermitian(h);
  const int n = es.dim();
  double cut = kernel_cut(h);
  Mat p = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double v = es.values[i];
    bool take = false;
    switch (part) {
      case SupportPart::Positive: take = v > cut; break;
      case SupportPart::Negative: take = v < -cut; break;
      case SupportPart::Full: take = std::abs(v) > cut; break;
      case SupportPart::Kernel: take = std::abs(v) <= cut; break;
    }
    if (take) p += es.vectors.col(i) * es.vectors.col(i).adjoint();
  }
  return p;
}

bool psd_check(const Mat& h, double tolerance) {
  return min_eigenvalue(h) >= -tolerance;
}

bool support_contained_in(const Mat& a, const Mat& b) {
  Mat q = support_projection(b, SupportPart::Kernel);
  double leak = std::abs((q * a * q).trace().real());
  return leak <= tol::numeric;
}

}  // namespace deflab
