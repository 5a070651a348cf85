#pragma once

#include <vector>

#include "deflab/types.hpp"

namespace deflab {

// Eigendecomposition of a Hermitian matrix with deterministic ordering:
// eigenvalues descending, eigenvectors phase-normalized (first component of
// nonnegligible magnitude made real positive), ties broken lexicographically.
// Clusters group indices whose eigenvalues agree within tol::cluster * ||H||.
struct EigenSystem {
  RVec values;                               // descending
  Mat vectors;                               // orthonormal columns
  std::vector<std::pair<int, int>> clusters; // half-open index ranges [begin, end)

  int dim() const { return static_cast<int>(values.size()); }
  int cluster_count() const { return static_cast<int>(clusters.size()); }
  int multiplicity(int c) const { return clusters[c].second - clusters[c].first; }
  // Mean eigenvalue of a cluster (members agree to the grouping tolerance).
  double cluster_value(int c) const;
  // Orthogonal projection onto the cluster's eigenspace.
  Mat cluster_projector(int c) const;
};

bool is_hermitian(const Mat& h, double tau = tol::hermitian);
void require_hermitian(const Mat& h, double tau = tol::hermitian);

EigenSystem eig_hermitian(const Mat& h);

// Sum of |eigenvalues| (Schatten-1 norm of a Hermitian matrix).
double trace_norm(const Mat& h);

// Tr h_+ = sum of positive eigenvalues; equals (Tr h + ||h||_1) / 2.
double positive_part_trace(const Mat& h);

// Matrix positive part h_+ (negative eigenvalues zeroed).
Mat positive_part(const Mat& h);

double min_eigenvalue(const Mat& h);

enum class SupportPart { Positive, Negative, Full, Kernel };

// Spectral projection onto the selected part of the spectrum. Eigenvalues with
// |lambda| below a scale-relative cut count as kernel.
Mat support_projection(const Mat& h, SupportPart part = SupportPart::Full);

bool psd_check(const Mat& h, double tolerance);

// True when supp(a) is contained in supp(b), both PSD.
bool support_contained_in(const Mat& a, const Mat& b);

// |lambda| threshold below which an eigenvalue of h counts as zero.
double kernel_cut(const Mat& h);

}  // namespace deflab
