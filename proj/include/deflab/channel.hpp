#pragma once

#include <functional>
#include <vector>

#include "deflab/experiment.hpp"
#include "deflab/types.hpp"

namespace deflab {

// Choi representation of a linear map between matrix algebras. Block (i, j)
// of size dim_out x dim_out holds T(|i><j|), so the full matrix has side
// dim_in * dim_out.
struct ChoiMatrix {
  Mat matrix;
  int dim_in = 0;
  int dim_out = 0;

  ChoiMatrix() = default;
  ChoiMatrix(Mat m, int din, int dout);

  // Build from the map's action on matrix units.
  static ChoiMatrix from_action(int din, int dout,
                                const std::function<Mat(const Mat&)>& action);

  Mat apply(const Mat& a) const;
  // Adjoint map applied to the identity; equals I exactly for trace
  // preserving maps.
  Mat dual_identity() const;
  double cp_defect() const;   // max(0, -lambda_min of the Choi matrix)
  double tp_defect() const;   // max-entry deviation of dual_identity from I
};

bool is_completely_positive(const ChoiMatrix& t, double tolerance);

// Largest deviation |Tr T(a_k) - Tr a_k| over an orthonormal Hermitian basis.
double trace_defect(const ChoiMatrix& t);

// Completely positive trace preserving map, validated on construction.
class Channel {
 public:
  explicit Channel(ChoiMatrix choi, double tolerance = 1e-8);

  const ChoiMatrix& choi() const { return choi_; }
  int dim_in() const { return choi_.dim_in; }
  int dim_out() const { return choi_.dim_out; }
  DensityMatrix operator()(const DensityMatrix& rho) const;

 private:
  ChoiMatrix choi_;
};

Channel identity_channel(int dim);
Channel completely_depolarizing(int dim);
// Measure with the POVM, then prepare the matching output state.
Channel measure_prepare(const Povm& m, const std::vector<DensityMatrix>& outputs);

}  // namespace deflab
