#include "deflab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace deflab {

namespace {

Mat pencil(const BinaryExperiment& e, double t) {
  return e.rho1.mat() - t * e.rho2.mat();
}

// Index of the eigenvalue cluster closest to zero.
int nearest_zero_cluster(const EigenSystem& es) {
  int best = 0;
  double bestval = std::abs(es.cluster_value(0));
  for (int c = 1; c < es.cluster_count(); ++c) {
    double v = std::abs(es.cluster_value(c));
    if (v < bestval) {
      bestval = v;
      best = c;
    }
  }
  return best;
}

// Newton refinement of a zero crossing of an eigenvalue branch, using the
// analytic slope -(1/m) Tr(rho2 P).
double refine_crossing(const BinaryExperiment& e, double t0) {
  double t = t0;
  for (int it = 0; it < 30; ++it) {
    EigenSystem es = eig_hermitian(pencil(e, t));
    int c = nearest_zero_cluster(es);
    double lambda = es.cluster_value(c);
    double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
    if (std::abs(lambda) <= 1e-14 * scale) break;
    double slope =
        -(e.rho2.mat() * es.cluster_projector(c)).trace().real() /
        static_cast<double>(es.multiplicity(c));
    if (std::abs(slope) < 1e-12) break;
    double next = t - lambda / slope;
    if (!(next > -1.0) || !(next < 1e12)) break;
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) {
      t = next;
      break;
    }
    t = next;
  }
  return t;
}

std::vector<double> breakpoints_normalized(const BinaryExperiment& en) {
  // Zeros of det(rho1 - t*rho2) via the shifted pencil: with K = rho1 + rho2
  // invertible, t is a zero iff 1/(t+1) is a nonzero eigenvalue of
  // K^{-1/2} rho2 K^{-1/2}. All such t are automatically >= 0 here.
  EigenSystem ks = eig_hermitian(en.rho1.mat() + en.rho2.mat());
  Mat isqrt = ks.vectors * ks.values.cwiseSqrt().cwiseInverse().asDiagonal() *
              ks.vectors.adjoint();
  Mat w = isqrt * en.rho2.mat() * isqrt;
  EigenSystem ws = eig_hermitian(0.5 * (w + w.adjoint()));

  std::vector<double> candidates;
  for (int i = 0; i < ws.dim(); ++i) {
    double mu = ws.values[i];
    if (mu <= 1e-12) continue;  // mu -> 0 pushes the crossing to infinity
    candidates.push_back(std::max(0.0, 1.0 / mu - 1.0));
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<double> out;
  for (double c : candidates) {
    double t = refine_crossing(en, c);
    if (t < -1e-10) continue;
    t = std::max(t, 0.0);
    Mat d = pencil(en, t);
    double resid = eig_hermitian(d).values.cwiseAbs().minCoeff();
    if (resid > tol::breakpoint * std::max(1.0, d.cwiseAbs().maxCoeff())) continue;
    bool dup = false;
    for (double prev : out)
      if (std::abs(prev - t) <= 1e-9 * (1.0 + std::abs(t))) dup = true;
    if (!dup) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double f_value(const BinaryExperiment& e, double t) {
  return positive_part_trace(pencil(e, t));
}

NpProjections np_projection(const BinaryExperiment& e, double t) {
  Mat d = pencil(e, t);
  return NpProjections{support_projection(d, SupportPart::Positive),
                       support_projection(d, SupportPart::Kernel)};
}

std::vector<double> breakpoints(const BinaryExperiment& e) {
  return breakpoints_normalized(normalize_support(e));
}

ExtremalTs extremal_ts(const BinaryExperiment& e) {
  BinaryExperiment en = normalize_support(e);
  std::vector<double> bps = breakpoints_normalized(en);
  ExtremalTs out;
  bool supp2_in_1 = support_contained_in(en.rho2.mat(), en.rho1.mat());
  bool supp1_in_2 = support_contained_in(en.rho1.mat(), en.rho2.mat());
  out.t1 = supp2_in_1 && !bps.empty() ? bps.front() : 0.0;
  out.tmax_finite = supp1_in_2;
  out.tmax = out.tmax_finite && !bps.empty()
                 ? bps.back()
                 : std::numeric_limits<double>::infinity();
  return out;
}

double eigencurve_derivative(const BinaryExperiment& e, double s, int branch) {
  BinaryExperiment en = normalize_support(e);
  EigenSystem es = eig_hermitian(pencil(en, s));

  // Exceptional points show up as a drop in the number of distinct
  // eigenvalues relative to nearby thresholds.
  const double h = 1e-4;
  int here = es.cluster_count();
  int lo = eig_hermitian(pencil(en, s - h)).cluster_count();
  int hi = eig_hermitian(pencil(en, s + h)).cluster_count();
  if (here < std::max(lo, hi))
    throw PreconditionError("exceptional point: eigenvalue branches collide at s");

  if (branch < 0 || branch >= here)
    throw ValidationError("branch index out of range");
  return -(en.rho2.mat() * es.cluster_projector(branch)).trace().real() /
         static_cast<double>(es.multiplicity(branch));
}

double f_derivative(const BinaryExperiment& e, double s) {
  if (s < 0.0) throw PreconditionError("f derivative is defined for s >= 0");
  BinaryExperiment en = normalize_support(e);
  for (double b : breakpoints_normalized(en))
    if (std::abs(s - b) <= tol::breakpoint)
      throw PreconditionError("f is not differentiable at a breakpoint");
  Mat p_plus = support_projection(pencil(en, s), SupportPart::Positive);
  double slope = -(en.rho2.mat() * p_plus).trace().real();
  return std::clamp(slope, -1.0, 0.0);
}

namespace {

struct Snapshot {
  std::vector<double> values;
  std::vector<Mat> projectors;
  std::vector<int> mults;
};

Snapshot take_snapshot(const BinaryExperiment& en, double t) {
  EigenSystem es = eig_hermitian(pencil(en, t));
  Snapshot s;
  for (int c = 0; c < es.cluster_count(); ++c) {
    s.values.push_back(es.cluster_value(c));
    s.projectors.push_back(es.cluster_projector(c));
    s.mults.push_back(es.multiplicity(c));
  }
  return s;
}

int best_overlap_cluster(const Mat& p, const Snapshot& s) {
  int best = 0;
  double best_overlap = -1.0;
  for (size_t c = 0; c < s.projectors.size(); ++c) {
    double ov = (p * s.projectors[c]).trace().real();
    if (ov > best_overlap) {
      best_overlap = ov;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

TestingCurve TestingCurve::build(const BinaryExperiment& e, double grid_step,
                                 bool keep_projections) {
  TestingCurve curve(normalize_support(e));
  const BinaryExperiment& en = curve.experiment_;
  curve.breakpoints_ = breakpoints_normalized(en);
  curve.extremal_ = extremal_ts(en);

  double hi = curve.extremal_.tmax_finite
                  ? curve.extremal_.tmax
                  : 10.0 * (curve.breakpoints_.back() + 1.0);
  double step = std::max(grid_step, hi / 4096.0);
  for (double t = 0.0; t < hi + 0.5 * step; t += step)
    curve.grid_.push_back(std::min(t, hi));
  const int nodes = static_cast<int>(curve.grid_.size());

  // Anchor the branch structure at a node of maximal distinct-eigenvalue
  // count; isolated degeneracies elsewhere (t = 0 included) would otherwise
  // undercount the branches.
  int anchor = 0, max_count = 0;
  for (int k = 0; k < nodes; ++k) {
    int c = eig_hermitian(pencil(en, curve.grid_[k])).cluster_count();
    if (c > max_count) {
      max_count = c;
      anchor = k;
    }
  }

  const int nbranches = max_count;
  curve.branches_.resize(nbranches);
  for (auto& b : curve.branches_) {
    b.values.resize(nodes, 0.0);
    if (keep_projections) b.projections.resize(nodes);
  }

  Snapshot base = take_snapshot(en, curve.grid_[anchor]);
  for (int i = 0; i < nbranches; ++i) {
    curve.branches_[i].multiplicity = base.mults[i];
    curve.branches_[i].values[anchor] = base.values[i];
    if (keep_projections) curve.branches_[i].projections[anchor] = base.projectors[i];
  }

  // March from the anchor in both directions, continuing each branch into
  // the overlapping cluster. Merged clusters simply feed the same value to
  // every branch involved.
  auto march = [&](int dir) {
    std::vector<Mat> prev_proj = base.projectors;
    std::vector<double> prev_val = base.values;
    for (int k = anchor + dir; k >= 0 && k < nodes; k += dir) {
      Snapshot cur = take_snapshot(en, curve.grid_[k]);
      std::vector<int> assignment(nbranches);
      for (int i = 0; i < nbranches; ++i)
        assignment[i] = best_overlap_cluster(prev_proj[i], cur);

      // A collision inside the interval flips the relative order of two
      // tracked branches; locate the meeting point by bisection.
      for (int i = 0; i < nbranches; ++i)
        for (int j = i + 1; j < nbranches; ++j) {
          double before = prev_val[i] - prev_val[j];
          double after = cur.values[assignment[i]] - cur.values[assignment[j]];
          if (before * after >= -1e-20) continue;
          double lo_t = std::min(curve.grid_[k - dir], curve.grid_[k]);
          double hi_t = std::max(curve.grid_[k - dir], curve.grid_[k]);
          Snapshot at_lo = take_snapshot(en, lo_t);
          const Mat pi = dir > 0 ? prev_proj[i] : cur.projectors[assignment[i]];
          const Mat pj = dir > 0 ? prev_proj[j] : cur.projectors[assignment[j]];
          double flo = at_lo.values[best_overlap_cluster(pi, at_lo)] -
                       at_lo.values[best_overlap_cluster(pj, at_lo)];
          for (int it = 0; it < 60 && hi_t - lo_t > 1e-10; ++it) {
            double mid = 0.5 * (lo_t + hi_t);
            Snapshot m = take_snapshot(en, mid);
            double fm = m.values[best_overlap_cluster(pi, m)] -
                        m.values[best_overlap_cluster(pj, m)];
            if (flo * fm <= 0.0)
              hi_t = mid;
            else {
              lo_t = mid;
              flo = fm;
            }
          }
          double point = 0.5 * (lo_t + hi_t);
          bool dup = false;
          for (double prev_pt : curve.exceptional_)
            if (std::abs(prev_pt - point) < 1e-8) dup = true;
          if (!dup) curve.exceptional_.push_back(point);
        }

      for (int i = 0; i < nbranches; ++i) {
        curve.branches_[i].values[k] = cur.values[assignment[i]];
        if (keep_projections)
          curve.branches_[i].projections[k] = cur.projectors[assignment[i]];
        prev_proj[i] = cur.projectors[assignment[i]];
        prev_val[i] = cur.values[assignment[i]];
      }
    }
  };
  march(+1);
  march(-1);

  std::sort(curve.exceptional_.begin(), curve.exceptional_.end());
  return curve;
}

}  // namespace deflab
