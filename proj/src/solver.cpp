#include "deflab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "deflab/linalg.hpp"

namespace deflab {

namespace {

void sum_affine_project(std::vector<Mat>& m) {
  const int k = static_cast<int>(m.size());
  const int n = static_cast<int>(m.front().rows());
  Mat excess = -Mat::Identity(n, n);
  for (const auto& x : m) excess += x;
  excess /= static_cast<double>(k);
  for (auto& x : m) x -= excess;
}

double povm_violation(const std::vector<Mat>& m) {
  const int n = static_cast<int>(m.front().rows());
  Mat sum = Mat::Zero(n, n);
  double worst = 0.0;
  for (const auto& x : m) {
    worst = std::max(worst, -min_eigenvalue(x));
    sum += x;
  }
  worst = std::max(worst, (sum - Mat::Identity(n, n)).cwiseAbs().maxCoeff());
  return worst;
}

// Dykstra alternation between the sum-to-identity subspace and the product
// PSD cone (increments kept on the cone side only; affine sets need none).
double dykstra_povm(std::vector<Mat>& m, int max_sweeps, double target) {
  const int k = static_cast<int>(m.size());
  const int n = static_cast<int>(m.front().rows());
  std::vector<Mat> inc(k, Mat::Zero(n, n));
  double viol = povm_violation(m);
  for (int sweep = 0; sweep < max_sweeps && viol > target; ++sweep) {
    sum_affine_project(m);
    for (int d = 0; d < k; ++d) {
      Mat z = m[d] + inc[d];
      Mat p = positive_part(0.5 * (z + z.adjoint()));
      inc[d] = z - p;
      m[d] = std::move(p);
    }
    viol = povm_violation(m);
  }
  return viol;
}

// Exact POVM from an approximate family: clip to PSD, then sandwich-normalize
// by the inverse square root of the element sum. Any weight missing from a
// rank-deficient sum is spread uniformly.
std::vector<Mat> povm_clean(std::vector<Mat> m) {
  const int k = static_cast<int>(m.size());
  const int n = static_cast<int>(m.front().rows());
  Mat sum = Mat::Zero(n, n);
  for (auto& x : m) {
    x = positive_part(0.5 * (x + x.adjoint()));
    sum += x;
  }
  EigenSystem es = eig_hermitian(sum);
  RVec inv_sqrt(n);
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    if (es.values[i] > 1e-12) {
      inv_sqrt[i] = 1.0 / std::sqrt(es.values[i]);
      ++rank;
    } else {
      inv_sqrt[i] = 0.0;
    }
  }
  Mat s = es.vectors * inv_sqrt.asDiagonal() * es.vectors.adjoint();
  Mat deficiency_proj = Mat::Identity(n, n) - s * sum * s;
  for (auto& x : m) {
    x = s * x * s + deficiency_proj / static_cast<double>(k);
    x = 0.5 * (x + x.adjoint());
  }
  return m;
}

double bayes_objective(const std::vector<Mat>& bs, const std::vector<Mat>& m) {
  double v = 0.0;
  for (size_t d = 0; d < bs.size(); ++d) v += (bs[d] * m[d]).trace().real();
  return v;
}

// Project Y onto the intersection of {Y <= B_d} and shift to strict
// feasibility; returns the resulting dual value Tr Y.
double dual_project(Mat& y, const std::vector<Mat>& bs, int max_sweeps) {
  const int k = static_cast<int>(bs.size());
  const int n = static_cast<int>(y.rows());
  std::vector<Mat> inc(k, Mat::Zero(n, n));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double viol = 0.0;
    for (int d = 0; d < k; ++d) {
      // Large increments amplify roundoff; stay inside the Hermitian space.
      Mat z = y + inc[d];
      z = 0.5 * (z + z.adjoint());
      Mat p = bs[d] - positive_part(Mat(bs[d] - z));
      inc[d] = z - p;
      y = 0.5 * (p + p.adjoint());
    }
    for (int d = 0; d < k; ++d)
      viol = std::max(viol, -min_eigenvalue(Mat(bs[d] - y)));
    if (viol <= 1e-12) break;
  }
  double shift = 0.0;
  for (int d = 0; d < k; ++d)
    shift = std::max(shift, -min_eigenvalue(Mat(bs[d] - y)));
  if (shift > 0.0) y -= shift * Mat::Identity(n, n);
  return y.trace().real();
}

// Euclidean projection of v onto the l1 ball of given radius centered at q.
RVec l1_ball_project(const RVec& v, const RVec& q, double radius) {
  RVec w = v - q;
  double total = w.cwiseAbs().sum();
  if (total <= radius) return v;
  if (radius <= 0.0) return q;
  std::vector<double> mags(w.size());
  for (int i = 0; i < w.size(); ++i) mags[i] = std::abs(w[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  for (size_t i = 0; i < mags.size(); ++i) {
    cum += mags[i];
    double cand = (cum - radius) / static_cast<double>(i + 1);
    if (i + 1 == mags.size() || cand >= mags[i + 1]) {
      tau = cand;
      break;
    }
  }
  RVec u(v.size());
  for (int i = 0; i < w.size(); ++i) {
    double m = std::max(std::abs(w[i]) - tau, 0.0);
    u[i] = q[i] + (w[i] >= 0.0 ? m : -m);
  }
  return u;
}

struct MatchWorkspace {
  std::vector<Mat> states;
  std::vector<RVec> targets;
  std::vector<double> state_norm2;  // Tr(rho^2)
  RMat gram_pinv;                   // pseudo-inverse of Tr(rho_a rho_b)

  int parameters() const { return static_cast<int>(states.size()); }
};

MatchWorkspace make_workspace(const Experiment& e, const std::vector<RVec>& targets) {
  MatchWorkspace w;
  for (const auto& rho : e.densities) {
    w.states.push_back(rho.mat());
    w.state_norm2.push_back((rho.mat() * rho.mat()).trace().real());
  }
  w.targets = targets;
  const int m = w.parameters();
  RMat gram(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      gram(a, b) = (w.states[a] * w.states[b]).trace().real();
  Eigen::SelfAdjointEigenSolver<RMat> es(gram);
  RVec inv = es.eigenvalues();
  double cut = 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
  for (int i = 0; i < m; ++i) inv[i] = inv[i] > cut ? 1.0 / inv[i] : 0.0;
  w.gram_pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return w;
}

// Orthogonal projection onto the affine set {sum_x M_x = I and
// Tr(M_x rho_theta) = q_theta(x)} (least-squares consistent when the states
// are linearly dependent).
void exact_moment_project(std::vector<Mat>& m, const MatchWorkspace& w) {
  const int k = static_cast<int>(m.size());
  const int n = static_cast<int>(m.front().rows());
  const int np = w.parameters();
  Mat excess = -Mat::Identity(n, n);
  for (const auto& x : m) excess += x;

  RVec excess_moments(np);
  for (int a = 0; a < np; ++a)
    excess_moments[a] = (excess * w.states[a]).trace().real() / k;

  RMat c(np, k);
  for (int a = 0; a < np; ++a)
    for (int x = 0; x < k; ++x)
      c(a, x) = (m[x] * w.states[a]).trace().real() - excess_moments[a] -
                w.targets[a][x];
  RMat nu = w.gram_pinv * c;

  for (int x = 0; x < k; ++x) {
    m[x] -= excess / static_cast<double>(k);
    for (int a = 0; a < np; ++a) m[x] -= nu(a, x) * w.states[a];
  }
}

// Projection onto {M : || (Tr(M_x rho))_x - q ||_1 <= radius}; the minimal
// Frobenius update moves each element along rho only.
void l1_moment_project(std::vector<Mat>& m, const MatchWorkspace& w, int theta,
                       double radius) {
  const int k = static_cast<int>(m.size());
  RVec v(k);
  for (int x = 0; x < k; ++x) v[x] = (m[x] * w.states[theta]).trace().real();
  RVec u = l1_ball_project(v, w.targets[theta], radius);
  for (int x = 0; x < k; ++x) {
    double delta = u[x] - v[x];
    if (delta != 0.0) m[x] += (delta / w.state_norm2[theta]) * w.states[theta];
  }
}

double match_objective(const std::vector<Mat>& m, const MatchWorkspace& w) {
  double worst = 0.0;
  for (int a = 0; a < w.parameters(); ++a) {
    double l1 = 0.0;
    for (size_t x = 0; x < m.size(); ++x)
      l1 += std::abs((m[x] * w.states[a]).trace().real() - w.targets[a][x]);
    worst = std::max(worst, 0.5 * l1);
  }
  return worst;
}

struct FeasOutcome {
  bool success = false;
  double achieved = std::numeric_limits<double>::infinity();
  std::vector<Mat> povm;   // cleaned, exactly feasible POVM
  int sweeps = 0;
};

// Cyclic projections at epigraph level c; level 0 uses the exact joint
// affine projection. Success means a genuine POVM achieving the level.
FeasOutcome run_feasibility(std::vector<Mat> m, const MatchWorkspace& w, double c,
                            int sweep_cap, double slack) {
  FeasOutcome out;
  const int check_every = 25;
  double last_best = std::numeric_limits<double>::infinity();
  int stale_checks = 0;
  for (int sweep = 0; sweep < sweep_cap; ++sweep) {
    if (c <= 0.0) {
      exact_moment_project(m, w);
    } else {
      sum_affine_project(m);
      for (int a = 0; a < w.parameters(); ++a) l1_moment_project(m, w, a, 2.0 * c);
    }
    for (auto& x : m) x = positive_part(0.5 * (x + x.adjoint()));

    if (sweep % check_every == check_every - 1 || sweep == sweep_cap - 1) {
      std::vector<Mat> clean = povm_clean(m);
      double g = match_objective(clean, w);
      if (g < out.achieved) {
        out.achieved = g;
        out.povm = std::move(clean);
      }
      out.sweeps = sweep + 1;
      if (out.achieved <= c + slack) {
        out.success = true;
        return out;
      }
      // Plateau detection: progress stalls well above the level.
      if (last_best - out.achieved < std::max(1e-14, 1e-3 * (out.achieved - c)))
        ++stale_checks;
      else
        stale_checks = 0;
      last_best = out.achieved;
      if (stale_checks >= 12) return out;
    }
  }
  return out;
}

std::vector<Mat> uniform_start(int k, int n) {
  return std::vector<Mat>(k, Mat::Identity(n, n) / static_cast<double>(k));
}

std::vector<Mat> random_povm_start(int k, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Mat> out;
  Mat sum = Mat::Zero(n, n);
  for (int d = 0; d < k; ++d) {
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Mat x = g * g.adjoint();
    out.push_back(x);
    sum += x;
  }
  EigenSystem es = eig_hermitian(sum);
  Mat s = es.vectors * es.values.cwiseMax(1e-12).cwiseSqrt().cwiseInverse().asDiagonal() *
          es.vectors.adjoint();
  for (auto& x : out) {
    x = s * x * s;
    x = 0.5 * (x + x.adjoint());
  }
  return out;
}

}  // namespace

Povm project_to_povm(const std::vector<Mat>& raw) {
  if (raw.empty()) throw ValidationError("cannot project an empty family");
  std::vector<Mat> m = raw;
  for (auto& x : m) {
    require_hermitian(x);
    x = 0.5 * (x + x.adjoint());
  }
  dykstra_povm(m, 100000, 1e-10);
  return Povm(std::move(m), tol::solver);
}

namespace {

// One sweep of the sandwich fixed-point iteration on the reward matrices
// C_d = cI - B_d >= 0: M_d <- G^{-1/2} C_d M_d C_d G^{-1/2} with
// G = sum_e C_e M_e C_e. POVM constraints are preserved exactly (rank lost
// to a singular G is refilled uniformly).
void sandwich_step(std::vector<Mat>& m, const std::vector<Mat>& cs) {
  const int k = static_cast<int>(m.size());
  const int n = static_cast<int>(m.front().rows());
  Mat g = Mat::Zero(n, n);
  std::vector<Mat> halves(k);
  for (int d = 0; d < k; ++d) {
    halves[d] = cs[d] * m[d] * cs[d];
    g += halves[d];
  }
  EigenSystem es = eig_hermitian(0.5 * (g + g.adjoint()));
  double cut = 1e-14 * std::max(es.values.maxCoeff(), 1e-300);
  RVec inv_sqrt(n);
  for (int i = 0; i < n; ++i)
    inv_sqrt[i] = es.values[i] > cut ? 1.0 / std::sqrt(es.values[i]) : 0.0;
  Mat s = es.vectors * inv_sqrt.asDiagonal() * es.vectors.adjoint();
  Mat remainder = Mat::Identity(n, n) - s * g * s;
  for (int d = 0; d < k; ++d) {
    Mat next = s * halves[d] * s + remainder / static_cast<double>(k);
    m[d] = 0.5 * (next + next.adjoint());
  }
}

}  // namespace

PovmSolveResult minimize_bayes(const std::vector<Mat>& bs,
                               const MinimizeBayesOptions& options) {
  if (bs.empty()) throw ValidationError("no objective matrices supplied");
  const int k = static_cast<int>(bs.size());
  const int n = static_cast<int>(bs.front().rows());
  for (const auto& b : bs) {
    require_hermitian(b);
    if (b.rows() != n) throw ValidationError("objective matrices have mixed dimensions");
  }

  double scale = 0.0, stepden = 0.0;
  for (const auto& b : bs) {
    scale = std::max(scale, b.cwiseAbs().maxCoeff());
    stepden += b.squaredNorm();
  }
  if (scale == 0.0) {
    return PovmSolveResult{Povm(uniform_start(k, n)), 0.0, 0.0, {0.0, 0.0}, 0, true};
  }

  std::vector<Mat> m;
  if (options.warm_start && k == 2) {
    // Two outcomes reduce to a threshold test on B_1 - B_2.
    Mat s = support_projection(Mat(bs[0] - bs[1]), SupportPart::Negative);
    m = {s, Mat::Identity(n, n) - s};
  } else {
    m = uniform_start(k, n);
  }

  // Shifted rewards keep the fixed-point iteration in the PSD regime.
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& b : bs) shift = std::max(shift, eig_hermitian(b).values.maxCoeff());
  shift += 0.1 * std::max(scale, 1.0);
  std::vector<Mat> cs;
  cs.reserve(k);
  for (const auto& b : bs) cs.push_back(shift * Mat::Identity(n, n) - b);

  auto dual_from_iterate = [&](const std::vector<Mat>& povm, int sweeps) {
    Mat gamma = Mat::Zero(n, n);
    for (int d = 0; d < k; ++d) gamma += bs[d] * povm[d];
    gamma = 0.5 * (gamma + gamma.adjoint());
    return dual_project(gamma, bs, sweeps);
  };

  double best = bayes_objective(bs, m);
  std::vector<Mat> best_m = m;
  double best_dual = static_cast<double>(n) *
                     [&] {
                       double lo = std::numeric_limits<double>::infinity();
                       for (const auto& b : bs) lo = std::min(lo, min_eigenvalue(b));
                       return lo;
                     }();
  const double gap_target = options.gap_target * std::max(1.0, scale);
  int it = 0;

  // Phase 1: sandwich fixed point; cheap and sharp on generic instances.
  double prev = best;
  int flat = 0;
  for (; it < std::min(options.max_iterations, 5000); ++it) {
    sandwich_step(m, cs);
    double v = bayes_objective(bs, m);
    if (v < best - 1e-15) {
      best = v;
      best_m = m;
    }
    flat = std::abs(prev - v) <= 1e-15 * std::max(1.0, scale) ? flat + 1 : 0;
    prev = v;
    if (flat >= 30) break;
  }
  best_dual = std::max(best_dual, dual_from_iterate(best_m, 400));

  // Phase 2: Polyak-step projected subgradient polish when the certificate
  // is not yet tight.
  int stalled = 0;
  for (; it < options.max_iterations; ++it) {
    double gap = best - best_dual;
    if (gap <= gap_target) break;
    if (stalled > 2000) break;  // neither side moved; gap is as good as it gets
    double alpha = gap / stepden;
    for (int d = 0; d < k; ++d) m[d] -= alpha * bs[d];
    dykstra_povm(m, 80, 1e-11);
    double v = bayes_objective(bs, m);
    bool moved = false;
    if (v < best - 1e-15) {
      best = v;
      best_m = m;
      moved = true;
    }
    if (it % 64 == 63) {
      double val = dual_from_iterate(m, 80);
      if (val > best_dual + 1e-15) {
        best_dual = val;
        moved = true;
      }
    }
    stalled = moved ? 0 : stalled + 1;
  }

  dykstra_povm(best_m, 5000, 1e-11);
  double value = bayes_objective(bs, best_m);
  double gap = value - best_dual;
  return PovmSolveResult{Povm(std::move(best_m), tol::solver),
                         value,
                         best_dual,
                         {gap, 0.0},
                         it,
                         gap <= 1e-6 * std::max(1.0, scale)};
}

PovmSolveResult match_povm(const Experiment& e, const std::vector<RVec>& targets,
                           const MatchPovmOptions& options) {
  if (targets.size() != static_cast<size_t>(e.size()))
    throw ValidationError("one target distribution per state is required");
  const int k = static_cast<int>(targets.front().size());
  if (k < 1) throw ValidationError("targets need at least one outcome");
  for (const auto& q : targets) {
    if (q.size() != k) throw ValidationError("target distributions have mixed lengths");
    if (q.minCoeff() < -1e-10 || std::abs(q.sum() - 1.0) > 1e-9)
      throw ValidationError("target is not a probability vector");
  }
  const int n = e.dim();
  MatchWorkspace w = make_workspace(e, targets);
  const double slack = 0.5 * options.tolerance;

  // Exact-match attempt first.
  FeasOutcome exact = run_feasibility(uniform_start(k, n), w, 0.0,
                                      options.sweep_cap, slack);
  int sweeps = exact.sweeps;
  if (exact.success) {
    std::vector<double> residuals;
    for (int a = 0; a < w.parameters(); ++a) {
      double l1 = 0.0;
      for (int x = 0; x < k; ++x)
        l1 += std::abs((exact.povm[x] * w.states[a]).trace().real() - targets[a][x]);
      residuals.push_back(0.5 * l1);
    }
    return PovmSolveResult{Povm(exact.povm, tol::solver), exact.achieved, 0.0,
                           std::move(residuals), sweeps, true};
  }

  // Epigraph bisection on the achievable level.
  double lo = 0.0, hi = exact.achieved;
  std::vector<Mat> best_povm = exact.povm;
  double best_value = exact.achieved;
  for (int round = 0; round < 50 && hi - lo > 0.1 * options.tolerance; ++round) {
    double mid = 0.5 * (lo + hi);
    FeasOutcome fo = run_feasibility(best_povm, w, mid, options.sweep_cap, slack);
    sweeps += fo.sweeps;
    if (fo.achieved < best_value) {
      best_value = fo.achieved;
      best_povm = fo.povm;
    }
    if (fo.success)
      hi = std::min(mid, fo.achieved);
    else
      lo = mid;
  }

  // The floor is trusted only when independent restarts agree.
  std::mt19937_64 rng(options.seed);
  double floor = lo;
  for (int r = 0; r < options.restarts; ++r) {
    FeasOutcome fo = run_feasibility(random_povm_start(k, n, rng), w, lo,
                                     options.sweep_cap, slack);
    sweeps += fo.sweeps;
    if (fo.achieved < best_value) {
      best_value = fo.achieved;
      best_povm = fo.povm;
    }
    if (fo.success) {
      floor = 0.0;  // a restart beat the floor; do not certify it
      break;
    }
  }

  std::vector<double> residuals;
  for (int a = 0; a < w.parameters(); ++a) {
    double l1 = 0.0;
    for (int x = 0; x < k; ++x)
      l1 += std::abs((best_povm[x] * w.states[a]).trace().real() - targets[a][x]);
    residuals.push_back(0.5 * l1);
  }
  floor = std::min(floor, best_value);
  bool converged = best_value - floor <= 10.0 * options.tolerance;
  return PovmSolveResult{Povm(best_povm, tol::solver), best_value, floor,
                         std::move(residuals), sweeps, converged};
}

}  // namespace deflab
