#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace deflab {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Library-wide tolerances. Absolute unless stated; matrix checks scale by the
// operator norm where that matters.
namespace tol {
inline constexpr double hermitian = 1e-10;   // hermiticity check, scaled
inline constexpr double eigen = 1e-10;       // eigensystem postconditions, scaled
inline constexpr double numeric = 1e-9;      // generic numeric postconditions
inline constexpr double cluster = 1e-8;      // eigenvalue cluster grouping, scaled
inline constexpr double breakpoint = 1e-8;   // kernel residual accepted at a breakpoint
inline constexpr double solver = 1e-7;       // convex solver target accuracy
inline constexpr double deficiency = 1e-9;   // epsilon clamp for exact-deficiency calls
}  // namespace tol

// Error taxonomy. tools/main.cpp maps these onto process exit codes.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an operation requires E >= F (2-deficiency zero) and it fails.
struct DeficiencyPreconditionError : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace deflab
