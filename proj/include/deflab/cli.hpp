#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deflab {

// Exit codes shared by the command line front end.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int parse = 2;        // malformed input files or arguments
inline constexpr int precondition = 3; // operation precondition failed
inline constexpr int deficiency = 4;   // required testing-order domination missing
inline constexpr int solver = 5;       // convex solver did not converge
}  // namespace exit_code

// Batch front end: curve, compare, witness, separate, extend, reduce, bayes.
// Writes results to --out or the given stream; diagnostics go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace deflab
