#pragma once

// The CLI problem file: a hand-editable key-value text format that fully
// specifies an implicit-function instance. Schema (version 1):
//
//   version: 1
//   q: 2
//   g: x1^2 + x2^2 + y^2 - 1
//   n: 2,1
//   grid x1: 0.1 0.2 0.35
//   grid x2: 0.15 0.3
//   y: solve            (or: y: explicit)
//   bracket: 0 1        (solve mode; and/or guess: 0.9)
//   y 0,0: 0.97979...   (explicit mode, one line per grid point)
//
// '#' starts a comment; blank lines are ignored.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "impdiff/implicit.hpp"
#include "impdiff/oracle.hpp"

namespace impdiff {

struct ProblemFile {
    int version = 1;
    int dim = 0;
    std::string g_text;
    std::vector<std::vector<double>> axes;
    std::optional<MultiIndex> target; // n
    bool solve = true;
    SolveSpec spec;
    std::map<MultiIndex, double, MultiIndexLess> y_values;
};

ProblemFile parse_problem_file(std::istream& in);
ProblemFile load_problem_file(const std::string& path);

// Builds the provider, solves or collects y over the grid, and constructs
// the problem (which re-checks residuals at every grid point).
ImplicitProblem build_problem(const ProblemFile& file);

} // namespace impdiff
