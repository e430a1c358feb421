#pragma once

// Ground truth: solve y(x) from g on grids, take divided differences of the
// solved samples, differentiate closed-form solutions where available, and
// supply the built-in test catalog.

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "impdiff/exprsym.hpp"
#include "impdiff/implicit.hpp"

namespace impdiff {

// How to pick the implicit branch at a point: a sign-changing bracket, a
// Newton starting guess, or both (the guess seeds Newton inside the bracket).
struct SolveSpec {
    std::optional<std::pair<double, double>> bracket;
    std::optional<double> guess;
};

struct TestCase {
    std::string name;
    int dim = 0;
    std::string g_text;
    Expr g;
    std::vector<std::pair<double, double>> box; // domain for randomized grids
    SolveSpec solve;
    std::optional<Expr> closed_form; // y(x) when known

    std::shared_ptr<const GProvider> provider() const;
};

const std::vector<TestCase>& builtin_cases();
const TestCase& find_case(std::string_view name);

// Root of y -> g(x, y). With a bracket: safeguarded Newton (<= 50 iterations,
// step tolerance 1e-14) falling back to bisection, requiring a sign change.
// Without: plain Newton from the guess. Failure throws SolveError.
double solve_y(const GProvider& g, std::span<const double> x, const SolveSpec& spec);

// y solved at every grid point, as a tensor over the grid.
Tensor solve_y_on_grid(const GProvider& g, const Grid& grid, const SolveSpec& spec);

// Divided difference of the solved y samples over the full grid: the
// independent check for every closed-form evaluator.
double direct_dd_y(const TestCase& test_case, const Grid& grid);

// Exact mixed partial of the closed-form solution at x.
double exact_derivative_y(const TestCase& test_case, std::span<const double> x, const MultiIndex& n);

// Problem over the grid with y solved at every grid point.
ImplicitProblem make_problem(const TestCase& test_case, const Grid& grid);

// Grid with n_j + 1 nodes per axis drawn uniformly in the case's box, sorted,
// with per-axis minimum separation 0.05 * span enforced by redrawing.
Grid random_grid(const TestCase& test_case, const MultiIndex& n, std::mt19937_64& rng);

// random_grid + solve, redrawn until all grid y values are pairwise farther
// apart than 1e-8 (the bar-form divided differences need generic position).
ImplicitProblem random_problem(const TestCase& test_case, const MultiIndex& n, std::mt19937_64& rng);

} // namespace impdiff
