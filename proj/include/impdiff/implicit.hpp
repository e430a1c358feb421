#pragma once

// Divided differences of the implicit function written in divided
// differences of g: the first-order rule, the curly-bracket expansion per
// path, the recursive formula, and the two closed forms (sum over polygon
// partitions, sum over extended plane trees), plus symbolic term emission
// in bracket notation.

#include <memory>
#include <string>
#include <vector>

#include "impdiff/ddcore.hpp"
#include "impdiff/mindex.hpp"
#include "impdiff/polytree.hpp"

namespace impdiff {

// Guard: a quotient whose denominator is below this times the local scale
// aborts with the offending bracket.
inline constexpr double kSingularGuard = 1e-12;
// Residual allowed for g(x_i, y_i) at grid points on construction.
inline constexpr double kResidualTol = 1e-10;

// A grid together with g and the value of y at every grid point. y values
// are inputs (solved by the oracle or supplied by the user), never computed
// here.
class ImplicitProblem {
public:
    ImplicitProblem(std::shared_ptr<const GProvider> g, Grid grid, Tensor y_values);

    int dim() const { return grid_.dim(); }
    const Grid& grid() const { return grid_; }
    const GProvider& g() const { return *g_; }
    double y_at(const MultiIndex& index) const { return y_values_.at(index); }

private:
    std::shared_ptr<const GProvider> g_;
    Grid grid_;
    Tensor y_values_;
};

// One bar-form divided difference of g, identified by per-axis index
// windows into the grid and the grid points whose y values form the
// dependent-axis nodes.
struct BarBracket {
    std::vector<std::pair<int, int>> x_ranges; // inclusive windows, one per axis
    std::vector<MultiIndex> y_points;

    std::string to_string() const; // "[0 1;0|(1,0)]g"
    bool operator==(const BarBracket&) const = default;
};

struct QuotientFactor {
    BarBracket num, den;

    std::string to_string() const { return num.to_string() + "/" + den.to_string(); }
    bool operator==(const QuotientFactor&) const = default;
};

// A signed product of quotients of divided differences of g.
struct TermExpr {
    int sign = 1;
    std::vector<QuotientFactor> factors;

    std::string to_string() const;
    bool operator==(const TermExpr&) const = default;
};

// The quotient attached to a unit step from -> from + e_r (first-order rule
// shifted to an arbitrary base).
QuotientFactor unit_step_factor(const MultiIndex& from, const MultiIndex& to);

// The leading quotient of the expansion term for tuple (s, t) over the path
// points: numerator over the axis-prefix windows and the y tail, shared
// denominator at the path base. Star factors in the tree form are the same
// object over the star's root label.
QuotientFactor tuple_factor(const std::vector<MultiIndex>& points, const CompatibleTuple& tuple);

// All expansion terms of the curly bracket over a path: one per compatible
// tuple, each with its unit-step tail factors. A single-step path must be a
// unit step and yields the one first-order term.
std::vector<TermExpr> curly_terms(const std::vector<MultiIndex>& points);

// --- numeric evaluation -------------------------------------------------

// First-order divided difference of y along `axis` at `base`.
double first_order_dd(const ImplicitProblem& problem, const MultiIndex& base, int axis);

// Curly-bracket value over a path inside the grid.
double curly_bracket(const ImplicitProblem& problem, const LatticePath& path);

// Recursive form: sum over k >= 2 and increasing paths of curly brackets
// times lower-order divided differences of y, resolved by self-calls.
double recursive_dd(const ImplicitProblem& problem, const MultiIndex& n);
double recursive_dd(const ImplicitProblem& problem, const MultiIndex& lo, const MultiIndex& hi);

// Closed form as a sum over unit paths and polygon partitions of products
// of per-face curly brackets. Requires |hi - lo| >= 2.
double polygon_dd(const ImplicitProblem& problem, const MultiIndex& n);
double polygon_dd(const ImplicitProblem& problem, const MultiIndex& lo, const MultiIndex& hi);

// Closed form as a sum over unit paths and extended trees of products of
// per-star quotients. Numerically equal to the polygon form.
double tree_dd(const ImplicitProblem& problem, const MultiIndex& n);
double tree_dd(const ImplicitProblem& problem, const MultiIndex& lo, const MultiIndex& hi);

enum class TermMode { polygon, tree };

// Flattened symbolic terms of the chosen closed form, in deterministic
// order (paths, then partitions/trees, then per-face tuple choices).
// |n| = 1 yields the single first-order term.
std::vector<TermExpr> emit_terms(const MultiIndex& n, TermMode mode);

// Product-level structure of the polygon form: one line per (path,
// partition), each a product of curly-bracket symbols.
std::vector<std::string> emit_products(const MultiIndex& n);

} // namespace impdiff
