#pragma once

// Expression trees for g(x1..xq, y): parsing, exact symbolic partial
// derivatives of arbitrary mixed order, and pointwise evaluation.
//
// Grammar (documented in the README): binary ^ with an integer literal
// exponent binds tightest, then unary minus, then * and /, then + and -;
// all binary operators associate left; parentheses group; identifiers are
// x1..xq, y, and the functions sin, cos, exp, log, sqrt.

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impdiff/ddcore.hpp"
#include "impdiff/errors.hpp"
#include "impdiff/mindex.hpp"

namespace impdiff {

class Expr {
public:
    Expr() = default;

    // Parses `source` over variables x1..x<dim> and y. Unknown identifiers,
    // out-of-range variable indices, and syntax errors throw ParseError with
    // the offending position.
    static Expr parse(std::string_view source, int dim);

    static Expr constant(double value, int dim = 1);
    static Expr variable_x(int axis, int dim); // x_{axis+1}
    static Expr variable_y(int dim);

    int dim() const;

    // Exact symbolic partial derivative with light simplification
    // (constant folding and 0/1 identities).
    Expr diff_x(int axis) const;
    Expr diff_y() const;
    // Mixed partial of order (s, t): d^{|s|+t} / dx^s dy^t.
    Expr diff(const MultiIndex& s, int t) const;

    // IEEE double evaluation at (x, y); domain violations (log of a
    // nonpositive value, division by zero, sqrt of a negative value) throw
    // EvalDomainError instead of producing NaN.
    double eval(std::span<const double> x, double y) const;

    std::string to_string() const;
    // Structural equality (same tree, bitwise-equal constants).
    bool same_as(const Expr& other) const;

    bool empty() const { return root_ == nullptr; }

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> root, int dim);
    std::shared_ptr<const Node> root_;
    int dim_ = 0;
};

// GProvider backed by a closed-form expression; mixed partials are
// differentiated symbolically once and cached per order.
class ExprProvider final : public GProvider {
public:
    explicit ExprProvider(Expr g) : g_(std::move(g)) {}

    int dim() const override { return g_.dim(); }
    double value(std::span<const double> x, double y) const override { return g_.eval(x, y); }
    double partial(const MultiIndex& s, int t, std::span<const double> x, double y) const override;

    const Expr& expression() const { return g_; }

private:
    Expr g_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<int>, Expr> derivative_cache_;
};

} // namespace impdiff
