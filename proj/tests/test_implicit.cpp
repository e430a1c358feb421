#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "impdiff/hideriv.hpp"
#include "impdiff/implicit.hpp"
#include "impdiff/oracle.hpp"
#include "impdiff/util.hpp"

using namespace impdiff;

namespace {

MultiIndex mi(std::vector<int> c) { return MultiIndex(std::move(c)); }

ImplicitProblem sphere_problem(std::vector<std::vector<double>> axes) {
    return make_problem(find_case("sphere"), Grid(std::move(axes)));
}

std::vector<std::string> golden_lines(const std::string& name) {
    std::ifstream in(std::string(IMPDIFF_GOLDEN_DIR) + "/" + name);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> term_strings(const MultiIndex& n, TermMode mode) {
    std::vector<std::string> out;
    for (const TermExpr& t : emit_terms(n, mode)) out.push_back(t.to_string());
    return out;
}

} // namespace

TEST_CASE("problem construction checks residuals") {
    auto provider = std::make_shared<ExprProvider>(Expr::parse("y - x1*x2", 2));
    Grid grid({{1.0, 2.0}, {1.0, 3.0}});
    Tensor good({2, 2});
    good.at(mi({0, 0})) = 1.0;
    good.at(mi({0, 1})) = 3.0;
    good.at(mi({1, 0})) = 2.0;
    good.at(mi({1, 1})) = 6.0;
    CHECK_NOTHROW(ImplicitProblem(provider, grid, good));

    Tensor bad = good;
    bad.at(mi({1, 1})) = 6.5;
    CHECK_THROWS_AS(ImplicitProblem(provider, grid, bad), InconsistentPointError);
}

TEST_CASE("first-order rule at a worked configuration") {
    // g = y - x1*x2 with the x2 node at 1: slope in x1 is exactly 1.
    auto provider = std::make_shared<ExprProvider>(Expr::parse("y - x1*x2", 2));
    Grid grid({{0.0, 1.0}, {1.0}});
    Tensor y({2, 1});
    y.at(mi({0, 0})) = 0.0;
    y.at(mi({1, 0})) = 1.0;
    const ImplicitProblem problem(provider, grid, y);
    CHECK(first_order_dd(problem, mi({0, 0}), 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("first-order rule rejects confluent configurations") {
    // y = x1*x2 vanishes along x2 = 0, so both y values in the denominator
    // coincide: a confluent case, reported as such.
    auto provider = std::make_shared<ExprProvider>(Expr::parse("y - x1*x2", 2));
    Grid grid({{0.0, 1.0}, {0.0}});
    Tensor y({2, 1});
    const ImplicitProblem product(provider, grid, y);
    CHECK_THROWS_AS(first_order_dd(product, mi({0, 0}), 0), DuplicateYError);

    // Sphere at symmetric nodes: y(h, 0) = y(-h, 0).
    auto sphere = std::make_shared<ExprProvider>(Expr::parse("x1^2 + x2^2 + y^2 - 1", 2));
    const double h = 0.25;
    Grid sym_grid({{-h, h}, {0.0}});
    Tensor sym_y({2, 1});
    sym_y.at(mi({0, 0})) = std::sqrt(1 - h * h);
    sym_y.at(mi({1, 0})) = std::sqrt(1 - h * h);
    const ImplicitProblem sym(sphere, sym_grid, sym_y);
    CHECK_THROWS_AS(first_order_dd(sym, mi({0, 0}), 0), DuplicateYError);
}

TEST_CASE("curly bracket over a single path matches the recursive form") {
    const ImplicitProblem problem = sphere_problem({{0.1, 0.25, 0.4}, {0.3}});
    const LatticePath path({mi({0, 0}), mi({1, 0}), mi({2, 0})});
    const double bracket = curly_bracket(problem, path);
    CHECK(bracket == doctest::Approx(recursive_dd(problem, mi({2, 0}))).epsilon(1e-13));
    // And both match the direct divided difference of the solved samples.
    const double reference = direct_dd_y(find_case("sphere"), problem.grid());
    CHECK(bracket == doctest::Approx(reference).epsilon(1e-9));
}

TEST_CASE("k = 1 curly brackets serve unit steps only") {
    const ImplicitProblem problem = sphere_problem({{0.1, 0.25}, {0.3, 0.5}});
    const LatticePath unit({mi({0, 0}), mi({1, 0})});
    CHECK(curly_bracket(problem, unit) == doctest::Approx(first_order_dd(problem, mi({0, 0}), 0)));
    CHECK_THROWS_AS(curly_bracket(problem, LatticePath({mi({0, 0}), mi({1, 1})})),
                    InvalidArgument);
}

TEST_CASE("the |n| = 2 recursive values decompose into curly brackets") {
    const ImplicitProblem problem = sphere_problem({{0.15, 0.3}, {0.2, 0.45}});
    const double via_brackets =
        curly_bracket(problem, LatticePath({mi({0, 0}), mi({1, 0}), mi({1, 1})})) +
        curly_bracket(problem, LatticePath({mi({0, 0}), mi({0, 1}), mi({1, 1})}));
    CHECK(recursive_dd(problem, mi({1, 1})) == doctest::Approx(via_brackets).epsilon(1e-13));
}

TEST_CASE("recursive form tracks the oracle at n = (2,1)") {
    const ImplicitProblem problem = sphere_problem({{0.1, 0.25, 0.45}, {0.2, 0.4}});
    const double reference = direct_dd_y(find_case("sphere"), problem.grid());
    CHECK(recursive_dd(problem, mi({2, 1})) == doctest::Approx(reference).epsilon(1e-8));
}

TEST_CASE("closed forms on the product case are exact") {
    const ImplicitProblem problem = make_problem(find_case("product"), Grid({{1.0, 2.0}, {1.0, 3.0}}));
    const MultiIndex n = mi({1, 1});
    CHECK(polygon_dd(problem, n) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tree_dd(problem, n) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(recursive_dd(problem, n) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear graphs have vanishing higher divided differences") {
    auto provider = std::make_shared<ExprProvider>(Expr::parse("y - x1 - 0*x2", 2));
    Grid grid({{0.1, 0.4, 0.75, 1.3}, {0.5}});
    Tensor y({4, 1});
    for (int i = 0; i < 4; ++i) y.at(mi({i, 0})) = grid.node(0, i);
    const ImplicitProblem problem(provider, grid, y);
    for (int order = 2; order <= 3; ++order) {
        CHECK(std::abs(tree_dd(problem, mi({order, 0}))) < 1e-14);
        CHECK(std::abs(polygon_dd(problem, mi({order, 0}))) < 1e-14);
        CHECK(std::abs(recursive_dd(problem, mi({order, 0}))) < 1e-14);
    }
}

TEST_CASE("multilinear graphs are reproduced exactly") {
    // g = y - P(x) with P of coordinate-degree (1,1): every evaluator must
    // reproduce the exact divided difference of P.
    auto provider =
        std::make_shared<ExprProvider>(Expr::parse("y - (1 + 2*x1 + 3*x2 + 5*x1*x2)", 2));
    Grid grid({{0.25, 0.75}, {0.5, 1.5}});
    Tensor y({2, 2});
    auto poly = [](double a, double b) { return 1 + 2 * a + 3 * b + 5 * a * b; };
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            y.at(mi({i, j})) = poly(grid.node(0, i), grid.node(1, j));
    const ImplicitProblem problem(provider, grid, y);
    CHECK(std::abs(polygon_dd(problem, mi({1, 1})) - 5.0) < 1e-12);
    CHECK(std::abs(tree_dd(problem, mi({1, 1})) - 5.0) < 1e-12);
    CHECK(std::abs(recursive_dd(problem, mi({1, 1})) - 5.0) < 1e-12);
    CHECK(divided_difference(y, grid) == 5.0);
}

TEST_CASE("three forms agree on random instances") {
    std::mt19937_64 rng(2024);
    for (const auto* name : {"sphere", "quadratic", "expgraph"}) {
        const TestCase& tc = find_case(name);
        for (const auto& order : {mi({2, 1}), mi({1, 2}), mi({3, 0}), mi({2, 2})}) {
            const ImplicitProblem problem = random_problem(tc, order, rng);
            const double a = recursive_dd(problem, order);
            const double b = polygon_dd(problem, order);
            const double c = tree_dd(problem, order);
            const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
            CHECK(std::abs(a - b) <= 1e-11 * scale);
            CHECK(std::abs(b - c) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("translation covariance") {
    const ImplicitProblem big = sphere_problem({{0.1, 0.2, 0.35, 0.5}, {0.1, 0.3, 0.45}});
    const MultiIndex lo = mi({1, 0});
    const MultiIndex hi = mi({3, 2});
    const ImplicitProblem small = sphere_problem(
        {{big.grid().node(0, 1), big.grid().node(0, 2), big.grid().node(0, 3)},
         {big.grid().node(1, 0), big.grid().node(1, 1), big.grid().node(1, 2)}});
    const MultiIndex n = hi - lo;
    CHECK(recursive_dd(big, lo, hi) == recursive_dd(small, n));
    CHECK(polygon_dd(big, lo, hi) == polygon_dd(small, n));
    CHECK(tree_dd(big, lo, hi) == tree_dd(small, n));
    // The first-order rule translates too.
    CHECK(first_order_dd(big, lo, 0) == first_order_dd(small, MultiIndex::zero(2), 0));
}

TEST_CASE("singular configurations abort with the offending bracket") {
    // g(0, x2, y) = y^3 - 3y has the two roots +-sqrt(3) whose slope
    // denominator vanishes exactly.
    auto provider = std::make_shared<ExprProvider>(Expr::parse("y^3 - 3*y - x1*x2", 2));
    Grid grid({{0.0}, {1.0, 2.0}});
    Tensor y({1, 2});
    y.at(mi({0, 0})) = std::sqrt(3.0);
    y.at(mi({0, 1})) = -std::sqrt(3.0);
    const ImplicitProblem problem(provider, grid, y);
    try {
        first_order_dd(problem, mi({0, 0}), 1);
        FAIL("expected SingularError");
    } catch (const SingularError& e) {
        CHECK(std::string(e.what()).find("[0;0|(0,0) (0,1)]g") != std::string::npos);
    }
}

TEST_CASE("evaluator preconditions") {
    const ImplicitProblem problem = sphere_problem({{0.1, 0.25}, {0.3, 0.5}});
    CHECK_THROWS_AS(recursive_dd(problem, mi({1, 0})), InvalidArgument);
    CHECK_THROWS_AS(polygon_dd(problem, mi({0, 0})), InvalidArgument);
    CHECK_THROWS_AS(tree_dd(problem, mi({2, 2})), InvalidArgument); // exceeds grid
    CHECK_THROWS_AS(first_order_dd(problem, mi({0, 0}), 2), InvalidArgument);
}

TEST_CASE("emitted first-order term matches the golden file") {
    CHECK(term_strings(mi({1, 0}), TermMode::polygon) == golden_lines("first_order_terms.txt"));
}

TEST_CASE("emitted three-term expansion matches the golden file") {
    CHECK(term_strings(mi({2, 0}), TermMode::polygon) == golden_lines("dd20_terms.txt"));
    // The tree form flattens to the same three terms.
    CHECK(term_strings(mi({2, 0}), TermMode::tree) == golden_lines("dd20_terms.txt"));
}

TEST_CASE("emitted products match the golden files") {
    CHECK(emit_products(mi({1, 1})) == golden_lines("dd11_products.txt"));
    CHECK(emit_products(mi({3, 0})) == golden_lines("dd30_products.txt"));
    CHECK(emit_products(mi({2, 1})) == golden_lines("dd21_products.txt"));
    CHECK(emit_products(mi({1, 1, 1})) == golden_lines("dd111_products.txt"));
}

TEST_CASE("emitted tree terms at n=(1,1) match the golden file") {
    CHECK(term_strings(mi({1, 1}), TermMode::tree) == golden_lines("dd11_tree_terms.txt"));
}

TEST_CASE("term-count identities") {
    for (const auto& n : {mi({2, 0}), mi({1, 1}), mi({2, 1}), mi({1, 1, 1}), mi({2, 2})}) {
        const long long paths = multinomial(n.coords());
        const auto partitions = enumerate_partitions(n.order() + 1);
        CHECK(static_cast<long long>(emit_products(n).size()) ==
              paths * static_cast<long long>(partitions.size()));
        // Flattened term multisets agree between the two modes, up to the
        // order of factors within a product.
        auto canonical = [](const MultiIndex& order, TermMode mode) {
            std::vector<std::string> out;
            for (const TermExpr& term : emit_terms(order, mode)) {
                std::vector<std::string> factors;
                for (const QuotientFactor& f : term.factors) factors.push_back(f.to_string());
                std::sort(factors.begin(), factors.end());
                std::string s = term.sign < 0 ? "-" : "+";
                for (const auto& f : factors) s += " " + f;
                out.push_back(std::move(s));
            }
            std::sort(out.begin(), out.end());
            return out;
        };
        CHECK(canonical(n, TermMode::polygon) == canonical(n, TermMode::tree));
    }
    // Per-path partition count at |n| = 3 is 3.
    CHECK(emit_products(mi({2, 1})).size() == 3 * 3);
}

TEST_CASE("numeric evaluation equals the sum of emitted terms") {
    // The flattened symbolic terms, resolved against the problem, add up to
    // the evaluator's value: the printer and the evaluator share one source.
    const ImplicitProblem problem = sphere_problem({{0.12, 0.3, 0.5}, {0.2, 0.42}});
    const MultiIndex n = mi({2, 1});
    CompensatedSum sum;
    for (const TermExpr& term : emit_terms(n, TermMode::tree)) {
        double value = term.sign;
        for (const QuotientFactor& factor : term.factors) {
            std::vector<std::vector<double>> x_nodes;
            for (int axis = 0; axis < 2; ++axis) {
                std::vector<double> nodes;
                for (int i = factor.num.x_ranges[static_cast<std::size_t>(axis)].first;
                     i <= factor.num.x_ranges[static_cast<std::size_t>(axis)].second; ++i)
                    nodes.push_back(problem.grid().node(axis, i));
                x_nodes.push_back(std::move(nodes));
            }
            std::vector<double> y_nodes;
            for (const MultiIndex& p : factor.num.y_points) y_nodes.push_back(problem.y_at(p));
            const double num = g_divided_difference(problem.g(), x_nodes, y_nodes);

            std::vector<std::vector<double>> xd;
            for (int axis = 0; axis < 2; ++axis)
                xd.push_back({problem.grid().node(
                    axis, factor.den.x_ranges[static_cast<std::size_t>(axis)].first)});
            std::vector<double> yd;
            for (const MultiIndex& p : factor.den.y_points) yd.push_back(problem.y_at(p));
            value *= num / g_divided_difference(problem.g(), xd, yd);
        }
        sum.add(value);
    }
    CHECK(tree_dd(problem, n) == doctest::Approx(sum.value()).epsilon(1e-12));
}
