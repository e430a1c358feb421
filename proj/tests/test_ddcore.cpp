#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "impdiff/ddcore.hpp"
#include "impdiff/exprsym.hpp"
#include "impdiff/util.hpp"

using namespace impdiff;

namespace {

Tensor sample(const Grid& grid, const std::function<double(std::span<const double>)>& f) {
    std::vector<int> dims;
    for (int j = 0; j < grid.dim(); ++j) dims.push_back(grid.size(j));
    Tensor t(dims);
    std::vector<int> idx(static_cast<std::size_t>(grid.dim()), 0);
    const MultiIndex n = grid.max_order();
    while (true) {
        MultiIndex mi{std::vector<int>(idx)};
        t.at(mi) = f(grid.point(mi));
        int j = grid.dim() - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == n[j]) idx[static_cast<std::size_t>(j--)] = 0;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
    }
    return t;
}

// Reduction in an arbitrary axis order, as an independent reference.
double dd_by_axis_order(Tensor values, Grid grid, std::vector<int> order) {
    // Repeatedly contract the chosen axis by slicing through Tensor::at.
    for (int axis : order) {
        std::vector<int> dims;
        for (int j = 0; j < grid.dim(); ++j)
            if (j != axis) dims.push_back(grid.size(j));
        if (dims.empty()) {
            std::vector<double> col;
            for (int i = 0; i < grid.size(axis); ++i) col.push_back(values.at(MultiIndex{{i}}));
            return divided_difference(grid.axis(axis), col);
        }
        Tensor reduced(dims);
        std::vector<int> idx(dims.size(), 0);
        while (true) {
            std::vector<double> col;
            for (int i = 0; i < grid.size(axis); ++i) {
                std::vector<int> full;
                std::size_t k = 0;
                for (int j = 0; j < grid.dim(); ++j)
                    full.push_back(j == axis ? i : idx[k++]);
                col.push_back(values.at(MultiIndex{std::move(full)}));
            }
            reduced.at(MultiIndex{std::vector<int>(idx)}) =
                divided_difference(grid.axis(axis), col);
            std::size_t j = dims.size();
            while (j > 0 && idx[j - 1] == dims[j - 1] - 1) idx[--j] = 0;
            if (j == 0) break;
            ++idx[j - 1];
        }
        std::vector<std::vector<double>> new_axes;
        for (int j = 0; j < grid.dim(); ++j)
            if (j != axis)
                new_axes.push_back({grid.axis(j).begin(), grid.axis(j).end()});
        grid = Grid(new_axes);
        values = std::move(reduced);
        for (int& a : order)
            if (a > axis) --a;
    }
    return values[0];
}

} // namespace

TEST_CASE("univariate divided differences") {
    CHECK(divided_difference(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}) == 1.0);
    CHECK(divided_difference(std::vector<double>{0.7}, std::vector<double>{3.25}) == 3.25);
    // Unsorted nodes are fine as long as they are distinct.
    const double a =
        divided_difference(std::vector<double>{1.0, 0.0, 2.0}, std::vector<double>{1.0, 0.0, 4.0});
    CHECK(std::abs(a - 1.0) < 1e-14); // second difference of x^2
}

TEST_CASE("tensor divided differences") {
    const Grid grid({{0.0, 1.0}, {0.0, 1.0}});
    const Tensor t = sample(grid, [](std::span<const double> x) { return x[0] * x[1]; });
    CHECK(divided_difference(t, grid) == 1.0);

    const Grid point({{0.4}, {0.7}});
    const Tensor tp = sample(point, [](std::span<const double>) { return 2.5; });
    CHECK(divided_difference(tp, point) == 2.5);
}

TEST_CASE("axis reduction order does not matter") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int q = 1 + static_cast<int>(rng() % 3);
        std::vector<std::vector<double>> axes;
        for (int j = 0; j < q; ++j) {
            const int count = 1 + static_cast<int>(rng() % 4);
            std::vector<double> nodes;
            double at = uniform(rng, -1.0, 0.0);
            for (int i = 0; i < count; ++i) {
                nodes.push_back(at);
                at += uniform(rng, 0.1, 1.0);
            }
            axes.push_back(std::move(nodes));
        }
        const Grid grid(axes);
        Tensor t = sample(grid, [](std::span<const double>) { return 0.0; });
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = uniform(rng, -1.0, 1.0);

        const double reference = divided_difference(t, grid);
        std::vector<int> order;
        for (int j = 0; j < q; ++j) order.push_back(j);
        do {
            const double permuted = dd_by_axis_order(t, grid, order);
            CHECK(std::abs(permuted - reference) <=
                  1e-13 * std::max(1.0, std::abs(reference)));
        } while (std::next_permutation(order.begin(), order.end()));
    }
}

TEST_CASE("second differences of per-axis affine data vanish exactly") {
    // Dyadic nodes keep every table entry exact.
    const Grid grid({{0.0, 0.25, 0.75}, {0.5, 1.0}});
    const Tensor t =
        sample(grid, [](std::span<const double> x) { return 1.0 + 2.0 * x[0] + 3.0 * x[1]; });
    CHECK(divided_difference(t, grid) == 0.0);

    const Grid gx({{0.0, 0.25, 0.5, 1.0}});
    const Tensor tx = sample(gx, [](std::span<const double> x) { return 0.5 - 4.0 * x[0]; });
    CHECK(divided_difference(tx, gx) == 0.0);
}

TEST_CASE("shrinking equispaced grids converge linearly to the derivative") {
    // n! * [x0, ..., x0 + n h]f -> f^(n)(x0), error O(h).
    const double x0 = 0.3;
    const int n = 3;
    auto error_at = [&](double h) {
        std::vector<double> nodes, values;
        for (int i = 0; i <= n; ++i) {
            nodes.push_back(x0 + i * h);
            values.push_back(std::exp(nodes.back()));
        }
        const double dd = divided_difference(nodes, values);
        return std::abs(static_cast<double>(factorial(n)) * dd - std::exp(x0));
    };
    const double coarse = error_at(1e-2);
    const double fine = error_at(1e-3);
    CHECK(fine < coarse);
    CHECK(coarse / fine > 8.0);
    CHECK(coarse / fine < 12.0);
}

TEST_CASE("bar-form divided differences of g") {
    const ExprProvider linear(Expr::parse("y - x1*x2", 2));
    // Slope in y with singleton x axes.
    CHECK(g_divided_difference(linear, {{0.0}, {0.0}}, std::vector<double>{0.3, 0.9}) == 1.0);

    const ExprProvider square(Expr::parse("y^2", 1));
    const double second =
        g_divided_difference(square, {{0.5}}, std::vector<double>{0.1, 0.4, 0.9});
    CHECK(std::abs(second - 1.0) < 1e-13);

    const ExprProvider sphere(Expr::parse("x1^2 + x2^2 + y^2 - 1", 2));
    const double slope =
        g_divided_difference(sphere, {{0.2}, {0.3}}, std::vector<double>{0.5, 0.7});
    CHECK(std::abs(slope - 1.2) < 1e-13); // (0.49 - 0.25) / 0.2
}

TEST_CASE("coalescence factors") {
    CHECK(coalescence_factor(MultiIndex{{2, 0}}) == 2);
    CHECK(coalescence_factor(MultiIndex{{0, 0}}, 2) == 2);
    CHECK(coalescence_factor(MultiIndex{{1, 1}}) == 1);
    CHECK(coalescence_factor(MultiIndex{{3, 2}}) == 12);
    CHECK(coalescence_factor(MultiIndex{{2, 1}}, 3) == 12);
}

TEST_CASE("coincident nodes are rejected") {
    CHECK_THROWS_AS(Grid({{0.0, 0.0, 1.0}}), InvalidArgument); // not strictly increasing
    CHECK_THROWS_AS(
        divided_difference(std::vector<double>{0.0, 1.0, 1.0 + 1e-15},
                           std::vector<double>{0.0, 1.0, 2.0}),
        CoincidentNodesError);

    const ExprProvider linear(Expr::parse("y - x1", 1));
    CHECK_THROWS_AS(g_divided_difference(linear, {{0.0}}, std::vector<double>{0.5, 0.5}),
                    DuplicateYError);
    try {
        g_divided_difference(linear, {{0.0}}, std::vector<double>{0.25, 0.75, 0.25});
        FAIL("expected DuplicateYError");
    } catch (const DuplicateYError& e) {
        CHECK(std::string(e.what()).find("0.25") != std::string::npos);
    }
}

TEST_CASE("grid windows") {
    const Grid grid({{0.0, 0.1, 0.2, 0.3}, {1.0, 2.0, 3.0}});
    const Grid window = grid.window(MultiIndex{{1, 0}}, MultiIndex{{3, 1}});
    CHECK(window.size(0) == 3);
    CHECK(window.size(1) == 2);
    CHECK(window.node(0, 0) == 0.1);
    CHECK(window.node(1, 1) == 2.0);
    CHECK_THROWS_AS(grid.window(MultiIndex{{0, 0}}, MultiIndex{{4, 0}}), InvalidArgument);
}
