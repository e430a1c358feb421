#include "impdiff/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "impdiff/util.hpp"

namespace impdiff {

std::shared_ptr<const GProvider> TestCase::provider() const {
    return std::make_shared<ExprProvider>(g);
}

namespace {

TestCase make_case(std::string name, int dim, std::string g_text,
                   std::vector<std::pair<double, double>> box, SolveSpec solve,
                   std::optional<std::string> closed_form_text) {
    TestCase tc;
    tc.name = std::move(name);
    tc.dim = dim;
    tc.g = Expr::parse(g_text, dim);
    tc.g_text = std::move(g_text);
    tc.box = std::move(box);
    tc.solve = solve;
    if (closed_form_text) tc.closed_form = Expr::parse(*closed_form_text, dim);
    return tc;
}

} // namespace

const std::vector<TestCase>& builtin_cases() {
    static const std::vector<TestCase> cases = [] {
        std::vector<TestCase> out;
        out.push_back(make_case("product", 2, "y - x1*x2",
                                {{0.2, 1.5}, {0.2, 1.5}},
                                SolveSpec{{{-10.0, 10.0}}, {}},
                                "x1*x2"));
        out.push_back(make_case("sphere", 2, "x1^2 + x2^2 + y^2 - 1",
                                {{0.0, 0.6}, {0.0, 0.6}},
                                SolveSpec{{{0.0, 1.0}}, {}},
                                "sqrt(1 - x1^2 - x2^2)"));
        out.push_back(make_case("quadratic", 2, "x1*y^2 + x2*y - 1",
                                {{0.5, 1.5}, {0.5, 1.5}},
                                SolveSpec{{{0.0, 2.0}}, {}},
                                "(sqrt(x2^2 + 4*x1) - x2)/(2*x1)"));
        out.push_back(make_case("expgraph", 2, "y - exp(x1 + x2)",
                                {{-0.5, 0.5}, {-0.5, 0.5}},
                                SolveSpec{{{0.05, 3.0}}, {}},
                                "exp(x1 + x2)"));
        out.push_back(make_case("sphere3", 3, "x1^2 + x2^2 + x3^2 + y^2 - 1",
                                {{0.0, 0.5}, {0.0, 0.5}, {0.0, 0.5}},
                                SolveSpec{{{0.0, 1.0}}, {}},
                                "sqrt(1 - x1^2 - x2^2 - x3^2)"));
        return out;
    }();
    return cases;
}

const TestCase& find_case(std::string_view name) {
    for (const TestCase& tc : builtin_cases())
        if (tc.name == name) return tc;
    throw InvalidArgument("unknown test case: " + std::string(name));
}

double solve_y(const GProvider& g, std::span<const double> x, const SolveSpec& spec) {
    if (!spec.bracket && !spec.guess)
        throw InvalidArgument("solve_y: need a bracket or a guess");
    const MultiIndex zero = MultiIndex::zero(g.dim());
    auto f = [&](double y) { return g.value(x, y); };
    auto fy = [&](double y) { return g.partial(zero, 1, x, y); };

    constexpr int kNewtonIters = 50;
    constexpr double kStepTol = 1e-14;

    if (spec.bracket) {
        auto [lo, hi] = *spec.bracket;
        if (!(lo < hi)) throw InvalidArgument("solve_y: empty bracket");
        double flo = f(lo);
        double fhi = f(hi);
        if (flo == 0.0) return lo;
        if (fhi == 0.0) return hi;
        if (flo * fhi > 0.0)
            throw SolveError("solve_y: no sign change on bracket [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
        const double scale = std::max({1.0, std::abs(flo), std::abs(fhi)});
        double y = spec.guess && *spec.guess > lo && *spec.guess < hi ? *spec.guess
                                                                      : 0.5 * (lo + hi);
        for (int iter = 0; iter < kNewtonIters + 200; ++iter) {
            const double fv = f(y);
            if (std::abs(fv) <= 1e-15 * scale) return y;
            if (fv * flo > 0.0)
                lo = y;
            else
                hi = y;
            double next;
            const double dv = fy(y);
            // Newton while it stays inside the bracket; bisect otherwise
            // (always bisect once the Newton budget is spent).
            if (iter < kNewtonIters && dv != 0.0 && std::isfinite(dv)) {
                next = y - fv / dv;
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            } else {
                next = 0.5 * (lo + hi);
            }
            if (std::abs(next - y) <= kStepTol * std::max(1.0, std::abs(y))) {
                y = next;
                break;
            }
            y = next;
        }
        if (std::abs(f(y)) <= 1e-13 * scale) return y;
        throw SolveError("solve_y: bracketed iteration did not converge");
    }

    double y = *spec.guess;
    for (int iter = 0; iter < kNewtonIters; ++iter) {
        const double fv = f(y);
        const double dv = fy(y);
        if (dv == 0.0 || !std::isfinite(dv))
            throw SolveError("solve_y: zero derivative during Newton iteration");
        const double next = y - fv / dv;
        if (!std::isfinite(next)) throw SolveError("solve_y: Newton iteration diverged");
        if (std::abs(next - y) <= kStepTol * std::max(1.0, std::abs(y))) {
            y = next;
            break;
        }
        y = next;
    }
    if (std::abs(f(y)) <= 1e-13 * std::max(1.0, std::abs(y))) return y;
    throw SolveError("solve_y: Newton did not converge from the guess");
}

Tensor solve_y_on_grid(const GProvider& g, const Grid& grid, const SolveSpec& spec) {
    std::vector<int> dims;
    for (int j = 0; j < grid.dim(); ++j) dims.push_back(grid.size(j));
    Tensor values(dims);
    const MultiIndex n = grid.max_order();
    std::vector<int> idx(static_cast<std::size_t>(grid.dim()), 0);
    while (true) {
        MultiIndex mi{std::vector<int>(idx)};
        values.at(mi) = solve_y(g, grid.point(mi), spec);
        int j = grid.dim() - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == n[j]) idx[static_cast<std::size_t>(j--)] = 0;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
    }
    return values;
}

double direct_dd_y(const TestCase& test_case, const Grid& grid) {
    ExprProvider provider(test_case.g);
    const Tensor values = solve_y_on_grid(provider, grid, test_case.solve);
    return divided_difference(values, grid);
}

double exact_derivative_y(const TestCase& test_case, std::span<const double> x, const MultiIndex& n) {
    if (!test_case.closed_form)
        throw InvalidArgument("exact_derivative_y: case '" + test_case.name +
                              "' has no closed form");
    return test_case.closed_form->diff(n, 0).eval(x, 0.0);
}

ImplicitProblem make_problem(const TestCase& test_case, const Grid& grid) {
    auto provider = test_case.provider();
    Tensor values = solve_y_on_grid(*provider, grid, test_case.solve);
    return ImplicitProblem(std::move(provider), grid, std::move(values));
}

Grid random_grid(const TestCase& test_case, const MultiIndex& n, std::mt19937_64& rng) {
    if (n.dim() != test_case.dim) throw DimensionError("random_grid: dimension mismatch");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<std::vector<double>> axes;
        bool ok = true;
        for (int j = 0; j < n.dim() && ok; ++j) {
            const auto& [lo, hi] = test_case.box[static_cast<std::size_t>(j)];
            const double min_gap = 0.05 * (hi - lo);
            std::vector<double> nodes;
            for (int i = 0; i <= n[j]; ++i) nodes.push_back(uniform(rng, lo, hi));
            std::sort(nodes.begin(), nodes.end());
            for (std::size_t i = 1; i < nodes.size(); ++i)
                if (nodes[i] - nodes[i - 1] < min_gap) ok = false;
            axes.push_back(std::move(nodes));
        }
        if (ok) return Grid(std::move(axes));
    }
    throw SolveError("random_grid: could not satisfy the separation constraint");
}

ImplicitProblem random_problem(const TestCase& test_case, const MultiIndex& n, std::mt19937_64& rng) {
    auto provider = test_case.provider();
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Grid grid = random_grid(test_case, n, rng);
        Tensor values = solve_y_on_grid(*provider, grid, test_case.solve);
        // Generic position: all grid y values pairwise distinct.
        bool ok = true;
        for (std::size_t i = 0; i < values.size() && ok; ++i)
            for (std::size_t j = i + 1; j < values.size() && ok; ++j)
                if (std::abs(values[i] - values[j]) < 1e-8) ok = false;
        if (ok) return ImplicitProblem(provider, std::move(grid), std::move(values));
    }
    throw SolveError("random_problem: could not reach generic y position");
}

} // namespace impdiff
