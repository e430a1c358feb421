#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "brute.hpp"
#include "impdiff/hideriv.hpp"
#include "impdiff/oracle.hpp"
#include "impdiff/util.hpp"

using namespace impdiff;

namespace {

MultiIndex mi(std::vector<int> c) { return MultiIndex(std::move(c)); }

std::vector<std::string> partition_strings(const MultiIndex& n) {
    std::vector<std::string> out;
    for (const DerivPartition& p : enumerate_deriv_partitions(n)) out.push_back(p.to_string());
    return out;
}

std::string golden_line(const std::string& name) {
    std::ifstream in(std::string(IMPDIFF_GOLDEN_DIR) + "/" + name);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST_CASE("derivative partitions reproduce the worked lists") {
    CHECK(partition_strings(mi({1, 0})) == std::vector<std::string>{"{(1,0,0)}"});
    CHECK(partition_strings(mi({2, 0})) ==
          std::vector<std::string>{"{(2,0,0)}", "{(1,0,0),(1,0,1)}",
                                   "{(1,0,0),(1,0,0),(0,0,2)}"});
    CHECK(partition_strings(mi({1, 1})) ==
          std::vector<std::string>{"{(1,1,0)}", "{(1,0,0),(0,1,1)}", "{(0,1,0),(1,0,1)}",
                                   "{(1,0,0),(0,1,0),(0,0,2)}"});
    CHECK_THROWS_AS(enumerate_deriv_partitions(mi({0, 0})), InvalidArgument);
}

TEST_CASE("derivative partitions satisfy their structural invariants") {
    for (const auto& n : {mi({3, 0}), mi({2, 1}), mi({2, 2}), mi({1, 3})}) {
        const auto partitions = enumerate_deriv_partitions(n);
        for (std::size_t i = 0; i < partitions.size(); ++i) {
            const DerivPartition& p = partitions[i];
            CHECK(p.size() <= 2 * n.order() - 1);
            if (i > 0) CHECK(partitions[i - 1] < p);
            MultiIndex s_sum = MultiIndex::zero(2);
            int t_sum = 0;
            for (const auto& [s, t] : p.elements) {
                CHECK_FALSE((s.is_zero() && t == 0));
                CHECK_FALSE((s.is_zero() && t == 1)); // (0,1) excluded
                s_sum = s_sum + s;
                t_sum += t;
            }
            CHECK(s_sum == n);
            CHECK(t_sum == p.size() - 1);
        }
    }
}

TEST_CASE("partition coefficients on the worked examples") {
    const auto coeff = [](std::vector<std::pair<MultiIndex, int>> elements) {
        DerivPartition p{std::move(elements)};
        p.normalize();
        return partition_coefficient(p);
    };
    CHECK(coeff({{mi({1, 1}), 0}}) == Rational(1));
    CHECK(coeff({{mi({0, 0}), 2}, {mi({1, 0}), 0}, {mi({1, 0}), 0}}) == Rational(1));
    CHECK(coeff({{mi({1, 0}), 1}, {mi({1, 0}), 0}}) == Rational(1));
    // A partition with repeated elements where the quotient is > 1.
    CHECK(coeff({{mi({1, 0}), 1}, {mi({1, 0}), 1}, {mi({1, 0}), 0}, {mi({1, 0}), 0},
                 {mi({0, 0}), 2}}) == Rational(multinomial({2, 2, 1}), 5));
}

TEST_CASE("coefficients equal the exhaustive census") {
    for (const auto& n : {mi({1, 0}), mi({2, 0}), mi({1, 1}), mi({2, 1}), mi({3, 0})}) {
        const auto census = star_type_census(n);
        const auto partitions = enumerate_deriv_partitions(n);
        REQUIRE(census.size() == partitions.size());
        for (const DerivPartition& p : partitions) {
            auto it = census.find(p);
            REQUIRE(it != census.end());
            const Rational coeff = partition_coefficient(p);
            CHECK(coeff.denominator() == 1);
            CHECK(coeff.numerator() == it->second);
        }
    }
}

TEST_CASE("derivative values on the sphere") {
    const TestCase& tc = find_case("sphere");
    ExprProvider provider(tc.g);
    const std::vector<double> x{0.3, 0.4};
    const double y = std::sqrt(0.75);
    CHECK(derivative_from_partials(provider, x, y, mi({1, 0})) ==
          doctest::Approx(-0.3 / std::sqrt(0.75)).epsilon(1e-12));
    const double expected11 = -0.3 * 0.4 * std::pow(0.75, -1.5);
    CHECK(derivative_from_partials(provider, x, y, mi({1, 1})) ==
          doctest::Approx(expected11).epsilon(1e-12));
    CHECK(derivative_from_partials(provider, x, y, mi({1, 1})) ==
          doctest::Approx(-0.184752086).epsilon(1e-8));
}

TEST_CASE("derivative values on the product graph") {
    ExprProvider provider(Expr::parse("y - x1*x2", 2));
    const std::vector<double> x{0.7, 1.3};
    const double y = 0.7 * 1.3;
    CHECK(derivative_from_partials(provider, x, y, mi({1, 1})) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(derivative_from_partials(provider, x, y, mi({2, 0}))) < 1e-13);
}

TEST_CASE("derivative guards") {
    ExprProvider provider(Expr::parse("y^2 - x1", 1));
    // Inconsistent point.
    CHECK_THROWS_AS(derivative_from_partials(provider, std::vector<double>{1.0}, 0.3, mi({1})),
                    InconsistentPointError);
    // g_{0,1} = 2y vanishes at the branch point.
    CHECK_THROWS_AS(derivative_from_partials(provider, std::vector<double>{0.0}, 0.0, mi({1})),
                    SingularError);
}

TEST_CASE("coalesced tree form groups into the partition form") {
    const TestCase& tc = find_case("quadratic");
    ExprProvider provider(tc.g);
    const std::vector<double> x{1.0, 1.0};
    const double y = solve_y(provider, x, tc.solve);

    const auto result11 = coalesced_tree_form(provider, x, y, mi({1, 1}));
    CHECK(result11.terms.size() == 5);
    CHECK(result11.derivative ==
          doctest::Approx(derivative_from_partials(provider, x, y, mi({1, 1}))).epsilon(1e-13));
    // The two terms carrying the (0,0,2)-multiset are equal halves.
    std::vector<double> halves;
    int multiset3 = 0;
    for (const auto& term : result11.terms)
        if (term.star_types.size() == 3) {
            ++multiset3;
            halves.push_back(term.value);
        }
    REQUIRE(multiset3 == 2);
    CHECK(halves[0] == doctest::Approx(halves[1]).epsilon(1e-13));

    CHECK(coalesced_tree_form(provider, x, y, mi({1, 0})).terms.size() == 1);
    CHECK(coalesced_tree_form(provider, x, y, mi({2, 0})).terms.size() == 3);
}

TEST_CASE("partition form equals the coalesced tree form on random points") {
    std::mt19937_64 rng(99);
    for (const auto* name : {"sphere", "product", "quadratic", "expgraph"}) {
        const TestCase& tc = find_case(name);
        ExprProvider provider(tc.g);
        for (const auto& n : {mi({1, 1}), mi({2, 1}), mi({2, 2}), mi({4, 0})}) {
            std::vector<double> x;
            for (const auto& [lo, hi] : tc.box) x.push_back(uniform(rng, lo, hi));
            const double y = solve_y(provider, x, tc.solve);
            const double a = derivative_from_partials(provider, x, y, n);
            const double b = coalesced_tree_form(provider, x, y, n).derivative;
            CHECK(std::abs(a - b) <= 1e-11 * std::max({1.0, std::abs(a), std::abs(b)}));
        }
    }
}

TEST_CASE("partition form matches central differences of the solved function") {
    std::mt19937_64 rng(123);
    const double h = 1e-3;
    for (const auto* name : {"sphere", "quadratic"}) {
        const TestCase& tc = find_case(name);
        ExprProvider provider(tc.g);
        auto solved = [&](std::span<const double> x) { return solve_y(provider, x, tc.solve); };
        for (const auto& n : {mi({1, 0}), mi({1, 1}), mi({2, 0}), mi({2, 1})}) {
            // Stay inside the box under the stencil's half-width.
            std::vector<double> x;
            for (const auto& [lo, hi] : tc.box) {
                const double margin = 0.1 * (hi - lo);
                x.push_back(uniform(rng, lo + margin, hi - margin));
            }
            const double y = solve_y(provider, x, tc.solve);
            const double exact = derivative_from_partials(provider, x, y, n);
            const double fd = brute::central_difference(solved, x, n, h);
            CHECK(std::abs(exact - fd) <= 1e-4 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("collected formulas match the worked displays") {
    CHECK(derivative_formula(mi({1, 0})) == golden_line("deriv_y10.txt"));
    CHECK(derivative_formula(mi({2, 0})) == golden_line("deriv_y20.txt"));
    CHECK(derivative_formula(mi({1, 1})) == golden_line("deriv_y11.txt"));
}

TEST_CASE("collected coefficients match the worked data") {
    // Coefficient per monomial (the collected display), pinned by hand.
    auto collected = [](const MultiIndex& n) {
        std::map<std::string, Rational> out;
        for (const DerivPartition& p : enumerate_deriv_partitions(n)) {
            Rational coeff = partition_coefficient(p) * Rational(coalescence_factor(n));
            for (const auto& [s, t] : p.elements) coeff /= Rational(coalescence_factor(s, t));
            if (p.size() % 2 == 1) coeff = -coeff;
            std::string monomial;
            for (const auto& [s, t] : p.elements) {
                monomial += "g";
                for (int j = 0; j < s.dim(); ++j) monomial += std::to_string(s[j]);
                monomial += std::to_string(t) + " ";
            }
            out[monomial] = coeff;
        }
        return out;
    };
    const std::map<std::string, Rational> y20{
        {"g200 ", Rational(-1)},
        {"g100 g101 ", Rational(2)},
        {"g100 g100 g002 ", Rational(-1)},
    };
    CHECK(collected(mi({2, 0})) == y20);
    const std::map<std::string, Rational> y11{
        {"g110 ", Rational(-1)},
        {"g100 g011 ", Rational(1)},
        {"g010 g101 ", Rational(1)},
        {"g100 g010 g002 ", Rational(-1)},
    };
    CHECK(collected(mi({1, 1})) == y11);
}

TEST_CASE("derivative partitions for q = 1 recover the univariate special case") {
    // n = 3, q = 1: partitions of (3, |p|-1) without (0,1).
    const auto partitions = enumerate_deriv_partitions(mi({3}));
    CHECK(partitions.size() == 9);
    ExprProvider provider(Expr::parse("y - x1^3 - x1", 1));
    const std::vector<double> x{0.6};
    const double y = 0.6 * 0.6 * 0.6 + 0.6;
    CHECK(derivative_from_partials(provider, x, y, mi({3})) == doctest::Approx(6.0).epsilon(1e-10));
}
