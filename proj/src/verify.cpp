#include "impdiff/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "impdiff/hideriv.hpp"
#include "impdiff/implicit.hpp"
#include "impdiff/oracle.hpp"
#include "impdiff/polytree.hpp"
#include "impdiff/util.hpp"

namespace impdiff {

namespace {

std::string format_deviation(double d) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", d);
    return buf;
}

CheckResult make_result(std::string name, bool pass, double worst, std::string detail = "") {
    return CheckResult{std::move(name), pass, worst, std::move(detail)};
}

// --- independent combinatorial oracles -----------------------------------

using Diagonal = std::pair<int, int>;

bool diagonals_cross(const Diagonal& a, const Diagonal& b) {
    auto strictly_between = [](int v, int lo, int hi) { return lo < v && v < hi; };
    return (strictly_between(b.first, a.first, a.second) !=
            strictly_between(b.second, a.first, a.second)) &&
           b.first != a.first && b.first != a.second && b.second != a.first &&
           b.second != a.second;
}

// Every pairwise-noncrossing diagonal subset of the m-gon, as a set of sets.
std::set<std::set<Diagonal>> brute_force_dissections(int m) {
    std::vector<Diagonal> diagonals;
    for (int a = 0; a < m; ++a)
        for (int b = a + 2; b < m; ++b)
            if (!(a == 0 && b == m - 1)) diagonals.push_back({a, b});
    std::set<std::set<Diagonal>> out;
    const std::size_t total = std::size_t{1} << diagonals.size();
    for (std::size_t mask = 0; mask < total; ++mask) {
        std::set<Diagonal> chosen;
        bool ok = true;
        for (std::size_t i = 0; i < diagonals.size() && ok; ++i) {
            if (!(mask & (std::size_t{1} << i))) continue;
            for (const Diagonal& d : chosen)
                if (diagonals_cross(diagonals[i], d)) {
                    ok = false;
                    break;
                }
            if (ok) chosen.insert(diagonals[i]);
        }
        if (ok) out.insert(std::move(chosen));
    }
    return out;
}

std::set<Diagonal> inner_edges_of(const PolygonPartition& partition) {
    const int n = partition.vertex_count - 1;
    std::set<Diagonal> inner;
    for (const auto& face : partition.faces) {
        auto consider = [&](int a, int b) {
            if (b != a + 1 && !(a == 0 && b == n)) inner.insert({a, b});
        };
        for (std::size_t i = 1; i < face.size(); ++i) consider(face[i - 1], face[i]);
        consider(face.front(), face.back());
    }
    return inner;
}

// Out-degree profiles of every plane tree with `vertices` vertices, one
// entry per tree. Built straight from the recursive definition, independent
// of the counting formula.
std::vector<std::map<int, long long>> all_plane_tree_profiles(int vertices) {
    static std::map<int, std::vector<std::map<int, long long>>> memo;
    if (auto it = memo.find(vertices); it != memo.end()) return it->second;
    std::vector<std::map<int, long long>> out;
    if (vertices == 1) {
        out.push_back({{0, 1}});
    } else {
        // Root degree d, ordered compositions of the remaining vertices.
        for (int d = 1; d <= vertices - 1; ++d) {
            std::function<void(int, int, std::vector<std::map<int, long long>>&)> build =
                [&](int remaining, int slots, std::vector<std::map<int, long long>>& partial) {
                    if (slots == 0) {
                        if (remaining == 0)
                            for (auto& profile : partial) out.push_back(profile);
                        return;
                    }
                    for (int take = 1; take <= remaining - (slots - 1); ++take) {
                        auto subs = all_plane_tree_profiles(take);
                        std::vector<std::map<int, long long>> merged;
                        for (const auto& p : partial)
                            for (const auto& s : subs) {
                                auto m = p;
                                for (const auto& [deg, cnt] : s) m[deg] += cnt;
                                merged.push_back(std::move(m));
                            }
                        build(remaining - take, slots - 1, merged);
                    }
                };
            std::vector<std::map<int, long long>> seed{{{d, 1}}};
            build(vertices - 1, d, seed);
        }
    }
    memo[vertices] = out;
    return out;
}

double relative_deviation(std::initializer_list<double> values) {
    double lo = *values.begin(), hi = *values.begin(), scale = 1.0;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        scale = std::max(scale, std::abs(v));
    }
    return (hi - lo) / scale;
}

std::vector<MultiIndex> orders_q2(int min_order, int max_order) {
    std::vector<MultiIndex> out;
    for (int total = min_order; total <= max_order; ++total)
        for (int n1 = total; n1 >= 0; --n1) out.push_back(MultiIndex{{n1, total - n1}});
    return out;
}

const std::vector<const TestCase*>& cases_q2() {
    static const std::vector<const TestCase*> cases = [] {
        std::vector<const TestCase*> out;
        for (const TestCase& tc : builtin_cases())
            if (tc.dim == 2) out.push_back(&tc);
        return out;
    }();
    return cases;
}

} // namespace

std::vector<CheckResult> verify_counts() {
    std::vector<CheckResult> results;

    // Dissection counts and exact diagonal-set agreement with brute force.
    const std::vector<std::size_t> expected{1, 3, 11, 45};
    for (int m = 3; m <= 6; ++m) {
        const auto partitions = enumerate_partitions(m);
        const auto brute = brute_force_dissections(m);
        std::set<std::set<Diagonal>> seen;
        for (const auto& partition : partitions) {
            validate_partition(partition);
            seen.insert(inner_edges_of(partition));
        }
        const bool pass = partitions.size() == expected[static_cast<std::size_t>(m - 3)] &&
                          seen == brute && seen.size() == partitions.size();
        results.push_back(make_result(
            "partitions of " + std::to_string(m) + "-gon", pass, 0.0,
            std::to_string(partitions.size()) + " found, " + std::to_string(brute.size()) +
                " by brute force"));
    }

    // Tree-count formula against exhaustive enumeration, <= 8 vertices.
    {
        bool pass = true;
        long long profiles_checked = 0;
        for (int v = 1; v <= 8 && pass; ++v) {
            std::map<std::vector<long long>, long long> census;
            for (const auto& profile : all_plane_tree_profiles(v)) {
                int max_deg = 0;
                for (const auto& [deg, cnt] : profile) max_deg = std::max(max_deg, deg);
                std::vector<long long> counts(static_cast<std::size_t>(max_deg) + 1, 0);
                for (const auto& [deg, cnt] : profile) counts[static_cast<std::size_t>(deg)] = cnt;
                ++census[counts];
            }
            for (const auto& [counts, observed] : census) {
                ++profiles_checked;
                if (count_trees_by_outdegree(counts) != observed) pass = false;
            }
        }
        results.push_back(make_result("tree counts by out-degree (<= 8 vertices)", pass, 0.0,
                                      std::to_string(profiles_checked) + " profiles"));
    }

    // Extension counts for the worked 4-vertex example: the diagonal-free
    // square yields 3, the (0,2)-diagonal square 3, the (1,3)-diagonal 4.
    {
        const std::vector<MultiIndex> path{MultiIndex{{0, 0}}, MultiIndex{{1, 0}},
                                           MultiIndex{{1, 1}}, MultiIndex{{2, 1}}};
        std::map<std::string, std::size_t> got;
        for (const auto& partition : enumerate_partitions(path)) {
            const auto tree = partition_to_tree(partition);
            got[partition.to_string()] = tprime_extensions(tree, path).size();
        }
        const bool pass = got == std::map<std::string, std::size_t>{
                                     {"[0 1 2 3]", 3}, {"[0 2 3][0 1 2]", 3}, {"[0 1 3][1 2 3]", 4}};
        std::string detail;
        for (const auto& [k, v] : got) detail += k + ":" + std::to_string(v) + " ";
        results.push_back(make_result("extension counts of the 4-vertex example (4, 3, 3)", pass,
                                      0.0, detail));
    }

    // Extended-tree totals for |n| = 2: 3 + 2 = 5.
    {
        const std::vector<MultiIndex> path_a{MultiIndex{{0, 0}}, MultiIndex{{1, 0}}, MultiIndex{{1, 1}}};
        const std::vector<MultiIndex> path_b{MultiIndex{{0, 0}}, MultiIndex{{0, 1}}, MultiIndex{{1, 1}}};
        const std::size_t a = enumerate_tprime(path_a).size();
        const std::size_t b = enumerate_tprime(path_b).size();
        results.push_back(make_result("extended trees for n=(1,1): 3 + 2 = 5", a == 3 && b == 2,
                                      0.0, std::to_string(a) + " + " + std::to_string(b)));
    }
    return results;
}

std::vector<CheckResult> verify_equivalence(std::uint64_t seed, int max_order, int draws) {
    std::vector<CheckResult> results;
    std::mt19937_64 rng(seed);
    const auto& cases = cases_q2();
    auto run_order = [&](const TestCase& tc, const MultiIndex& n, double& worst) {
        ImplicitProblem problem = random_problem(tc, n, rng);
        const double recursive = recursive_dd(problem, n);
        const double polygon = polygon_dd(problem, n);
        const double tree = tree_dd(problem, n);
        worst = std::max(worst, relative_deviation({recursive, polygon, tree}));
    };
    for (const MultiIndex& n : orders_q2(2, max_order)) {
        double worst = 0.0;
        for (int draw = 0; draw < draws; ++draw)
            run_order(*cases[static_cast<std::size_t>(draw) % cases.size()], n, worst);
        results.push_back(make_result("three-form equivalence at n=" + n.to_string(),
                                      worst <= 1e-11, worst, "worst " + format_deviation(worst)));
    }
    // q = 3 orders of total degree 3 on the three-variable case.
    for (const MultiIndex& n :
         {MultiIndex{{1, 1, 1}}, MultiIndex{{2, 1, 0}}, MultiIndex{{0, 1, 2}}}) {
        double worst = 0.0;
        for (int draw = 0; draw < std::max(1, draws / 4); ++draw)
            run_order(find_case("sphere3"), n, worst);
        results.push_back(make_result("three-form equivalence at q=3, n=" + n.to_string(),
                                      worst <= 1e-11, worst, "worst " + format_deviation(worst)));
    }
    return results;
}

std::vector<CheckResult> verify_oracle(std::uint64_t seed, int max_order, int draws) {
    std::vector<CheckResult> results;
    std::mt19937_64 rng(seed);
    const auto& cases = cases_q2();
    auto run_order = [&](const TestCase& tc, const MultiIndex& n, double& worst) {
        ImplicitProblem problem = random_problem(tc, n, rng);
        const double reference = direct_dd_y(tc, problem.grid());
        const double recursive = recursive_dd(problem, n);
        const double polygon = polygon_dd(problem, n);
        const double tree = tree_dd(problem, n);
        const double scale = std::max(1.0, std::abs(reference));
        for (double v : {recursive, polygon, tree})
            worst = std::max(worst, std::abs(v - reference) / scale);
    };
    for (const MultiIndex& n : orders_q2(2, max_order)) {
        double worst = 0.0;
        for (int draw = 0; draw < draws; ++draw)
            run_order(*cases[static_cast<std::size_t>(draw) % cases.size()], n, worst);
        results.push_back(make_result("oracle agreement at n=" + n.to_string(), worst <= 1e-7,
                                      worst, "worst " + format_deviation(worst)));
    }
    {
        double worst = 0.0;
        const MultiIndex n{{1, 1, 1}};
        for (int draw = 0; draw < std::max(1, draws / 4); ++draw)
            run_order(find_case("sphere3"), n, worst);
        results.push_back(make_result("oracle agreement at q=3, n=(1,1,1)", worst <= 1e-7, worst,
                                      "worst " + format_deviation(worst)));
    }
    return results;
}

std::vector<CheckResult> verify_coefficients(std::uint64_t seed, int max_order) {
    std::vector<CheckResult> results;

    // Exact coefficient-count identity: the (path, tree) census grouped by
    // star-type multiset equals the partition coefficient, per partition.
    {
        bool pass = true;
        long long partitions_checked = 0;
        std::string mismatch;
        for (const MultiIndex& n : orders_q2(1, max_order)) {
            const auto census = star_type_census(n);
            const auto partitions = enumerate_deriv_partitions(n);
            std::set<DerivPartition> expected(partitions.begin(), partitions.end());
            std::set<DerivPartition> observed;
            for (const auto& [p, count] : census) observed.insert(p);
            if (expected != observed) {
                pass = false;
                mismatch = "partition sets differ at n=" + n.to_string();
                break;
            }
            for (const auto& [p, count] : census) {
                ++partitions_checked;
                const Rational coeff = partition_coefficient(p);
                if (coeff.denominator() != 1 || coeff.numerator() != count) {
                    pass = false;
                    mismatch = "coefficient mismatch at n=" + n.to_string() + " p=" + p.to_string();
                }
            }
        }
        results.push_back(make_result("coefficient-count identity (|n| <= " +
                                          std::to_string(max_order) + ")",
                                      pass, 0.0,
                                      pass ? std::to_string(partitions_checked) + " partitions"
                                           : mismatch));
    }

    // Corollary vs coalesced tree form at random valid points.
    {
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        for (const MultiIndex& n : orders_q2(1, max_order)) {
            for (const TestCase* tc : cases_q2()) {
                ExprProvider provider(tc->g);
                for (int draw = 0; draw < 3; ++draw) {
                    std::vector<double> x;
                    for (const auto& [lo, hi] : tc->box) x.push_back(uniform(rng, lo, hi));
                    const double y = solve_y(provider, x, tc->solve);
                    const double a = derivative_from_partials(provider, x, y, n);
                    const double b = coalesced_tree_form(provider, x, y, n).derivative;
                    worst = std::max(worst, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
                }
            }
        }
        results.push_back(make_result("partition form vs coalesced tree form", worst <= 1e-11, worst,
                                      "worst " + format_deviation(worst)));
    }
    return results;
}

std::vector<CheckResult> verify_fixtures() {
    std::vector<CheckResult> results;
    auto check_lines = [&](const std::string& name, const std::vector<std::string>& got,
                           const std::vector<std::string>& expected) {
        const bool pass = got == expected;
        std::string detail;
        if (!pass) {
            detail = "got " + std::to_string(got.size()) + " lines";
            for (std::size_t i = 0; i < std::min(got.size(), expected.size()); ++i)
                if (got[i] != expected[i]) {
                    detail += "; first mismatch at line " + std::to_string(i + 1) + ": '" +
                              got[i] + "'";
                    break;
                }
        }
        results.push_back(make_result(name, pass, 0.0, detail));
    };
    auto term_strings = [](const MultiIndex& n, TermMode mode) {
        std::vector<std::string> out;
        for (const TermExpr& t : emit_terms(n, mode)) out.push_back(t.to_string());
        return out;
    };

    check_lines("first-order formula", term_strings(MultiIndex{{1, 0}}, TermMode::polygon),
                {"- [0 1;0|(1,0)]g/[0;0|(0,0) (1,0)]g"});

    check_lines(
        "three-term expansion at n=(2,0)", term_strings(MultiIndex{{2, 0}}, TermMode::polygon),
        {"- [0;0|(0,0) (1,0) (2,0)]g/[0;0|(0,0) (2,0)]g * [0 1;0|(1,0)]g/[0;0|(0,0) (1,0)]g * "
         "[1 2;0|(2,0)]g/[1;0|(1,0) (2,0)]g",
         "+ [0 1;0|(1,0) (2,0)]g/[0;0|(0,0) (2,0)]g * [1 2;0|(2,0)]g/[1;0|(1,0) (2,0)]g",
         "- [0 1 2;0|(2,0)]g/[0;0|(0,0) (2,0)]g"});

    check_lines("two curly brackets at n=(1,1)", emit_products(MultiIndex{{1, 1}}),
                {"{(0,0) (1,0) (1,1)}g", "{(0,0) (0,1) (1,1)}g"});

    check_lines("three products per path at n=(3,0)", emit_products(MultiIndex{{3, 0}}),
                {"{(0,0) (1,0) (2,0) (3,0)}g",
                 "{(0,0) (2,0) (3,0)}g * {(0,0) (1,0) (2,0)}g",
                 "{(0,0) (1,0) (3,0)}g * {(1,0) (2,0) (3,0)}g"});

    // |n| = 3 structure: three products per path block, every path present.
    {
        const MultiIndex n{{2, 1}};
        const auto products = emit_products(n);
        const auto paths = enumerate_unit_paths(MultiIndex::zero(2), n);
        const bool pass = products.size() == paths.size() * 3;
        results.push_back(make_result("three products per path at n=(2,1)", pass, 0.0,
                                      std::to_string(products.size()) + " products"));
    }
    {
        const MultiIndex n{{1, 1, 1}};
        const auto products = emit_products(n);
        const bool pass = products.size() == 18;
        results.push_back(make_result("6 paths x 3 products at n=(1,1,1)", pass, 0.0,
                                      std::to_string(products.size()) + " products"));
    }
    {
        const auto terms = term_strings(MultiIndex{{1, 1}}, TermMode::tree);
        results.push_back(make_result("five flattened tree terms at n=(1,1)", terms.size() == 5,
                                      0.0, std::to_string(terms.size()) + " terms"));
    }

    auto partition_strings = [](const MultiIndex& n) {
        std::vector<std::string> out;
        for (const DerivPartition& p : enumerate_deriv_partitions(n)) out.push_back(p.to_string());
        return out;
    };
    check_lines("derivative partitions for n=(1,0)", partition_strings(MultiIndex{{1, 0}}),
                {"{(1,0,0)}"});
    check_lines("derivative partitions for n=(2,0)", partition_strings(MultiIndex{{2, 0}}),
                {"{(2,0,0)}", "{(1,0,0),(1,0,1)}", "{(1,0,0),(1,0,0),(0,0,2)}"});
    check_lines("derivative partitions for n=(1,1)", partition_strings(MultiIndex{{1, 1}}),
                {"{(1,1,0)}", "{(1,0,0),(0,1,1)}", "{(0,1,0),(1,0,1)}",
                 "{(1,0,0),(0,1,0),(0,0,2)}"});

    check_lines("derivative formula y10", {derivative_formula(MultiIndex{{1, 0}})},
                {"y_(1,0) = -g100/g001"});
    check_lines("derivative formula y20", {derivative_formula(MultiIndex{{2, 0}})},
                {"y_(2,0) = -g200/g001 + 2 g100 g101/g001^2 - g100^2 g002/g001^3"});
    check_lines("derivative formula y11", {derivative_formula(MultiIndex{{1, 1}})},
                {"y_(1,1) = -g110/g001 + g100 g011/g001^2 + g010 g101/g001^2 - "
                 "g100 g010 g002/g001^3"});
    return results;
}

std::vector<CheckResult> verify_limit() {
    std::vector<CheckResult> results;
    const TestCase& tc = find_case("sphere");
    ExprProvider provider(tc.g);
    const std::vector<double> x0{0.3, 0.4};
    const double y0 = solve_y(provider, x0, tc.solve);

    auto grid_value = [&](const MultiIndex& n, double h) {
        std::vector<std::vector<double>> axes;
        for (int j = 0; j < 2; ++j) {
            std::vector<double> nodes;
            for (int i = 0; i <= n[j]; ++i)
                nodes.push_back(x0[static_cast<std::size_t>(j)] + i * h);
            axes.push_back(std::move(nodes));
        }
        ImplicitProblem problem = make_problem(tc, Grid(std::move(axes)));
        const double value = n.order() >= 2
                                 ? polygon_dd(problem, n)
                                 : first_order_dd(problem, MultiIndex::zero(2), n[0] == 1 ? 0 : 1);
        return static_cast<double>(coalescence_factor(n)) * value;
    };

    for (const MultiIndex& n : orders_q2(1, 3)) {
        const double exact = derivative_from_partials(provider, x0, y0, n);
        const double scale = std::max(1.0, std::abs(exact));
        const double err_fine = std::abs(grid_value(n, 1e-3) - exact);
        const double err_coarse = std::abs(grid_value(n, 1e-2) - exact);
        const bool close = err_fine <= 1e-2 * scale;
        const double ratio = err_fine > 0 ? err_coarse / err_fine : 10.0;
        const bool linear = ratio >= 3.0 && ratio <= 30.0;
        results.push_back(make_result(
            "shrinking-grid limit at n=" + n.to_string(), close && linear, err_fine / scale,
            "relative error " + format_deviation(err_fine / scale) + ", decade ratio " +
                format_deviation(ratio)));
    }
    return results;
}

} // namespace impdiff
