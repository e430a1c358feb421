// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here and in the verify module.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "impdiff/hideriv.hpp"
#include "impdiff/implicit.hpp"
#include "impdiff/verify.hpp"

using namespace impdiff;

namespace {

constexpr std::uint64_t kSeed = 20240817;

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
}

// Aggregates a suite of checks into one criterion line.
void report_suite(int criterion, const std::string& name, const std::vector<CheckResult>& results,
                  const std::string& extra = "") {
    bool pass = true;
    double worst = 0.0;
    std::string first_failure;
    for (const CheckResult& r : results) {
        if (!r.pass && first_failure.empty()) first_failure = r.name;
        pass = pass && r.pass;
        worst = std::max(worst, r.worst);
    }
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer), "%zu checks, worst deviation %.3e%s%s",
                  results.size(), worst, extra.empty() ? "" : ", ", extra.c_str());
    const std::string detail = pass ? std::string(buffer) : "first failing check: " + first_failure;
    report(criterion, name, pass, detail);
}

std::vector<std::string> file_lines(const std::string& name) {
    std::ifstream in(std::string(IMPDIFF_GOLDEN_DIR) + "/" + name);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

bool lines_match(const std::string& file, const std::vector<std::string>& got,
                 std::string& detail) {
    const auto expected = file_lines(file);
    if (expected.empty()) {
        detail = file + " missing or empty";
        return false;
    }
    if (expected != got) {
        detail = file + " differs";
        return false;
    }
    return true;
}

} // namespace

int main() {
    using clock = std::chrono::steady_clock;

    // 1. Three-form equivalence, q = 2, 2 <= |n| <= 4, 20 random draws per
    //    order, pairwise within 1e-11 relative, under 60 s.
    {
        const auto start = clock::now();
        const auto results = verify_equivalence(kSeed, 4, 20);
        const double seconds =
            std::chrono::duration_cast<std::chrono::duration<double>>(clock::now() - start)
                .count();
        char timing[48];
        std::snprintf(timing, sizeof(timing), "%.1f s", seconds);
        bool pass = seconds < 60.0;
        for (const CheckResult& r : results) pass = pass && r.pass;
        double worst = 0.0;
        for (const CheckResult& r : results) worst = std::max(worst, r.worst);
        char detail[160];
        std::snprintf(detail, sizeof(detail), "%zu orders, worst deviation %.3e, %s",
                      results.size(), worst, timing);
        report(1, "three-form equivalence", pass, detail);
    }

    // 2. Oracle agreement within 1e-7 relative, plus q = 3, n = (1,1,1).
    report_suite(2, "oracle agreement", verify_oracle(kSeed, 4, 20));

    // 3. Symbolic outputs reproduce the worked formulas as golden-file
    //    matches.
    {
        bool pass = true;
        std::string detail = "9 golden files";
        auto require = [&](const std::string& file, const std::vector<std::string>& got) {
            std::string why;
            if (!lines_match(file, got, why)) {
                pass = false;
                detail = why;
            }
        };
        auto terms = [](const MultiIndex& n, TermMode mode) {
            std::vector<std::string> out;
            for (const TermExpr& t : emit_terms(n, mode)) out.push_back(t.to_string());
            return out;
        };
        require("first_order_terms.txt", terms(MultiIndex{{1, 0}}, TermMode::polygon));
        require("dd20_terms.txt", terms(MultiIndex{{2, 0}}, TermMode::polygon));
        require("dd11_products.txt", emit_products(MultiIndex{{1, 1}}));
        require("dd30_products.txt", emit_products(MultiIndex{{3, 0}}));
        require("dd21_products.txt", emit_products(MultiIndex{{2, 1}}));
        require("dd111_products.txt", emit_products(MultiIndex{{1, 1, 1}}));
        require("deriv_y10.txt", {derivative_formula(MultiIndex{{1, 0}})});
        require("deriv_y20.txt", {derivative_formula(MultiIndex{{2, 0}})});
        require("deriv_y11.txt", {derivative_formula(MultiIndex{{1, 1}})});
        // The in-code fixture suite must agree as well.
        for (const CheckResult& r : verify_fixtures())
            if (!r.pass) {
                pass = false;
                detail = "fixture check failed: " + r.name;
            }
        report(3, "paper fixtures", pass, detail);
    }

    // 4. Combinatorial counts: 1, 3, 11, 45; the tree-count formula up to 8
    //    vertices; the worked extension counts 4, 3, 3; the 5 trees at (1,1).
    report_suite(4, "combinatorial counts", verify_counts());

    // 5. Coefficient identity: exact census equality for |n| <= 4 and the
    //    partition form vs the coalesced tree form within 1e-11 relative.
    report_suite(5, "coefficient identity", verify_coefficients(kSeed, 4));

    // 6. The derivative-partition lists for n = (1,0), (2,0), (1,1).
    {
        std::vector<std::string> got;
        for (const MultiIndex& n : {MultiIndex{{1, 0}}, MultiIndex{{2, 0}}, MultiIndex{{1, 1}}}) {
            got.push_back("n=" + n.to_string());
            for (const DerivPartition& p : enumerate_deriv_partitions(n))
                got.push_back(p.to_string());
        }
        std::string why = "1 + 3 + 4 partitions";
        const bool pass = lines_match("deriv_partition_lists.txt", got, why);
        report(6, "derivative-partition lists", pass, why);
    }

    // 7. Limit consistency: the closed form on shrinking grids approaches
    //    the derivative, error within 1e-2 relative at h = 1e-3 and
    //    shrinking roughly linearly per decade.
    report_suite(7, "limit consistency", verify_limit());

    if (failures == 0)
        std::printf("all %d criteria passed\n", 7);
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures;
}
