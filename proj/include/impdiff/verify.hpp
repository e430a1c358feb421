#pragma once

// Verification sweeps shared by the `verify` CLI command and the acceptance
// suite: combinatorial count checks, the three-form equivalence sweep, the
// oracle comparison sweep, the coefficient identities, the symbolic
// fixtures, and the shrinking-grid limit.

#include <cstdint>
#include <string>
#include <vector>

namespace impdiff {

struct CheckResult {
    std::string name;
    bool pass = false;
    double worst = 0.0; // largest deviation seen (0 for exact checks)
    std::string detail;
};

// Partition counts (1, 3, 11, 45 against a brute-force dissection census),
// the tree-count formula against exhaustive enumeration up to 8 vertices,
// the extension counts of the worked 4-vertex example (4, 3, 3), and the
// extended-tree totals for |n| = 2 (3 + 2 = 5).
std::vector<CheckResult> verify_counts();

// q = 2 sweep over 2 <= |n| <= max_order with `draws` random problems per n:
// the recursive, polygon, and tree forms must agree pairwise within
// 1e-11 * max(1, |value|).
std::vector<CheckResult> verify_equivalence(std::uint64_t seed, int max_order = 4, int draws = 20);

// Same sweep, each form against the divided difference of the solved y
// samples within 1e-7 * max(1, |value|); plus q = 3, n = (1,1,1).
std::vector<CheckResult> verify_oracle(std::uint64_t seed, int max_order = 4, int draws = 20);

// For every q = 2 order with |n| <= max_order: the (path, tree) census per
// star-type multiset equals the partition coefficient exactly (integers),
// and the partition form matches the coalesced tree form within
// 1e-11 * max(1, |value|) at random valid points.
std::vector<CheckResult> verify_coefficients(std::uint64_t seed, int max_order = 4);

// Symbolic fixtures pinned from the worked formulas: the first-order term,
// the three- and two-term expansions at |n| = 2, the product structure at
// |n| = 3, the derivative partition lists, and the collected derivative
// formulas for y10, y20, y11.
std::vector<CheckResult> verify_fixtures();

// Shrinking-grid limit on the sphere case at x0 = (0.3, 0.4): the closed
// form on the grid x0 + j*h, scaled by n!, matches the derivative within
// 1e-2 relative at h = 1e-3, with the error shrinking roughly linearly
// between h = 1e-2 and h = 1e-3, for every |n| <= 3.
std::vector<CheckResult> verify_limit();

} // namespace impdiff
