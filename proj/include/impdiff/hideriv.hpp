#pragma once

// Higher partial derivatives of the implicit function from partials of g:
// the multiset-partition closed form with exact rational coefficients, and
// the coalesced tree form whose term census cross-checks the coefficients.

#include <boost/rational.hpp>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "impdiff/ddcore.hpp"
#include "impdiff/mindex.hpp"

namespace impdiff {

using Rational = boost::rational<long long>;

// A multiset of nonzero derivative orders (s, t), with (0, 1) excluded,
// summing to (n, |p| - 1). Elements are kept in canonical order:
// t ascending, then s by descending lex; multiplicities are explicit.
struct DerivPartition {
    std::vector<std::pair<MultiIndex, int>> elements;

    int size() const { return static_cast<int>(elements.size()); } // |p|
    void normalize();
    // Multiplicity of each distinct element, in canonical order.
    std::vector<int> multiplicities() const;

    std::string to_string() const; // "{(1,0,0),(0,1,1)}"
    bool operator==(const DerivPartition&) const = default;
};

bool deriv_element_less(const std::pair<MultiIndex, int>& a, const std::pair<MultiIndex, int>& b);
bool operator<(const DerivPartition& a, const DerivPartition& b);

// All derivative partitions for n, canonically ordered (|p| ascending, then
// elementwise). Finiteness is structural: |p| <= 2|n| - 1.
std::vector<DerivPartition> enumerate_deriv_partitions(const MultiIndex& n);

// (1/|p|) * multinomial(|p|; multiplicities) as an exact rational. Equals
// the number of plane trees formable from stars of the element types, so it
// is a positive integer for every valid partition.
Rational partition_coefficient(const DerivPartition& p);

// y_n(x) from partials of g at one point:
// y_n = n! * sum_p coeff(p) * prod_{(s,t) in p} (-g_{s,t} / (s! t! g_{0,1})).
double derivative_from_partials(const GProvider& g, std::span<const double> x, double y,
                            const MultiIndex& n);

struct CoalescedTerm {
    DerivPartition star_types; // multiset of star types of one (path, tree) term
    double value;
};

struct CoalescedTreeResult {
    double derivative;                 // y_n (already scaled by n!)
    std::vector<CoalescedTerm> terms;  // one per (path, extended tree)
};

// The tree form after coalescing the grid to one point: per star the factor
// -g_{s,t} / (s! t! g_{0,1}). Sums to the same value as the partition form.
CoalescedTreeResult coalesced_tree_form(const GProvider& g, std::span<const double> x, double y,
                                        const MultiIndex& n);

// Number of (unit path, extended tree) pairs per star-type multiset; the
// exact-integer counterpart of partition_coefficient.
std::map<DerivPartition, long long> star_type_census(const MultiIndex& n);

// Collected symbolic formula, e.g.
// "y_(2,0) = -g200/g001 + 2 g100 g101/g001^2 - g100^2 g002/g001^3".
std::string derivative_formula(const MultiIndex& n);

} // namespace impdiff
