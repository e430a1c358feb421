#pragma once

// Multi-indices under the componentwise partial order, strictly increasing
// lattice paths between them, and the axis-ordered prefix tuples (s, t)
// attached to a path.

#include <optional>
#include <string>
#include <vector>

#include "impdiff/errors.hpp"

namespace impdiff {

class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> coords);

    static MultiIndex zero(int dim);
    static MultiIndex unit(int dim, int axis); // standard basis vector e_{axis+1}

    int dim() const { return static_cast<int>(coords_.size()); }
    int operator[](int axis) const { return coords_[static_cast<std::size_t>(axis)]; }
    const std::vector<int>& coords() const { return coords_; }

    int order() const; // |a| = sum of coordinates
    bool is_zero() const;
    // Axis r if this equals e_{r+1}, nullopt otherwise.
    std::optional<int> unit_axis() const;

    std::string to_string() const; // "(1,0)"

    friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
    // Componentwise difference; requires b <= a.
    friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);
    bool operator==(const MultiIndex&) const = default;

private:
    std::vector<int> coords_;
};

// a_j <= b_j for all j. Dimension mismatch is a hard error, never a broadcast.
bool partial_leq(const MultiIndex& a, const MultiIndex& b);
// a <= b and a != b.
bool partial_less(const MultiIndex& a, const MultiIndex& b);

// Total order for containers and deterministic listings: dimension, then
// lexicographic on coordinates. Unrelated to the domain partial order.
bool lex_less(const MultiIndex& a, const MultiIndex& b);

struct MultiIndexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const { return lex_less(a, b); }
};

// A strictly increasing sequence of multi-indices.
class LatticePath {
public:
    explicit LatticePath(std::vector<MultiIndex> points);

    int length() const { return static_cast<int>(points_.size()) - 1; } // number of steps k
    int dim() const { return points_.front().dim(); }
    const MultiIndex& operator[](int i) const { return points_[static_cast<std::size_t>(i)]; }
    const std::vector<MultiIndex>& points() const { return points_; }
    MultiIndex step(int j) const { return points_[static_cast<std::size_t>(j)] - points_[static_cast<std::size_t>(j) - 1]; }

    // True iff every step is a standard basis vector; then length() == |last - first|.
    bool is_unit_step() const;

    std::string to_string() const; // "(0,0) (1,0) (1,1)"
    bool operator==(const LatticePath&) const = default;

private:
    std::vector<MultiIndex> points_;
};

// A tuple (s, t) with s_1 + ... + s_q + t = k, recording that a path starts
// with s_1 steps of e_1, then s_2 steps of e_2, ..., then t arbitrary steps.
// Star types reuse the same shape: s leaf steps per axis, then t nonleaves.
struct CompatibleTuple {
    MultiIndex prefix; // s
    int tail = 0;      // t

    int total() const { return prefix.order() + tail; } // k
    std::string to_string() const;                      // "(1,0,1)" = (s_1,...,s_q,t)
    bool operator==(const CompatibleTuple&) const = default;
};

// All monotone unit-step paths from `from` to `to`, ordered lexicographically
// by their step-axis sequences; there are multinomial(|to-from|; to-from) of them.
std::vector<LatticePath> enumerate_unit_paths(const MultiIndex& from, const MultiIndex& to);

// All strictly increasing sequences of k+1 multi-indices from `from` to `to`,
// in lexicographic order of the intermediate points.
std::vector<LatticePath> enumerate_increasing_paths(const MultiIndex& from, const MultiIndex& to, int k);

// All tuples (s, t) compatible with the path, ordered by decreasing t.
// (0, k) is always present.
std::vector<CompatibleTuple> compatible_tuples(const LatticePath& path);

} // namespace impdiff
