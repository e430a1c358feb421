#pragma once

// Polygon partitions by noncrossing diagonals, plane trees without unary
// internal vertices, the explicit bijection between the two, star typing,
// and the extended tree family indexing the flattened closed form.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "impdiff/mindex.hpp"

namespace impdiff {

// A dissection of the convex polygon with vertices 0..vertex_count-1.
// Faces are stored root-first in construction order: the face containing the
// closing edge (0, vertex_count-1) comes first, then the faces of each gap,
// depth-first left to right. Each face is an increasing position sequence of
// length >= 3.
struct PolygonPartition {
    int vertex_count = 0;
    std::vector<std::vector<int>> faces;

    bool operator==(const PolygonPartition&) const = default;
    std::string to_string() const; // "[0 2 3][0 1 2]"
};

// Throws InvalidArgument when the face set is malformed (a face of size < 3,
// an edge with the wrong multiplicity, vertices out of range, ...).
void validate_partition(const PolygonPartition& partition);

// One node of a plane tree over polygon positions. A node with no children
// and pending == false is a leaf with label {a, a+1}; a nonleaf's label
// lists its children's shared endpoints. `pending` marks a nonleaf whose
// subtree is not materialized (used by the star-local extension view).
struct TreeNode {
    std::vector<TreeNode> children;
    std::vector<int> label;
    bool pending = false;

    bool is_leaf() const { return children.empty() && !pending; }
    int lo() const { return label.front(); }
    int hi() const { return label.back(); }
    bool operator==(const TreeNode&) const = default;
};

struct PlaneTree {
    TreeNode root;

    bool operator==(const PlaneTree&) const = default;
    std::string to_string() const; // "(0 1 2: (0 1) (1 2))"
};

// A nonleaf vertex together with its ordered children, remembering which
// children are leaves.
struct Star {
    std::vector<int> root_label;
    std::vector<bool> child_is_leaf;
};

Star star_of(const TreeNode& node);

// All dissections of the polygon on the given vertices (>= 3), including the
// diagonal-free one. Order is deterministic: for each root face the interior
// vertex subsets are visited largest first, then by descending positions, and
// gaps recurse left to right; this lists the diagonal-free partition first.
std::vector<PolygonPartition> enumerate_partitions(int vertex_count);
std::vector<PolygonPartition> enumerate_partitions(const std::vector<MultiIndex>& vertices);

// The bijection between dissections and plane trees whose internal vertices
// all have >= 2 children. Round-trips are identities in both directions.
PlaneTree partition_to_tree(const PolygonPartition& partition);
PolygonPartition tree_to_partition(const PlaneTree& tree);

// Bijective image of enumerate_partitions, in the same order.
std::vector<PlaneTree> enumerate_trees(int vertex_count);
std::vector<PlaneTree> enumerate_trees(const std::vector<MultiIndex>& vertices);

// The unique type (s, t) of a star: s_1 leaf children stepping e_1, ...,
// s_q leaf children stepping e_q, then t nonleaf children, then nothing.
// Absent when the children do not match that pattern.
std::optional<CompatibleTuple> star_type(const Star& star, const std::vector<MultiIndex>& vertices);

// Extends a star for a compatible tuple (s, t): every *leaf* among the final
// t children gains an inserted parent vertex (a unary nonleaf over the leaf);
// nonleaf children stay as pending stubs. If t covers no leaves the star is
// returned unchanged. Throws InvalidArgument when (s, t) is not compatible
// with the root label path or a prefix child is not a leaf.
PlaneTree extend_star(const Star& star, const CompatibleTuple& tuple,
                      const std::vector<MultiIndex>& vertices);

// All plane trees with leaf labels (p_0,p_1),...,(p_{n-1},p_n) in which every
// star has a type and no star has type (0, 1). Generated by extending each
// tree of enumerate_trees star by star; per-tree extension counts multiply.
std::vector<PlaneTree> enumerate_tprime(const std::vector<MultiIndex>& vertices);

// Extensions of a single base tree; enumerate_tprime concatenates these.
std::vector<PlaneTree> tprime_extensions(const PlaneTree& tree, const std::vector<MultiIndex>& vertices);

// Recognitive counterpart of enumerate_tprime: checks leaf labels, that every
// star is typed, and that no star has type (0, 1).
bool is_valid_tprime(const PlaneTree& tree, const std::vector<MultiIndex>& vertices);

// All stars of a tree in depth-first order (root first).
std::vector<Star> stars_of(const PlaneTree& tree);

// Number of plane trees with degree_counts[d] vertices of out-degree d:
// multinomial(m; r_0, r_1, ...) / m with m the total vertex count.
// Throws InvalidArgument when the degree sequence cannot form a tree.
long long count_trees_by_outdegree(const std::vector<long long>& degree_counts);

} // namespace impdiff
