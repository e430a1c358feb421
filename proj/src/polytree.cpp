#include "impdiff/polytree.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "impdiff/util.hpp"

namespace impdiff {

std::string PolygonPartition::to_string() const {
    std::string s;
    for (const auto& face : faces) {
        s += "[";
        for (std::size_t i = 0; i < face.size(); ++i) {
            if (i > 0) s += " ";
            s += std::to_string(face[i]);
        }
        s += "]";
    }
    return s;
}

void validate_partition(const PolygonPartition& partition) {
    const int n = partition.vertex_count - 1;
    if (n < 2) throw InvalidArgument("partition: needs at least 3 vertices");
    if (partition.faces.empty()) throw InvalidArgument("partition: no faces");
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& face : partition.faces) {
        if (face.size() < 3)
            throw InvalidArgument("partition: face with fewer than 3 vertices");
        for (std::size_t i = 0; i < face.size(); ++i) {
            if (face[i] < 0 || face[i] > n)
                throw InvalidArgument("partition: face vertex out of range");
            if (i > 0 && face[i] <= face[i - 1])
                throw InvalidArgument("partition: face positions must increase");
        }
        for (std::size_t i = 1; i < face.size(); ++i)
            ++edge_count[{face[i - 1], face[i]}];
        ++edge_count[{face.front(), face.back()}];
    }
    int inner = 0;
    for (const auto& [edge, count] : edge_count) {
        const bool outer = (edge.second == edge.first + 1) || (edge.first == 0 && edge.second == n);
        if (outer && count != 1)
            throw InvalidArgument("partition: outer edge covered " + std::to_string(count) + " times");
        if (!outer) {
            if (count != 2)
                throw InvalidArgument("partition: inner edge covered " + std::to_string(count) + " times");
            ++inner;
        }
    }
    for (int i = 0; i < n; ++i)
        if (!edge_count.count({i, i + 1}))
            throw InvalidArgument("partition: missing outer edge (" + std::to_string(i) + "," +
                                  std::to_string(i + 1) + ")");
    if (!edge_count.count({0, n}))
        throw InvalidArgument("partition: missing closing edge");
    if (static_cast<int>(partition.faces.size()) != inner + 1)
        throw InvalidArgument("partition: face count does not match diagonal count");
}

namespace {

// Interior-vertex subsets for a root face, largest first, then by descending
// positions. This lists the diagonal-free partition first and reproduces the
// root-face-then-gaps product order of the worked three-product formulas.
std::vector<std::vector<int>> root_face_subsets(int lo, int hi) {
    std::vector<int> interior;
    for (int v = lo + 1; v < hi; ++v) interior.push_back(v);
    const int m = static_cast<int>(interior.size());
    std::vector<std::vector<int>> subsets;
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) s.push_back(interior[static_cast<std::size_t>(i)]);
        subsets.push_back(std::move(s));
    }
    std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
    });
    return subsets;
}

// All dissections of the sub-polygon on positions lo..hi (hi - lo >= 2),
// each as a root-first face list.
std::vector<std::vector<std::vector<int>>> dissect(int lo, int hi) {
    std::vector<std::vector<std::vector<int>>> out;
    for (const auto& subset : root_face_subsets(lo, hi)) {
        std::vector<int> face{lo};
        face.insert(face.end(), subset.begin(), subset.end());
        face.push_back(hi);
        // Per-gap alternatives; gaps of width 1 are outer edges.
        std::vector<std::vector<std::vector<std::vector<int>>>> gap_options;
        for (std::size_t i = 1; i < face.size(); ++i)
            if (face[i] - face[i - 1] >= 2)
                gap_options.push_back(dissect(face[i - 1], face[i]));
        std::vector<std::size_t> pick(gap_options.size(), 0);
        while (true) {
            std::vector<std::vector<int>> faces{face};
            for (std::size_t g = 0; g < gap_options.size(); ++g) {
                const auto& sub = gap_options[g][pick[g]];
                faces.insert(faces.end(), sub.begin(), sub.end());
            }
            out.push_back(std::move(faces));
            // Odometer, rightmost gap fastest.
            std::size_t g = gap_options.size();
            while (g > 0 && ++pick[g - 1] == gap_options[g - 1].size()) pick[--g] = 0;
            if (g == 0) break;
        }
    }
    return out;
}

} // namespace

std::vector<PolygonPartition> enumerate_partitions(int vertex_count) {
    if (vertex_count < 3)
        throw InvalidArgument("enumerate_partitions: needs at least 3 vertices");
    std::vector<PolygonPartition> out;
    for (auto& faces : dissect(0, vertex_count - 1))
        out.push_back(PolygonPartition{vertex_count, std::move(faces)});
    return out;
}

std::vector<PolygonPartition> enumerate_partitions(const std::vector<MultiIndex>& vertices) {
    return enumerate_partitions(static_cast<int>(vertices.size()));
}

std::string PlaneTree::to_string() const {
    std::function<std::string(const TreeNode&)> render = [&](const TreeNode& node) {
        std::string s = "(";
        for (std::size_t i = 0; i < node.label.size(); ++i) {
            if (i > 0) s += " ";
            s += std::to_string(node.label[i]);
        }
        if (node.pending) {
            s += ": ?";
        } else if (!node.is_leaf()) {
            s += ":";
            for (const auto& child : node.children) s += " " + render(child);
        }
        return s + ")";
    };
    return render(root);
}

Star star_of(const TreeNode& node) {
    if (node.is_leaf() || node.pending)
        throw InvalidArgument("star_of: node is not a materialized nonleaf");
    if (node.label.size() != node.children.size() + 1)
        throw InvalidArgument("star_of: label does not match child count");
    Star star;
    star.root_label = node.label;
    for (const auto& child : node.children) star.child_is_leaf.push_back(child.is_leaf());
    return star;
}

PlaneTree partition_to_tree(const PolygonPartition& partition) {
    validate_partition(partition);
    std::map<std::pair<int, int>, const std::vector<int>*> by_span;
    for (const auto& face : partition.faces) {
        auto [it, inserted] = by_span.insert({{face.front(), face.back()}, &face});
        if (!inserted) throw InvalidArgument("partition: two faces share a closing edge");
    }
    std::function<TreeNode(int, int)> build = [&](int lo, int hi) {
        auto it = by_span.find({lo, hi});
        if (it == by_span.end())
            throw InvalidArgument("partition: no face closes the edge (" + std::to_string(lo) +
                                  "," + std::to_string(hi) + ")");
        const std::vector<int>& face = *it->second;
        TreeNode node;
        node.label = face;
        for (std::size_t i = 1; i < face.size(); ++i) {
            if (face[i] == face[i - 1] + 1)
                node.children.push_back(TreeNode{{}, {face[i - 1], face[i]}, false});
            else
                node.children.push_back(build(face[i - 1], face[i]));
        }
        return node;
    };
    return PlaneTree{build(0, partition.vertex_count - 1)};
}

PolygonPartition tree_to_partition(const PlaneTree& tree) {
    // Labels are recomputed from the shape: leaves take (0,1),(1,2),... in
    // depth-first order and each nonleaf takes its children's endpoints.
    int next_leaf = 0;
    std::vector<std::vector<int>> faces;
    std::function<std::pair<int, int>(const TreeNode&)> walk =
        [&](const TreeNode& node) -> std::pair<int, int> {
        if (node.pending)
            throw InvalidArgument("tree_to_partition: tree has pending subtree slots");
        if (node.is_leaf()) {
            int lo = next_leaf++;
            return {lo, lo + 1};
        }
        if (node.children.size() < 2)
            throw InvalidArgument("tree_to_partition: tree has a unary nonleaf");
        const std::size_t slot = faces.size(); // preorder position of this face
        faces.emplace_back();
        std::vector<int> label;
        for (const auto& child : node.children) {
            auto [lo, hi] = walk(child);
            if (label.empty()) label.push_back(lo);
            label.push_back(hi);
        }
        faces[slot] = std::move(label);
        return {faces[slot].front(), faces[slot].back()};
    };
    walk(tree.root);
    PolygonPartition partition{next_leaf + 1, std::move(faces)};
    validate_partition(partition);
    return partition;
}

std::vector<PlaneTree> enumerate_trees(int vertex_count) {
    std::vector<PlaneTree> out;
    for (const auto& partition : enumerate_partitions(vertex_count))
        out.push_back(partition_to_tree(partition));
    return out;
}

std::vector<PlaneTree> enumerate_trees(const std::vector<MultiIndex>& vertices) {
    return enumerate_trees(static_cast<int>(vertices.size()));
}

static MultiIndex child_step(const Star& star, std::size_t j, const std::vector<MultiIndex>& vertices) {
    const int a = star.root_label[j];
    const int b = star.root_label[j + 1];
    return vertices[static_cast<std::size_t>(b)] - vertices[static_cast<std::size_t>(a)];
}

std::optional<CompatibleTuple> star_type(const Star& star, const std::vector<MultiIndex>& vertices) {
    const int q = vertices.front().dim();
    const std::size_t m = star.child_is_leaf.size();
    if (star.root_label.size() != m + 1)
        throw InvalidArgument("star_type: label does not match child count");
    std::vector<int> s(static_cast<std::size_t>(q), 0);
    std::size_t idx = 0;
    for (int axis = 0; axis < q; ++axis) {
        while (idx < m && star.child_is_leaf[idx] &&
               child_step(star, idx, vertices) == MultiIndex::unit(q, axis)) {
            ++s[static_cast<std::size_t>(axis)];
            ++idx;
        }
    }
    for (std::size_t j = idx; j < m; ++j)
        if (star.child_is_leaf[j]) return std::nullopt; // a leaf after the typed prefix
    return CompatibleTuple{MultiIndex(std::move(s)), static_cast<int>(m - idx)};
}

PlaneTree extend_star(const Star& star, const CompatibleTuple& tuple,
                      const std::vector<MultiIndex>& vertices) {
    const int q = vertices.front().dim();
    const std::size_t m = star.child_is_leaf.size();
    if (tuple.total() != static_cast<int>(m))
        throw InvalidArgument("extend_star: tuple does not sum to the child count");
    std::size_t idx = 0;
    for (int axis = 0; axis < q; ++axis) {
        for (int i = 0; i < tuple.prefix[axis]; ++i, ++idx) {
            if (!star.child_is_leaf[idx] ||
                child_step(star, idx, vertices) != MultiIndex::unit(q, axis))
                throw InvalidArgument("extend_star: tuple " + tuple.to_string() +
                                      " is not compatible with the star");
        }
    }
    TreeNode root;
    root.label = star.root_label;
    for (std::size_t j = 0; j < m; ++j) {
        TreeNode child;
        child.label = {star.root_label[j], star.root_label[j + 1]};
        if (j < idx) {
            root.children.push_back(std::move(child)); // typed prefix leaf
        } else if (star.child_is_leaf[j]) {
            TreeNode inserted;
            inserted.label = child.label;
            inserted.children.push_back(std::move(child));
            root.children.push_back(std::move(inserted));
        } else {
            child.pending = true; // nonleaf stub, subtree lives in the enclosing tree
            root.children.push_back(std::move(child));
        }
    }
    return PlaneTree{std::move(root)};
}

std::vector<PlaneTree> tprime_extensions(const PlaneTree& tree, const std::vector<MultiIndex>& vertices) {
    // Tuple alternatives per star, in depth-first star order.
    std::vector<std::vector<CompatibleTuple>> options;
    std::function<void(const TreeNode&)> collect = [&](const TreeNode& node) {
        if (node.is_leaf()) return;
        std::vector<MultiIndex> pts;
        for (int pos : node.label) pts.push_back(vertices[static_cast<std::size_t>(pos)]);
        options.push_back(compatible_tuples(LatticePath(std::move(pts))));
        for (const auto& child : node.children) collect(child);
    };
    collect(tree.root);

    std::vector<PlaneTree> out;
    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
        std::size_t next_star = 0;
        std::function<TreeNode(const TreeNode&)> rebuild = [&](const TreeNode& node) -> TreeNode {
            if (node.is_leaf()) return node;
            const CompatibleTuple& tuple = options[next_star][pick[next_star]];
            ++next_star;
            const std::size_t prefix_len = static_cast<std::size_t>(tuple.prefix.order());
            TreeNode result;
            result.label = node.label;
            for (std::size_t j = 0; j < node.children.size(); ++j) {
                const TreeNode& child = node.children[j];
                if (j < prefix_len) {
                    result.children.push_back(child);
                } else if (child.is_leaf()) {
                    TreeNode inserted;
                    inserted.label = child.label;
                    inserted.children.push_back(child);
                    result.children.push_back(std::move(inserted));
                } else {
                    result.children.push_back(rebuild(child));
                }
            }
            return result;
        };
        out.push_back(PlaneTree{rebuild(tree.root)});
        std::size_t i = options.size();
        while (i > 0 && ++pick[i - 1] == options[i - 1].size()) pick[--i] = 0;
        if (i == 0) break;
    }
    return out;
}

std::vector<PlaneTree> enumerate_tprime(const std::vector<MultiIndex>& vertices) {
    if (vertices.size() < 2)
        throw InvalidArgument("enumerate_tprime: needs at least 2 path vertices");
    if (vertices.size() == 2) {
        // Degenerate single-edge path: the one-leaf star, present only when
        // the step is a basis vector (type (e_r, 0)).
        const MultiIndex step = vertices[1] - vertices[0];
        if (!step.unit_axis()) return {};
        TreeNode leaf{{}, {0, 1}, false};
        TreeNode root;
        root.label = {0, 1};
        root.children.push_back(std::move(leaf));
        return {PlaneTree{std::move(root)}};
    }
    std::vector<PlaneTree> out;
    for (const auto& tree : enumerate_trees(vertices))
        for (auto& extended : tprime_extensions(tree, vertices))
            out.push_back(std::move(extended));
    return out;
}

std::vector<Star> stars_of(const PlaneTree& tree) {
    std::vector<Star> out;
    std::function<void(const TreeNode&)> walk = [&](const TreeNode& node) {
        if (node.is_leaf() || node.pending) return;
        out.push_back(star_of(node));
        for (const auto& child : node.children) walk(child);
    };
    walk(tree.root);
    return out;
}

bool is_valid_tprime(const PlaneTree& tree, const std::vector<MultiIndex>& vertices) {
    const int q = vertices.front().dim();
    int next_leaf = 0;
    bool ok = true;
    std::function<std::pair<int, int>(const TreeNode&)> walk =
        [&](const TreeNode& node) -> std::pair<int, int> {
        if (!ok) return {0, 0};
        if (node.pending) {
            ok = false;
            return {0, 0};
        }
        if (node.is_leaf()) {
            int lo = next_leaf++;
            if (node.label != std::vector<int>{lo, lo + 1}) ok = false;
            return {lo, lo + 1};
        }
        std::vector<int> label;
        for (const auto& child : node.children) {
            auto [lo, hi] = walk(child);
            if (!ok) return {0, 0};
            if (label.empty())
                label.push_back(lo);
            else if (label.back() != lo)
                ok = false;
            label.push_back(hi);
        }
        if (node.label != label) ok = false;
        auto type = star_type(star_of(node), vertices);
        if (!type || (type->prefix.is_zero() && type->tail == 1)) ok = false;
        return {label.front(), label.back()};
    };
    auto [lo, hi] = walk(tree.root);
    if (!ok) return false;
    return lo == 0 && hi == static_cast<int>(vertices.size()) - 1 && q >= 1;
}

long long count_trees_by_outdegree(const std::vector<long long>& degree_counts) {
    if (degree_counts.empty() || degree_counts[0] < 1)
        throw InvalidArgument("count_trees_by_outdegree: need at least one leaf");
    long long vertices = 0;
    long long edges = 0;
    for (std::size_t d = 0; d < degree_counts.size(); ++d) {
        if (degree_counts[d] < 0)
            throw InvalidArgument("count_trees_by_outdegree: negative count");
        vertices += degree_counts[d];
        edges += static_cast<long long>(d) * degree_counts[d];
    }
    if (edges != vertices - 1)
        throw InvalidArgument("count_trees_by_outdegree: degree sequence violates edge balance");
    std::vector<int> parts;
    for (long long c : degree_counts) parts.push_back(static_cast<int>(c));
    const long long words = multinomial(parts);
    // The cycle lemma makes this exact: every multiset word has exactly one
    // rotation that encodes a tree, and all rotations are distinct.
    if (words % vertices != 0)
        throw InvalidArgument("count_trees_by_outdegree: internal divisibility failure");
    return words / vertices;
}

} // namespace impdiff
