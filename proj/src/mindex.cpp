#include "impdiff/mindex.hpp"

#include <algorithm>
#include <functional>

namespace impdiff {

MultiIndex::MultiIndex(std::vector<int> coords) : coords_(std::move(coords)) {
    if (coords_.empty())
        throw InvalidArgument("MultiIndex: dimension must be >= 1");
    for (int c : coords_)
        if (c < 0)
            throw InvalidArgument("MultiIndex: coordinates must be nonnegative");
}

MultiIndex MultiIndex::zero(int dim) {
    return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0));
}

MultiIndex MultiIndex::unit(int dim, int axis) {
    if (axis < 0 || axis >= dim)
        throw InvalidArgument("MultiIndex::unit: axis out of range");
    std::vector<int> c(static_cast<std::size_t>(dim), 0);
    c[static_cast<std::size_t>(axis)] = 1;
    return MultiIndex(std::move(c));
}

int MultiIndex::order() const {
    int s = 0;
    for (int c : coords_) s += c;
    return s;
}

bool MultiIndex::is_zero() const { return order() == 0; }

std::optional<int> MultiIndex::unit_axis() const {
    int axis = -1;
    for (int j = 0; j < dim(); ++j) {
        if (coords_[static_cast<std::size_t>(j)] == 0) continue;
        if (coords_[static_cast<std::size_t>(j)] > 1 || axis >= 0) return std::nullopt;
        axis = j;
    }
    if (axis < 0) return std::nullopt;
    return axis;
}

std::string MultiIndex::to_string() const {
    std::string s = "(";
    for (int j = 0; j < dim(); ++j) {
        if (j > 0) s += ",";
        s += std::to_string(coords_[static_cast<std::size_t>(j)]);
    }
    s += ")";
    return s;
}

static void require_same_dim(const MultiIndex& a, const MultiIndex& b, const char* op) {
    if (a.dim() != b.dim())
        throw DimensionError(std::string(op) + ": dimension mismatch (" +
                             std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    require_same_dim(a, b, "MultiIndex+");
    std::vector<int> c(a.coords_);
    for (int j = 0; j < b.dim(); ++j) c[static_cast<std::size_t>(j)] += b[j];
    return MultiIndex(std::move(c));
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
    require_same_dim(a, b, "MultiIndex-");
    if (!partial_leq(b, a))
        throw InvalidArgument("MultiIndex-: subtrahend not componentwise <= minuend");
    std::vector<int> c(a.coords_);
    for (int j = 0; j < b.dim(); ++j) c[static_cast<std::size_t>(j)] -= b[j];
    return MultiIndex(std::move(c));
}

bool partial_leq(const MultiIndex& a, const MultiIndex& b) {
    require_same_dim(a, b, "partial_leq");
    for (int j = 0; j < a.dim(); ++j)
        if (a[j] > b[j]) return false;
    return true;
}

bool partial_less(const MultiIndex& a, const MultiIndex& b) {
    return partial_leq(a, b) && a != b;
}

bool lex_less(const MultiIndex& a, const MultiIndex& b) {
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    return std::lexicographical_compare(a.coords().begin(), a.coords().end(),
                                        b.coords().begin(), b.coords().end());
}

LatticePath::LatticePath(std::vector<MultiIndex> points) : points_(std::move(points)) {
    if (points_.empty())
        throw InvalidArgument("LatticePath: needs at least one point");
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (!partial_less(points_[i - 1], points_[i]))
            throw InvalidArgument("LatticePath: points must be strictly increasing; offending step " +
                                  points_[i - 1].to_string() + " -> " + points_[i].to_string());
}

bool LatticePath::is_unit_step() const {
    for (int j = 1; j <= length(); ++j)
        if (!step(j).unit_axis()) return false;
    return true;
}

std::string LatticePath::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (i > 0) s += " ";
        s += points_[i].to_string();
    }
    return s;
}

std::string CompatibleTuple::to_string() const {
    std::string s = "(";
    for (int j = 0; j < prefix.dim(); ++j) s += std::to_string(prefix[j]) + ",";
    s += std::to_string(tail) + ")";
    return s;
}

std::vector<LatticePath> enumerate_unit_paths(const MultiIndex& from, const MultiIndex& to) {
    if (!partial_leq(from, to))
        throw InvalidArgument("enumerate_unit_paths: `from` must be componentwise <= `to`");
    std::vector<LatticePath> out;
    std::vector<MultiIndex> current{from};
    // Depth-first over step axes in ascending order gives lexicographic order
    // on the step sequences.
    std::function<void()> recurse = [&]() {
        const MultiIndex p = current.back(); // copy: push_back below may reallocate
        if (p == to) {
            out.emplace_back(current);
            return;
        }
        for (int axis = 0; axis < from.dim(); ++axis) {
            if (p[axis] < to[axis]) {
                current.push_back(p + MultiIndex::unit(from.dim(), axis));
                recurse();
                current.pop_back();
            }
        }
    };
    recurse();
    return out;
}

// All points strictly between lo and hi in the partial order, listed
// lexicographically.
static std::vector<MultiIndex> box_interior(const MultiIndex& lo, const MultiIndex& hi) {
    std::vector<MultiIndex> out;
    std::vector<int> c(lo.coords());
    const int q = lo.dim();
    while (true) {
        MultiIndex m{std::vector<int>(c)};
        if (partial_less(lo, m) && partial_less(m, hi)) out.push_back(m);
        int j = q - 1;
        while (j >= 0 && c[static_cast<std::size_t>(j)] == hi[j]) {
            c[static_cast<std::size_t>(j)] = lo[j];
            --j;
        }
        if (j < 0) break;
        ++c[static_cast<std::size_t>(j)];
    }
    return out;
}

std::vector<LatticePath> enumerate_increasing_paths(const MultiIndex& from, const MultiIndex& to, int k) {
    if (!partial_less(from, to))
        throw InvalidArgument("enumerate_increasing_paths: `from` must be strictly below `to`");
    const int max_k = (to - from).order();
    if (k < 1 || k > max_k)
        throw InvalidArgument("enumerate_increasing_paths: k out of range [1, " +
                              std::to_string(max_k) + "]: " + std::to_string(k));
    const std::vector<MultiIndex> interior = box_interior(from, to);
    std::vector<LatticePath> out;
    std::vector<MultiIndex> current{from};
    std::function<void(std::size_t)> recurse = [&](std::size_t first_candidate) {
        const int placed = static_cast<int>(current.size()) - 1;
        if (placed == k - 1) {
            if (partial_less(current.back(), to)) {
                current.push_back(to);
                out.emplace_back(current);
                current.pop_back();
            }
            return;
        }
        for (std::size_t i = first_candidate; i < interior.size(); ++i) {
            if (!partial_less(current.back(), interior[i])) continue;
            // Remaining interior picks plus the final point must still fit.
            if ((to - interior[i]).order() < k - placed - 1) continue;
            current.push_back(interior[i]);
            recurse(i + 1);
            current.pop_back();
        }
    };
    recurse(0);
    return out;
}

std::vector<CompatibleTuple> compatible_tuples(const LatticePath& path) {
    const int q = path.dim();
    const int k = path.length();
    // Valid prefix lengths m: steps 1..m are unit steps with nondecreasing axes.
    std::vector<MultiIndex> prefixes{MultiIndex::zero(q)};
    int last_axis = 0;
    for (int j = 1; j <= k; ++j) {
        auto axis = path.step(j).unit_axis();
        if (!axis || *axis < last_axis) break;
        last_axis = *axis;
        prefixes.push_back(prefixes.back() + MultiIndex::unit(q, *axis));
    }
    std::vector<CompatibleTuple> out;
    out.reserve(prefixes.size());
    for (std::size_t m = 0; m < prefixes.size(); ++m)
        out.push_back(CompatibleTuple{prefixes[m], k - static_cast<int>(m)});
    return out;
}

} // namespace impdiff
