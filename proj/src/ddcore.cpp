#include "impdiff/ddcore.hpp"

#include <algorithm>
#include <cmath>

#include "impdiff/util.hpp"

namespace impdiff {

namespace {

double axis_span(std::span<const double> nodes) {
    auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end());
    return *hi - *lo;
}

void check_distinct(std::span<const double> nodes, bool is_y_axis) {
    if (nodes.size() < 2) return;
    const double tol = kNodeSeparationTol * std::max(axis_span(nodes), 1e-300);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            if (std::abs(nodes[i] - nodes[j]) <= tol) {
                const std::string what = "nodes " + std::to_string(nodes[i]) + " and " +
                                         std::to_string(nodes[j]) + " coincide";
                if (is_y_axis) throw DuplicateYError("duplicate y value: " + what);
                throw CoincidentNodesError(what);
            }
}

} // namespace

Grid::Grid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw InvalidArgument("Grid: needs at least one axis");
    for (const auto& nodes : axes_) {
        if (nodes.empty()) throw InvalidArgument("Grid: empty axis");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i - 1] < nodes[i]))
                throw InvalidArgument("Grid: axis nodes must be strictly increasing");
        check_distinct(nodes, false);
    }
}

MultiIndex Grid::max_order() const {
    std::vector<int> n;
    for (const auto& nodes : axes_) n.push_back(static_cast<int>(nodes.size()) - 1);
    return MultiIndex(std::move(n));
}

std::vector<double> Grid::point(const MultiIndex& index) const {
    if (index.dim() != dim()) throw DimensionError("Grid::point: dimension mismatch");
    std::vector<double> p;
    for (int j = 0; j < dim(); ++j) {
        if (index[j] < 0 || index[j] >= size(j))
            throw InvalidArgument("Grid::point: index out of range");
        p.push_back(node(j, index[j]));
    }
    return p;
}

Grid Grid::window(const MultiIndex& lo, const MultiIndex& hi) const {
    if (lo.dim() != dim() || hi.dim() != dim())
        throw DimensionError("Grid::window: dimension mismatch");
    if (!partial_leq(lo, hi)) throw InvalidArgument("Grid::window: lo must be <= hi");
    std::vector<std::vector<double>> axes;
    for (int j = 0; j < dim(); ++j) {
        if (hi[j] >= size(j)) throw InvalidArgument("Grid::window: window exceeds grid");
        const auto& nodes = axes_[static_cast<std::size_t>(j)];
        axes.emplace_back(nodes.begin() + lo[j], nodes.begin() + hi[j] + 1);
    }
    return Grid(std::move(axes));
}

Tensor::Tensor(std::vector<int> dims) : dims_(std::move(dims)) {
    std::size_t total = 1;
    for (int d : dims_) {
        if (d < 1) throw InvalidArgument("Tensor: dimensions must be >= 1");
        total *= static_cast<std::size_t>(d);
    }
    data_.assign(total, 0.0);
}

std::size_t Tensor::offset(const MultiIndex& index) const {
    if (index.dim() != dim()) throw DimensionError("Tensor::at: dimension mismatch");
    std::size_t flat = 0;
    for (int j = 0; j < dim(); ++j) {
        if (index[j] < 0 || index[j] >= dims_[static_cast<std::size_t>(j)])
            throw InvalidArgument("Tensor::at: index out of range");
        flat = flat * static_cast<std::size_t>(dims_[static_cast<std::size_t>(j)]) +
               static_cast<std::size_t>(index[j]);
    }
    return flat;
}

double divided_difference(std::span<const double> nodes, std::span<const double> values) {
    if (nodes.size() != values.size())
        throw InvalidArgument("divided_difference: node/value count mismatch");
    if (nodes.empty()) throw InvalidArgument("divided_difference: empty node list");
    check_distinct(nodes, false);
    std::vector<double> table(values.begin(), values.end());
    const std::size_t n = nodes.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i)
            table[i] = (table[i + 1] - table[i]) / (nodes[i + level] - nodes[i]);
    return table[0];
}

namespace {

// Contracts the trailing axis of a row-major tensor with the univariate
// divided-difference table, leaving a tensor one axis shorter.
std::vector<double> reduce_last_axis(std::span<const double> data, std::size_t rows,
                                     std::span<const double> nodes) {
    const std::size_t width = nodes.size();
    std::vector<double> out(rows);
    std::vector<double> table(width);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < width; ++i) table[i] = data[r * width + i];
        for (std::size_t level = 1; level < width; ++level)
            for (std::size_t i = 0; i + level < width; ++i)
                table[i] = (table[i + 1] - table[i]) / (nodes[i + level] - nodes[i]);
        out[r] = table[0];
    }
    return out;
}

} // namespace

double divided_difference(const Tensor& values, const Grid& grid) {
    if (values.dim() != grid.dim())
        throw DimensionError("divided_difference: tensor/grid dimension mismatch");
    std::size_t total = 1;
    for (int j = 0; j < grid.dim(); ++j) {
        if (values.dims()[static_cast<std::size_t>(j)] != grid.size(j))
            throw InvalidArgument("divided_difference: tensor shape does not match grid");
        total *= static_cast<std::size_t>(grid.size(j));
    }
    std::vector<double> data(total);
    for (std::size_t i = 0; i < total; ++i) data[i] = values[i];
    for (int axis = grid.dim() - 1; axis >= 0; --axis) {
        const std::size_t width = static_cast<std::size_t>(grid.size(axis));
        data = reduce_last_axis(data, data.size() / width, grid.axis(axis));
    }
    return data[0];
}

double g_divided_difference(const GProvider& g,
                            const std::vector<std::vector<double>>& x_nodes,
                            std::span<const double> y_nodes) {
    if (static_cast<int>(x_nodes.size()) != g.dim())
        throw DimensionError("g_divided_difference: x axis count must equal q");
    if (y_nodes.empty()) throw InvalidArgument("g_divided_difference: empty y node list");
    for (const auto& nodes : x_nodes) {
        if (nodes.empty()) throw InvalidArgument("g_divided_difference: empty x axis");
        check_distinct(nodes, false);
    }
    check_distinct(y_nodes, true);

    // Sample g over the (q+1)-dimensional product grid, y axis last.
    const int q = g.dim();
    std::vector<int> dims;
    std::size_t total = 1;
    for (const auto& nodes : x_nodes) {
        dims.push_back(static_cast<int>(nodes.size()));
        total *= nodes.size();
    }
    dims.push_back(static_cast<int>(y_nodes.size()));
    total *= y_nodes.size();

    std::vector<double> data(total);
    std::vector<int> idx(static_cast<std::size_t>(q) + 1, 0);
    std::vector<double> x(static_cast<std::size_t>(q));
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int j = q; j >= 0; --j) {
            idx[static_cast<std::size_t>(j)] = static_cast<int>(rest % static_cast<std::size_t>(dims[static_cast<std::size_t>(j)]));
            rest /= static_cast<std::size_t>(dims[static_cast<std::size_t>(j)]);
        }
        for (int j = 0; j < q; ++j)
            x[static_cast<std::size_t>(j)] = x_nodes[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
        data[flat] = g.value(x, y_nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(q)])]);
    }

    // Reduce y first, then the x axes from the last to the first.
    std::vector<double> work = reduce_last_axis(data, total / y_nodes.size(), y_nodes);
    for (int axis = q - 1; axis >= 0; --axis) {
        const auto& nodes = x_nodes[static_cast<std::size_t>(axis)];
        work = reduce_last_axis(work, work.size() / nodes.size(), nodes);
    }
    return work[0];
}

long long coalescence_factor(const MultiIndex& n) {
    long long f = 1;
    for (int j = 0; j < n.dim(); ++j) f *= factorial(n[j]);
    return f;
}

long long coalescence_factor(const MultiIndex& s, int t) {
    return coalescence_factor(s) * factorial(t);
}

} // namespace impdiff
