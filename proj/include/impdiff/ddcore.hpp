#pragma once

// Tensor-grid divided differences, the bar-separated form for g (with the
// dependent variable as an extra axis), and the coalescence scaling
// constants connecting divided differences to partial derivatives.

#include <memory>
#include <span>
#include <vector>

#include "impdiff/errors.hpp"
#include "impdiff/mindex.hpp"

namespace impdiff {

// Relative tolerance under which two nodes on one axis count as coincident.
inline constexpr double kNodeSeparationTol = 1e-12;

// A rectangular grid: strictly increasing node lists, one per axis.
class Grid {
public:
    explicit Grid(std::vector<std::vector<double>> axes);

    int dim() const { return static_cast<int>(axes_.size()); }
    int size(int axis) const { return static_cast<int>(axes_[static_cast<std::size_t>(axis)].size()); }
    MultiIndex max_order() const; // (n_1, ..., n_q) = per-axis size - 1
    double node(int axis, int index) const { return axes_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(index)]; }
    std::span<const double> axis(int axis) const { return axes_[static_cast<std::size_t>(axis)]; }

    // Point at a grid multi-index.
    std::vector<double> point(const MultiIndex& index) const;
    // Sub-grid with per-axis index windows [lo_j, hi_j].
    Grid window(const MultiIndex& lo, const MultiIndex& hi) const;

private:
    std::vector<std::vector<double>> axes_;
};

// Values over a rectangular index box, row major (last axis fastest).
class Tensor {
public:
    explicit Tensor(std::vector<int> dims);

    int dim() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }
    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }
    double& at(const MultiIndex& index) { return data_[offset(index)]; }
    double at(const MultiIndex& index) const { return data_[offset(index)]; }

private:
    std::size_t offset(const MultiIndex& index) const;
    std::vector<int> dims_;
    std::vector<double> data_;
};

// Full-order divided difference of one variable. Nodes need not be sorted
// but must be pairwise distinct.
double divided_difference(std::span<const double> nodes, std::span<const double> values);

// Multivariate divided difference of a sampled tensor over the grid: the
// full-order univariate table is applied along the last axis first, then the
// next, down to the first. Any axis order gives the same value; the fixed
// order keeps results bit-reproducible.
double divided_difference(const Tensor& values, const Grid& grid);

// Supplies samples g(x, y) and exact partials g_{s,t}(x, y) for a concrete g.
// Implementations must be deterministic: repeated queries agree bit for bit.
class GProvider {
public:
    virtual ~GProvider() = default;
    virtual int dim() const = 0; // q
    virtual double value(std::span<const double> x, double y) const = 0;
    virtual double partial(const MultiIndex& s, int t, std::span<const double> x, double y) const = 0;
};

// Bar-form divided difference of g: x_nodes gives the node list per x axis,
// y_nodes the node list for the dependent axis. The y nodes may arrive in
// any order but must be pairwise distinct; a duplicate pair throws
// DuplicateYError naming the offending values.
double g_divided_difference(const GProvider& g,
                            const std::vector<std::vector<double>>& x_nodes,
                            std::span<const double> y_nodes);

// Coalescence normalization: a fully coalesced divided difference of y of
// order n equals y_n / n!.
long long coalescence_factor(const MultiIndex& n);
// Likewise for g with x order s and y order t: the factor is s! * t!.
long long coalescence_factor(const MultiIndex& s, int t);

} // namespace impdiff
