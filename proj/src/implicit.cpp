#include "impdiff/implicit.hpp"

#include <cmath>
#include <map>

#include "impdiff/util.hpp"

namespace impdiff {

ImplicitProblem::ImplicitProblem(std::shared_ptr<const GProvider> g, Grid grid, Tensor y_values)
    : g_(std::move(g)), grid_(std::move(grid)), y_values_(std::move(y_values)) {
    if (!g_) throw InvalidArgument("ImplicitProblem: null g provider");
    if (g_->dim() != grid_.dim())
        throw DimensionError("ImplicitProblem: g and grid dimension mismatch");
    if (y_values_.dim() != grid_.dim())
        throw DimensionError("ImplicitProblem: y tensor dimension mismatch");
    for (int j = 0; j < grid_.dim(); ++j)
        if (y_values_.dims()[static_cast<std::size_t>(j)] != grid_.size(j))
            throw InvalidArgument("ImplicitProblem: y tensor shape does not match grid");

    // Every supplied y value must actually solve g at its grid point.
    const MultiIndex n = grid_.max_order();
    std::vector<int> idx(static_cast<std::size_t>(grid_.dim()), 0);
    while (true) {
        MultiIndex mi{std::vector<int>(idx)};
        const double residual = g_->value(grid_.point(mi), y_values_.at(mi));
        if (std::abs(residual) > kResidualTol)
            throw InconsistentPointError("g(x_i, y_i) residual " + std::to_string(residual) +
                                         " at grid index " + mi.to_string());
        int j = grid_.dim() - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == n[j]) idx[static_cast<std::size_t>(j--)] = 0;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
    }
}

std::string BarBracket::to_string() const {
    std::string s = "[";
    for (std::size_t axis = 0; axis < x_ranges.size(); ++axis) {
        if (axis > 0) s += ";";
        for (int i = x_ranges[axis].first; i <= x_ranges[axis].second; ++i) {
            if (i > x_ranges[axis].first) s += " ";
            s += std::to_string(i);
        }
    }
    s += "|";
    for (std::size_t i = 0; i < y_points.size(); ++i) {
        if (i > 0) s += " ";
        s += y_points[i].to_string();
    }
    return s + "]g";
}

std::string TermExpr::to_string() const {
    std::string s = sign < 0 ? "- " : "+ ";
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i > 0) s += " * ";
        s += factors[i].to_string();
    }
    return s;
}

QuotientFactor unit_step_factor(const MultiIndex& from, const MultiIndex& to) {
    const auto axis = (to - from).unit_axis();
    if (!axis) throw InvalidArgument("unit_step_factor: step is not a basis vector");
    QuotientFactor f;
    for (int j = 0; j < from.dim(); ++j) {
        f.num.x_ranges.push_back({from[j], j == *axis ? to[j] : from[j]});
        f.den.x_ranges.push_back({from[j], from[j]});
    }
    f.num.y_points = {to};
    f.den.y_points = {from, to};
    return f;
}

QuotientFactor tuple_factor(const std::vector<MultiIndex>& points, const CompatibleTuple& tuple) {
    const MultiIndex& base = points.front();
    QuotientFactor f;
    for (int j = 0; j < base.dim(); ++j) {
        f.num.x_ranges.push_back({base[j], base[j] + tuple.prefix[j]});
        f.den.x_ranges.push_back({base[j], base[j]});
    }
    const int split = tuple.prefix.order();
    for (int i = split; i <= split + tuple.tail; ++i)
        f.num.y_points.push_back(points[static_cast<std::size_t>(i)]);
    f.den.y_points = {points.front(), points.back()};
    return f;
}

std::vector<TermExpr> curly_terms(const std::vector<MultiIndex>& points) {
    const LatticePath path{std::vector<MultiIndex>(points)};
    const int k = path.length();
    if (k < 1) throw InvalidArgument("curly_terms: path needs at least one step");
    if (k == 1) {
        // Single-step bracket: serves the unit-step product terms of the
        // recursive formula; a non-unit single step has no such value.
        if (!(points[1] - points[0]).unit_axis())
            throw InvalidArgument("curly_terms: single-step path must be a unit step");
        return {TermExpr{-1, {unit_step_factor(points[0], points[1])}}};
    }
    std::vector<TermExpr> terms;
    for (const CompatibleTuple& tuple : compatible_tuples(path)) {
        TermExpr term;
        term.sign = -1;
        term.factors.push_back(tuple_factor(points, tuple));
        for (int j = tuple.prefix.order() + 1; j <= k; ++j) {
            const MultiIndex step = points[static_cast<std::size_t>(j)] - points[static_cast<std::size_t>(j) - 1];
            if (step.unit_axis()) {
                term.sign = -term.sign;
                term.factors.push_back(unit_step_factor(points[static_cast<std::size_t>(j) - 1],
                                                        points[static_cast<std::size_t>(j)]));
            }
        }
        terms.push_back(std::move(term));
    }
    return terms;
}

namespace {

// Per-call evaluation context: bracket cache plus memoized y divided
// differences for the recursive form.
class Evaluation {
public:
    explicit Evaluation(const ImplicitProblem& problem) : problem_(problem) {}

    double bracket(const BarBracket& b) {
        std::vector<int> key;
        for (const auto& [lo, hi] : b.x_ranges) {
            key.push_back(lo);
            key.push_back(hi);
        }
        key.push_back(-1);
        for (const MultiIndex& mi : b.y_points)
            for (int j = 0; j < mi.dim(); ++j) key.push_back(mi[j]);
        if (auto it = bracket_cache_.find(key); it != bracket_cache_.end()) return it->second;

        const Grid& grid = problem_.grid();
        std::vector<std::vector<double>> x_nodes;
        for (int axis = 0; axis < grid.dim(); ++axis) {
            const auto& [lo, hi] = b.x_ranges[static_cast<std::size_t>(axis)];
            if (lo < 0 || hi >= grid.size(axis) || lo > hi)
                throw InvalidArgument("bracket " + b.to_string() + " exceeds the grid");
            std::vector<double> nodes;
            for (int i = lo; i <= hi; ++i) nodes.push_back(grid.node(axis, i));
            x_nodes.push_back(std::move(nodes));
        }
        std::vector<double> y_nodes;
        for (const MultiIndex& mi : b.y_points) y_nodes.push_back(problem_.y_at(mi));
        double value;
        try {
            value = g_divided_difference(problem_.g(), x_nodes, y_nodes);
        } catch (const DuplicateYError& e) {
            throw DuplicateYError(std::string(e.what()) + " in bracket " + b.to_string());
        }
        bracket_cache_.emplace(std::move(key), value);
        return value;
    }

    double quotient(const QuotientFactor& f) {
        const double num = bracket(f.num);
        const double den = bracket(f.den);
        if (std::abs(den) < kSingularGuard * std::max({std::abs(num), std::abs(den), 1.0}))
            throw SingularError("singular configuration: denominator " + f.den.to_string() +
                                " = " + std::to_string(den));
        return num / den;
    }

    double term(const TermExpr& t) {
        double v = t.sign;
        for (const QuotientFactor& f : t.factors) v *= quotient(f);
        return v;
    }

    double curly(const std::vector<MultiIndex>& points) {
        CompensatedSum sum;
        for (const TermExpr& t : curly_terms(points)) sum.add(term(t));
        return sum.value();
    }

    // [x: lo, hi]y by the first-order rule or the recursive formula.
    double ydd(const MultiIndex& lo, const MultiIndex& hi) {
        const int span = (hi - lo).order();
        if (span == 1) return term(TermExpr{-1, {unit_step_factor(lo, hi)}});
        return recursive_dd(lo, hi);
    }

    double recursive_dd(const MultiIndex& lo, const MultiIndex& hi) {
        std::vector<int> key(lo.coords());
        key.insert(key.end(), hi.coords().begin(), hi.coords().end());
        if (auto it = ydd_cache_.find(key); it != ydd_cache_.end()) return it->second;
        const int span = (hi - lo).order();
        CompensatedSum sum;
        for (int k = 2; k <= span; ++k) {
            for (const LatticePath& path : enumerate_increasing_paths(lo, hi, k)) {
                double product = curly(path.points());
                for (int j = 1; j <= k; ++j)
                    if ((path[j] - path[j - 1]).order() >= 2) product *= ydd(path[j - 1], path[j]);
                sum.add(product);
            }
        }
        const double value = sum.value();
        ydd_cache_.emplace(std::move(key), value);
        return value;
    }

    double polygon(const MultiIndex& lo, const MultiIndex& hi) {
        CompensatedSum sum;
        for (const LatticePath& path : enumerate_unit_paths(lo, hi)) {
            for (const PolygonPartition& partition : enumerate_partitions(path.points())) {
                double product = 1.0;
                for (const auto& face : partition.faces) {
                    std::vector<MultiIndex> pts;
                    for (int pos : face) pts.push_back(path[pos]);
                    product *= curly(pts);
                }
                sum.add(product);
            }
        }
        return sum.value();
    }

    double tree(const MultiIndex& lo, const MultiIndex& hi) {
        CompensatedSum sum;
        for (const LatticePath& path : enumerate_unit_paths(lo, hi)) {
            for (const PlaneTree& extended : enumerate_tprime(path.points())) {
                double product = 1.0;
                for (const Star& star : stars_of(extended)) {
                    auto type = star_type(star, path.points());
                    if (!type) throw Error("tree form: untyped star (internal)");
                    std::vector<MultiIndex> pts;
                    for (int pos : star.root_label) pts.push_back(path[pos]);
                    product *= -quotient(tuple_factor(pts, *type));
                }
                sum.add(product);
            }
        }
        return sum.value();
    }

private:
    const ImplicitProblem& problem_;
    std::map<std::vector<int>, double> bracket_cache_;
    std::map<std::vector<int>, double> ydd_cache_;
};

void require_order(const MultiIndex& lo, const MultiIndex& hi, int minimum, const char* who) {
    if (!partial_less(lo, hi) || (hi - lo).order() < minimum)
        throw InvalidArgument(std::string(who) + ": requires |hi - lo| >= " + std::to_string(minimum));
}

} // namespace

double first_order_dd(const ImplicitProblem& problem, const MultiIndex& base, int axis) {
    if (axis < 0 || axis >= problem.dim()) throw InvalidArgument("r1: axis out of range");
    Evaluation eval(problem);
    return eval.ydd(base, base + MultiIndex::unit(problem.dim(), axis));
}

double curly_bracket(const ImplicitProblem& problem, const LatticePath& path) {
    Evaluation eval(problem);
    return eval.curly(path.points());
}

double recursive_dd(const ImplicitProblem& problem, const MultiIndex& lo, const MultiIndex& hi) {
    require_order(lo, hi, 2, "recursive_dd");
    Evaluation eval(problem);
    return eval.recursive_dd(lo, hi);
}

double recursive_dd(const ImplicitProblem& problem, const MultiIndex& n) {
    return recursive_dd(problem, MultiIndex::zero(problem.dim()), n);
}

double polygon_dd(const ImplicitProblem& problem, const MultiIndex& lo, const MultiIndex& hi) {
    require_order(lo, hi, 2, "polygon_dd");
    Evaluation eval(problem);
    return eval.polygon(lo, hi);
}

double polygon_dd(const ImplicitProblem& problem, const MultiIndex& n) {
    return polygon_dd(problem, MultiIndex::zero(problem.dim()), n);
}

double tree_dd(const ImplicitProblem& problem, const MultiIndex& lo, const MultiIndex& hi) {
    require_order(lo, hi, 2, "tree_dd");
    Evaluation eval(problem);
    return eval.tree(lo, hi);
}

double tree_dd(const ImplicitProblem& problem, const MultiIndex& n) {
    return tree_dd(problem, MultiIndex::zero(problem.dim()), n);
}

std::vector<TermExpr> emit_terms(const MultiIndex& n, TermMode mode) {
    if (n.order() < 1) throw InvalidArgument("emit_terms: requires |n| >= 1");
    const MultiIndex zero = MultiIndex::zero(n.dim());
    if (n.order() == 1)
        return {TermExpr{-1, {unit_step_factor(zero, n)}}};

    std::vector<TermExpr> out;
    for (const LatticePath& path : enumerate_unit_paths(zero, n)) {
        if (mode == TermMode::polygon) {
            for (const PolygonPartition& partition : enumerate_partitions(path.points())) {
                std::vector<std::vector<TermExpr>> face_terms;
                for (const auto& face : partition.faces) {
                    std::vector<MultiIndex> pts;
                    for (int pos : face) pts.push_back(path[pos]);
                    face_terms.push_back(curly_terms(pts));
                }
                std::vector<std::size_t> pick(face_terms.size(), 0);
                while (true) {
                    TermExpr term;
                    for (std::size_t f = 0; f < face_terms.size(); ++f) {
                        const TermExpr& part = face_terms[f][pick[f]];
                        term.sign *= part.sign;
                        term.factors.insert(term.factors.end(), part.factors.begin(),
                                            part.factors.end());
                    }
                    out.push_back(std::move(term));
                    std::size_t f = face_terms.size();
                    while (f > 0 && ++pick[f - 1] == face_terms[f - 1].size()) pick[--f] = 0;
                    if (f == 0) break;
                }
            }
        } else {
            for (const PlaneTree& extended : enumerate_tprime(path.points())) {
                TermExpr term;
                for (const Star& star : stars_of(extended)) {
                    auto type = star_type(star, path.points());
                    if (!type) throw Error("emit_terms: untyped star (internal)");
                    std::vector<MultiIndex> pts;
                    for (int pos : star.root_label) pts.push_back(path[pos]);
                    term.sign = -term.sign;
                    term.factors.push_back(tuple_factor(pts, *type));
                }
                out.push_back(std::move(term));
            }
        }
    }
    return out;
}

std::vector<std::string> emit_products(const MultiIndex& n) {
    if (n.order() < 2) throw InvalidArgument("emit_products: requires |n| >= 2");
    std::vector<std::string> out;
    const MultiIndex zero = MultiIndex::zero(n.dim());
    for (const LatticePath& path : enumerate_unit_paths(zero, n)) {
        for (const PolygonPartition& partition : enumerate_partitions(path.points())) {
            std::string line;
            for (std::size_t f = 0; f < partition.faces.size(); ++f) {
                if (f > 0) line += " * ";
                line += "{";
                for (std::size_t i = 0; i < partition.faces[f].size(); ++i) {
                    if (i > 0) line += " ";
                    line += path[partition.faces[f][i]].to_string();
                }
                line += "}g";
            }
            out.push_back(std::move(line));
        }
    }
    return out;
}

} // namespace impdiff
