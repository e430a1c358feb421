#include "impdiff/hideriv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "impdiff/implicit.hpp"
#include "impdiff/polytree.hpp"
#include "impdiff/util.hpp"

namespace impdiff {

bool deriv_element_less(const std::pair<MultiIndex, int>& a, const std::pair<MultiIndex, int>& b) {
    if (a.second != b.second) return a.second < b.second;
    return lex_less(b.first, a.first); // descending lex on s
}

void DerivPartition::normalize() {
    std::sort(elements.begin(), elements.end(), deriv_element_less);
}

std::vector<int> DerivPartition::multiplicities() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < elements.size();) {
        std::size_t j = i;
        while (j < elements.size() && elements[j] == elements[i]) ++j;
        out.push_back(static_cast<int>(j - i));
        i = j;
    }
    return out;
}

std::string DerivPartition::to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (i > 0) s += ",";
        s += "(";
        for (int j = 0; j < elements[i].first.dim(); ++j)
            s += std::to_string(elements[i].first[j]) + ",";
        s += std::to_string(elements[i].second) + ")";
    }
    return s + "}";
}

bool operator<(const DerivPartition& a, const DerivPartition& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.elements.begin(), a.elements.end(),
                                        b.elements.begin(), b.elements.end(),
                                        deriv_element_less);
}

std::vector<DerivPartition> enumerate_deriv_partitions(const MultiIndex& n) {
    if (n.is_zero()) throw InvalidArgument("enumerate_deriv_partitions: n must be nonzero");
    const int q = n.dim();
    std::vector<DerivPartition> out;

    for (int r = 1; r <= 2 * n.order() - 1; ++r) {
        // Candidate elements (s, t), s <= n, t <= r - 1, nonzero and not
        // (0, 1), in canonical order.
        std::vector<std::pair<MultiIndex, int>> candidates;
        std::vector<int> s(static_cast<std::size_t>(q), 0);
        while (true) {
            MultiIndex ms{std::vector<int>(s)};
            for (int t = 0; t <= r - 1; ++t) {
                if (ms.is_zero() && (t == 0 || t == 1)) continue;
                candidates.push_back({ms, t});
            }
            int j = q - 1;
            while (j >= 0 && s[static_cast<std::size_t>(j)] == n[j]) s[static_cast<std::size_t>(j--)] = 0;
            if (j < 0) break;
            ++s[static_cast<std::size_t>(j)];
        }
        std::sort(candidates.begin(), candidates.end(), deriv_element_less);

        DerivPartition current;
        std::function<void(std::size_t, MultiIndex, int)> recurse =
            [&](std::size_t first, MultiIndex s_left, int t_left) {
                const int picked = current.size();
                if (picked == r) {
                    if (s_left.is_zero() && t_left == 0) out.push_back(current);
                    return;
                }
                for (std::size_t i = first; i < candidates.size(); ++i) {
                    const auto& [cs, ct] = candidates[i];
                    if (!partial_leq(cs, s_left) || ct > t_left) continue;
                    current.elements.push_back(candidates[i]);
                    recurse(i, s_left - cs, t_left - ct);
                    current.elements.pop_back();
                }
            };
        recurse(0, n, r - 1);
    }
    return out;
}

Rational partition_coefficient(const DerivPartition& p) {
    if (p.elements.empty()) throw InvalidArgument("partition_coefficient: empty partition");
    return Rational(multinomial(p.multiplicities()), p.size());
}

namespace {

double checked_g01(const GProvider& g, std::span<const double> x, double y) {
    const double residual = g.value(x, y);
    if (std::abs(residual) > 1e-8)
        throw InconsistentPointError("g(x, y) residual " + std::to_string(residual) +
                                     " too large at the evaluation point");
    const double g01 = g.partial(MultiIndex::zero(g.dim()), 1, x, y);
    if (std::abs(g01) < kSingularGuard * std::max(1.0, std::abs(g01)))
        throw SingularError("singular configuration: g_{0,1} = " + std::to_string(g01));
    return g01;
}

} // namespace

double derivative_from_partials(const GProvider& g, std::span<const double> x, double y,
                            const MultiIndex& n) {
    if (n.dim() != g.dim()) throw DimensionError("derivative_from_partials: dimension mismatch");
    if (n.is_zero()) throw InvalidArgument("derivative_from_partials: n must be nonzero");
    const double g01 = checked_g01(g, x, y);
    CompensatedSum sum;
    for (const DerivPartition& p : enumerate_deriv_partitions(n)) {
        const Rational coeff = partition_coefficient(p);
        double product = boost::rational_cast<double>(coeff);
        for (const auto& [s, t] : p.elements)
            product *= -g.partial(s, t, x, y) /
                       (static_cast<double>(coalescence_factor(s, t)) * g01);
        sum.add(product);
    }
    return static_cast<double>(coalescence_factor(n)) * sum.value();
}

CoalescedTreeResult coalesced_tree_form(const GProvider& g, std::span<const double> x, double y,
                                        const MultiIndex& n) {
    if (n.dim() != g.dim()) throw DimensionError("coalesced_tree_form: dimension mismatch");
    if (n.is_zero()) throw InvalidArgument("coalesced_tree_form: n must be nonzero");
    const double g01 = checked_g01(g, x, y);

    CoalescedTreeResult result;
    CompensatedSum sum;
    const MultiIndex zero = MultiIndex::zero(n.dim());
    for (const LatticePath& path : enumerate_unit_paths(zero, n)) {
        for (const PlaneTree& extended : enumerate_tprime(path.points())) {
            CoalescedTerm term;
            double product = 1.0;
            for (const Star& star : stars_of(extended)) {
                auto type = star_type(star, path.points());
                if (!type) throw Error("coalesced_tree_form: untyped star (internal)");
                product *= -g.partial(type->prefix, type->tail, x, y) /
                           (static_cast<double>(coalescence_factor(type->prefix, type->tail)) * g01);
                term.star_types.elements.push_back({type->prefix, type->tail});
            }
            term.star_types.normalize();
            term.value = product;
            sum.add(product);
            result.terms.push_back(std::move(term));
        }
    }
    result.derivative = static_cast<double>(coalescence_factor(n)) * sum.value();
    return result;
}

std::map<DerivPartition, long long> star_type_census(const MultiIndex& n) {
    if (n.is_zero()) throw InvalidArgument("star_type_census: n must be nonzero");
    std::map<DerivPartition, long long> census;
    const MultiIndex zero = MultiIndex::zero(n.dim());
    for (const LatticePath& path : enumerate_unit_paths(zero, n)) {
        for (const PlaneTree& extended : enumerate_tprime(path.points())) {
            DerivPartition types;
            for (const Star& star : stars_of(extended)) {
                auto type = star_type(star, path.points());
                if (!type) throw Error("star_type_census: untyped star (internal)");
                types.elements.push_back({type->prefix, type->tail});
            }
            types.normalize();
            ++census[types];
        }
    }
    return census;
}

namespace {

std::string g_symbol(const MultiIndex& s, int t) {
    std::string out = "g";
    for (int j = 0; j < s.dim(); ++j) out += std::to_string(s[j]);
    return out + std::to_string(t);
}

std::string rational_string(const Rational& r) {
    std::string s = std::to_string(r.numerator());
    if (r.denominator() != 1) s += "/" + std::to_string(r.denominator());
    return s;
}

} // namespace

std::string derivative_formula(const MultiIndex& n) {
    if (n.is_zero()) throw InvalidArgument("derivative_formula: n must be nonzero");
    std::string out = "y_" + n.to_string() + " = ";
    bool first = true;
    for (const DerivPartition& p : enumerate_deriv_partitions(n)) {
        // n! * (1/|p|) * multinomial * prod 1/(s! t!), sign (-1)^{|p|}.
        Rational coeff = partition_coefficient(p) * Rational(coalescence_factor(n));
        for (const auto& [s, t] : p.elements) coeff /= Rational(coalescence_factor(s, t));
        const bool negative = p.size() % 2 == 1;

        std::string body;
        if (coeff != Rational(1)) body += rational_string(coeff) + " ";
        for (std::size_t i = 0; i < p.elements.size();) {
            std::size_t j = i;
            while (j < p.elements.size() && p.elements[j] == p.elements[i]) ++j;
            if (i > 0) body += " ";
            body += g_symbol(p.elements[i].first, p.elements[i].second);
            if (j - i > 1) body += "^" + std::to_string(j - i);
            i = j;
        }
        body += "/" + g_symbol(MultiIndex::zero(n.dim()), 1);
        if (p.size() > 1) body += "^" + std::to_string(p.size());

        if (first) {
            out += (negative ? "-" : "") + body;
            first = false;
        } else {
            out += (negative ? " - " : " + ") + body;
        }
    }
    return out;
}

} // namespace impdiff
