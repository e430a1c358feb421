#include "impdiff/exprsym.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace impdiff {

struct Expr::Node {
    enum class Op { number, var_x, var_y, add, sub, mul, div, pow, neg, sin, cos, exp, log, sqrt };
    Op op;
    double value = 0.0; // number
    int axis = 0;       // var_x
    int exponent = 0;   // pow
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using Op = Node::Op;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_num(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::number;
    n->value = v;
    return n;
}

bool is_num(const NodePtr& n, double v) { return n->op == Op::number && n->value == v; }

NodePtr make_neg(NodePtr a) {
    if (a->op == Op::number) return make_num(-a->value);
    if (a->op == Op::neg) return a->a;
    auto n = std::make_shared<Node>();
    n->op = Op::neg;
    n->a = std::move(a);
    return n;
}

NodePtr make_add(NodePtr a, NodePtr b) {
    if (a->op == Op::number && b->op == Op::number) return make_num(a->value + b->value);
    if (is_num(a, 0.0)) return b;
    if (is_num(b, 0.0)) return a;
    auto n = std::make_shared<Node>();
    n->op = Op::add;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_sub(NodePtr a, NodePtr b) {
    if (a->op == Op::number && b->op == Op::number) return make_num(a->value - b->value);
    if (is_num(b, 0.0)) return a;
    if (is_num(a, 0.0)) return make_neg(std::move(b));
    auto n = std::make_shared<Node>();
    n->op = Op::sub;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_mul(NodePtr a, NodePtr b) {
    if (a->op == Op::number && b->op == Op::number) return make_num(a->value * b->value);
    if (is_num(a, 0.0) || is_num(b, 0.0)) return make_num(0.0);
    if (is_num(a, 1.0)) return b;
    if (is_num(b, 1.0)) return a;
    auto n = std::make_shared<Node>();
    n->op = Op::mul;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_div(NodePtr a, NodePtr b) {
    if (is_num(a, 0.0) && !is_num(b, 0.0)) return make_num(0.0);
    if (is_num(b, 1.0)) return a;
    if (a->op == Op::number && b->op == Op::number && b->value != 0.0)
        return make_num(a->value / b->value);
    auto n = std::make_shared<Node>();
    n->op = Op::div;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_pow(NodePtr a, int exponent) {
    if (exponent == 0) return make_num(1.0);
    if (exponent == 1) return a;
    if (a->op == Op::number && !(a->value == 0.0 && exponent < 0)) {
        double r = 1.0;
        double base = a->value;
        int e = exponent < 0 ? -exponent : exponent;
        for (int i = 0; i < e; ++i) r *= base;
        return make_num(exponent < 0 ? 1.0 / r : r);
    }
    auto n = std::make_shared<Node>();
    n->op = Op::pow;
    n->exponent = exponent;
    n->a = std::move(a);
    return n;
}

NodePtr make_fn(Op op, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    return n;
}

NodePtr diff_node(const NodePtr& n, int var, int dim); // var in [0, dim) = x axis, var == dim = y

NodePtr diff_node(const NodePtr& n, int var, int dim) {
    switch (n->op) {
    case Op::number: return make_num(0.0);
    case Op::var_x: return make_num(n->axis == var ? 1.0 : 0.0);
    case Op::var_y: return make_num(var == dim ? 1.0 : 0.0);
    case Op::add: return make_add(diff_node(n->a, var, dim), diff_node(n->b, var, dim));
    case Op::sub: return make_sub(diff_node(n->a, var, dim), diff_node(n->b, var, dim));
    case Op::mul:
        return make_add(make_mul(diff_node(n->a, var, dim), n->b),
                        make_mul(n->a, diff_node(n->b, var, dim)));
    case Op::div:
        return make_div(make_sub(make_mul(diff_node(n->a, var, dim), n->b),
                                 make_mul(n->a, diff_node(n->b, var, dim))),
                        make_pow(n->b, 2));
    case Op::pow:
        return make_mul(make_mul(make_num(n->exponent), make_pow(n->a, n->exponent - 1)),
                        diff_node(n->a, var, dim));
    case Op::neg: return make_neg(diff_node(n->a, var, dim));
    case Op::sin: return make_mul(make_fn(Op::cos, n->a), diff_node(n->a, var, dim));
    case Op::cos: return make_neg(make_mul(make_fn(Op::sin, n->a), diff_node(n->a, var, dim)));
    case Op::exp: return make_mul(make_fn(Op::exp, n->a), diff_node(n->a, var, dim));
    case Op::log: return make_div(diff_node(n->a, var, dim), n->a);
    case Op::sqrt:
        return make_div(diff_node(n->a, var, dim),
                        make_mul(make_num(2.0), make_fn(Op::sqrt, n->a)));
    }
    throw Error("diff: unreachable");
}

double eval_node(const Node& n, std::span<const double> x, double y) {
    switch (n.op) {
    case Op::number: return n.value;
    case Op::var_x: return x[static_cast<std::size_t>(n.axis)];
    case Op::var_y: return y;
    case Op::add: return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
    case Op::sub: return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
    case Op::mul: return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
    case Op::div: {
        double den = eval_node(*n.b, x, y);
        if (den == 0.0) throw EvalDomainError("division by zero");
        return eval_node(*n.a, x, y) / den;
    }
    case Op::pow: {
        double base = eval_node(*n.a, x, y);
        if (base == 0.0 && n.exponent < 0)
            throw EvalDomainError("zero raised to a negative power");
        double r = 1.0;
        int e = n.exponent < 0 ? -n.exponent : n.exponent;
        for (int i = 0; i < e; ++i) r *= base;
        return n.exponent < 0 ? 1.0 / r : r;
    }
    case Op::neg: return -eval_node(*n.a, x, y);
    case Op::sin: return std::sin(eval_node(*n.a, x, y));
    case Op::cos: return std::cos(eval_node(*n.a, x, y));
    case Op::exp: return std::exp(eval_node(*n.a, x, y));
    case Op::log: {
        double arg = eval_node(*n.a, x, y);
        if (arg <= 0.0) throw EvalDomainError("log of a nonpositive value");
        return std::log(arg);
    }
    case Op::sqrt: {
        double arg = eval_node(*n.a, x, y);
        if (arg < 0.0) throw EvalDomainError("sqrt of a negative value");
        return std::sqrt(arg);
    }
    }
    throw Error("eval: unreachable");
}

// Precedence levels for printing: 1 add/sub, 2 mul/div, 3 unary minus,
// 4 pow, 5 atoms. Negative number literals print like a unary minus.
int print_level(const Node& n) {
    switch (n.op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    case Op::number: return n.value < 0 ? 3 : 5;
    default: return 5;
    }
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Trim to the shortest representation that round-trips.
    for (int precision = 1; precision < 17; ++precision) {
        char probe[64];
        std::snprintf(probe, sizeof(probe), "%.*g", precision, v);
        if (std::strtod(probe, nullptr) == v) return probe;
    }
    return buf;
}

std::string print_node(const Node& n) {
    auto wrap = [](const Node& child, int min_level) {
        std::string s = print_node(child);
        if (print_level(child) < min_level) return "(" + s + ")";
        return s;
    };
    switch (n.op) {
    case Op::number: return format_number(n.value);
    case Op::var_x: return "x" + std::to_string(n.axis + 1);
    case Op::var_y: return "y";
    case Op::add: return wrap(*n.a, 1) + " + " + wrap(*n.b, 2);
    case Op::sub: return wrap(*n.a, 1) + " - " + wrap(*n.b, 2);
    case Op::mul: return wrap(*n.a, 2) + "*" + wrap(*n.b, 3);
    case Op::div: return wrap(*n.a, 2) + "/" + wrap(*n.b, 3);
    case Op::neg: return "-" + wrap(*n.a, 3);
    case Op::pow: return wrap(*n.a, 5) + "^" + std::to_string(n.exponent);
    case Op::sin: return "sin(" + print_node(*n.a) + ")";
    case Op::cos: return "cos(" + print_node(*n.a) + ")";
    case Op::exp: return "exp(" + print_node(*n.a) + ")";
    case Op::log: return "log(" + print_node(*n.a) + ")";
    case Op::sqrt: return "sqrt(" + print_node(*n.a) + ")";
    }
    throw Error("print: unreachable");
}

bool same_node(const Node& a, const Node& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
    case Op::number: return a.value == b.value;
    case Op::var_x: return a.axis == b.axis;
    case Op::var_y: return true;
    case Op::pow: return a.exponent == b.exponent && same_node(*a.a, *b.a);
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: return same_node(*a.a, *b.a) && same_node(*a.b, *b.b);
    default: return same_node(*a.a, *b.a);
    }
}

class Parser {
public:
    Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

    NodePtr parse() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view text_;
    int dim_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        while (true) {
            if (eat('+'))
                e = make_add(std::move(e), parse_term());
            else if (eat('-'))
                e = make_sub(std::move(e), parse_term());
            else
                return e;
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_factor();
        while (true) {
            if (eat('*'))
                e = make_mul(std::move(e), parse_factor());
            else if (eat('/'))
                e = make_div(std::move(e), parse_factor());
            else
                return e;
        }
    }

    NodePtr parse_factor() {
        if (eat('-')) return make_neg(parse_factor());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr e = parse_atom();
        while (eat('^')) e = make_pow(std::move(e), parse_exponent());
        return e;
    }

    int parse_exponent() {
        skip_ws();
        std::size_t start = pos_;
        bool negative = false;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            negative = text_[pos_] == '-';
            ++pos_;
        }
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw ParseError("integer exponent required after '^'", start);
        long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 64) throw ParseError("exponent too large", start);
            ++pos_;
        }
        if (pos_ < text_.size() && text_[pos_] == '.')
            throw ParseError("integer exponent required after '^'", start);
        return negative ? -static_cast<int>(v) : static_cast<int>(v);
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return make_num(v);
    }

    NodePtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (name == "y") {
            auto n = std::make_shared<Node>();
            n->op = Op::var_y;
            return n;
        }
        if (name.size() > 1 && name[0] == 'x' &&
            std::isdigit(static_cast<unsigned char>(name[1]))) {
            int index = std::atoi(name.c_str() + 1);
            if (index < 1 || index > dim_)
                throw ParseError("variable index out of range: " + name + " (q = " +
                                 std::to_string(dim_) + ")", start);
            auto n = std::make_shared<Node>();
            n->op = Op::var_x;
            n->axis = index - 1;
            return n;
        }
        if (name == "sin" || name == "cos" || name == "exp" || name == "log" || name == "sqrt") {
            if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
            NodePtr arg = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            Op op = name == "sin"   ? Op::sin
                    : name == "cos" ? Op::cos
                    : name == "exp" ? Op::exp
                    : name == "log" ? Op::log
                                    : Op::sqrt;
            return make_fn(op, std::move(arg));
        }
        throw ParseError("unknown identifier: " + name, start);
    }
};

} // namespace

Expr::Expr(std::shared_ptr<const Node> root, int dim) : root_(std::move(root)), dim_(dim) {}

Expr Expr::parse(std::string_view source, int dim) {
    if (dim < 1) throw InvalidArgument("Expr::parse: dimension must be >= 1");
    return Expr(Parser(source, dim).parse(), dim);
}

Expr Expr::constant(double value, int dim) { return Expr(make_num(value), dim); }

Expr Expr::variable_x(int axis, int dim) {
    if (axis < 0 || axis >= dim) throw InvalidArgument("Expr::variable_x: axis out of range");
    auto n = std::make_shared<Node>();
    n->op = Op::var_x;
    n->axis = axis;
    return Expr(std::move(n), dim);
}

Expr Expr::variable_y(int dim) {
    auto n = std::make_shared<Node>();
    n->op = Op::var_y;
    return Expr(std::move(n), dim);
}

int Expr::dim() const { return dim_; }

Expr Expr::diff_x(int axis) const {
    if (axis < 0 || axis >= dim_) throw InvalidArgument("Expr::diff_x: axis out of range");
    return Expr(diff_node(root_, axis, dim_), dim_);
}

Expr Expr::diff_y() const { return Expr(diff_node(root_, dim_, dim_), dim_); }

Expr Expr::diff(const MultiIndex& s, int t) const {
    if (s.dim() != dim_) throw DimensionError("Expr::diff: order dimension mismatch");
    if (t < 0) throw InvalidArgument("Expr::diff: negative y order");
    Expr e = *this;
    for (int axis = 0; axis < dim_; ++axis)
        for (int i = 0; i < s[axis]; ++i) e = e.diff_x(axis);
    for (int i = 0; i < t; ++i) e = e.diff_y();
    return e;
}

double Expr::eval(std::span<const double> x, double y) const {
    if (static_cast<int>(x.size()) != dim_)
        throw DimensionError("Expr::eval: point dimension mismatch");
    return eval_node(*root_, x, y);
}

std::string Expr::to_string() const { return print_node(*root_); }

bool Expr::same_as(const Expr& other) const { return same_node(*root_, *other.root_); }

double ExprProvider::partial(const MultiIndex& s, int t, std::span<const double> x, double y) const {
    std::vector<int> key(s.coords());
    key.push_back(t);
    const Expr* derivative = nullptr;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto [it, inserted] = derivative_cache_.try_emplace(std::move(key));
        if (inserted) it->second = g_.diff(s, t);
        derivative = &it->second;
    }
    return derivative->eval(x, y);
}

} // namespace impdiff
