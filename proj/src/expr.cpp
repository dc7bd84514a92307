#include "filippov/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "filippov/errors.hpp"

namespace filippov {

struct Expr::Node {
    Op op = Op::Const;
    double value = 0.0;  // constant value, or the exponent of Pow
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Op;

bool is_function(Op op) { return op >= Op::Sin; }

NodePtr make_node(Op op, double value, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->value = value;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

std::optional<double> const_of(const Expr::Node& n) {
    if (n.op == Op::Const) return n.value;
    return std::nullopt;
}


double int_pow(double base, long long n) {
    const bool neg = n < 0;
    unsigned long long k = static_cast<unsigned long long>(neg ? -n : n);
    double result = 1.0;
    while (k != 0) {
        if (k & 1ULL) result *= base;
        base *= base;
        k >>= 1ULL;
    }
    return neg ? 1.0 / result : result;
}

bool is_integer(double c) { return std::isfinite(c) && std::floor(c) == c && std::fabs(c) < 1e15; }

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* function_name(Op op) {
    switch (op) {
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Tan: return "tan";
        case Op::Exp: return "exp";
        case Op::Log: return "ln";
        case Op::Sqrt: return "sqrt";
        case Op::Abs: return "abs";
        case Op::Sign: return "sign";
        default: return "?";
    }
}

void print(const Expr::Node& n, std::string& out);

std::string to_string(const Expr::Node& n) {
    std::string s;
    print(n, s);
    return s;
}

void print(const Expr::Node& n, std::string& out) {
    switch (n.op) {
        case Op::Const:
            if (std::signbit(n.value)) {
                out += "(-";
                out += format_number(-n.value);
                out += ')';
            } else {
                out += format_number(n.value);
            }
            return;
        case Op::VarX: out += 'x'; return;
        case Op::VarY: out += 'y'; return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            static constexpr char symbols[] = {'+', '-', '*', '/'};
            out += '(';
            print(*n.lhs, out);
            out += symbols[static_cast<int>(n.op) - static_cast<int>(Op::Add)];
            print(*n.rhs, out);
            out += ')';
            return;
        }
        case Op::Pow:
            out += '(';
            print(*n.lhs, out);
            out += '^';
            if (std::signbit(n.value)) {
                out += "(-" + format_number(-n.value) + ')';
            } else {
                out += format_number(n.value);
            }
            out += ')';
            return;
        case Op::Neg:
            out += "(-";
            print(*n.lhs, out);
            out += ')';
            return;
        default:
            out += function_name(n.op);
            out += '(';
            print(*n.lhs, out);
            out += ')';
            return;
    }
}

[[noreturn]] void domain_failure(const char* what, const Expr::Node& n) {
    throw DomainError(std::string(what) + " in " + to_string(n));
}

double evaluate(const Expr::Node& n, double x, double y) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Add: return evaluate(*n.lhs, x, y) + evaluate(*n.rhs, x, y);
        case Op::Sub: return evaluate(*n.lhs, x, y) - evaluate(*n.rhs, x, y);
        case Op::Mul: return evaluate(*n.lhs, x, y) * evaluate(*n.rhs, x, y);
        case Op::Div: {
            const double d = evaluate(*n.rhs, x, y);
            if (d == 0.0) domain_failure("division by zero", n);
            return evaluate(*n.lhs, x, y) / d;
        }
        case Op::Pow: {
            const double b = evaluate(*n.lhs, x, y);
            const double c = n.value;
            if (is_integer(c)) {
                if (b == 0.0 && c < 0.0) domain_failure("zero raised to a negative power", n);
                return int_pow(b, static_cast<long long>(c));
            }
            if (b < 0.0) domain_failure("negative base with fractional exponent", n);
            if (b == 0.0 && c < 0.0) domain_failure("zero raised to a negative power", n);
            return std::pow(b, c);
        }
        case Op::Neg: return -evaluate(*n.lhs, x, y);
        case Op::Sin: return std::sin(evaluate(*n.lhs, x, y));
        case Op::Cos: return std::cos(evaluate(*n.lhs, x, y));
        case Op::Tan: {
            const double a = evaluate(*n.lhs, x, y);
            if (std::cos(a) == 0.0) domain_failure("tan pole", n);
            return std::tan(a);
        }
        case Op::Exp: return std::exp(evaluate(*n.lhs, x, y));
        case Op::Log: {
            const double a = evaluate(*n.lhs, x, y);
            if (!(a > 0.0)) domain_failure("logarithm of non-positive value", n);
            return std::log(a);
        }
        case Op::Sqrt: {
            const double a = evaluate(*n.lhs, x, y);
            if (a < 0.0) domain_failure("square root of negative value", n);
            return std::sqrt(a);
        }
        case Op::Abs: return std::fabs(evaluate(*n.lhs, x, y));
        case Op::Sign: {
            const double a = evaluate(*n.lhs, x, y);
            return static_cast<double>((a > 0.0) - (a < 0.0));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Builders with constant folding and the identities x+0, x*1, x*0. Folding is
// skipped when it would produce a non-finite constant so that the domain error
// surfaces at evaluation time instead.

NodePtr konst(double v) { return make_node(Op::Const, v); }

NodePtr fold_or(Op op, const NodePtr& a, const NodePtr& b, double value) {
    if (std::isfinite(value)) return konst(value);
    return make_node(op, 0.0, a, b);
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
    const auto ca = const_of(*a), cb = const_of(*b);
    if (ca && cb) return fold_or(Op::Add, a, b, *ca + *cb);
    if (ca && *ca == 0.0) return b;
    if (cb && *cb == 0.0) return a;
    return make_node(Op::Add, 0.0, a, b);
}

NodePtr neg(const NodePtr& a) {
    if (const auto c = const_of(*a)) return konst(-*c);
    if (a->op == Op::Neg) return a->lhs;
    return make_node(Op::Neg, 0.0, a);
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
    const auto ca = const_of(*a), cb = const_of(*b);
    if (ca && cb) return fold_or(Op::Sub, a, b, *ca - *cb);
    if (cb && *cb == 0.0) return a;
    if (ca && *ca == 0.0) return neg(b);
    return make_node(Op::Sub, 0.0, a, b);
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
    const auto ca = const_of(*a), cb = const_of(*b);
    if (ca && cb) return fold_or(Op::Mul, a, b, *ca * *cb);
    if ((ca && *ca == 0.0) || (cb && *cb == 0.0)) return konst(0.0);
    if (ca && *ca == 1.0) return b;
    if (cb && *cb == 1.0) return a;
    if (ca && *ca == -1.0) return neg(b);
    if (cb && *cb == -1.0) return neg(a);
    return make_node(Op::Mul, 0.0, a, b);
}

NodePtr divide(const NodePtr& a, const NodePtr& b) {
    const auto ca = const_of(*a), cb = const_of(*b);
    if (ca && cb && *cb != 0.0) return fold_or(Op::Div, a, b, *ca / *cb);
    if (cb && *cb == 1.0) return a;
    return make_node(Op::Div, 0.0, a, b);
}

NodePtr power(const NodePtr& base, double c) {
    if (c == 0.0) return konst(1.0);
    if (c == 1.0) return base;
    if (const auto cb = const_of(*base)) {
        const Expr::Node tmp{Op::Pow, c, base, nullptr};
        try {
            const double v = evaluate(tmp, 0.0, 0.0);
            if (std::isfinite(v)) return konst(v);
        } catch (const DomainError&) {
        }
    }
    return make_node(Op::Pow, c, base);
}

NodePtr function(Op op, const NodePtr& arg) {
    if (arg->op == Op::Const) {
        const Expr::Node tmp{op, 0.0, arg, nullptr};
        try {
            const double v = evaluate(tmp, 0.0, 0.0);
            if (std::isfinite(v)) return konst(v);
        } catch (const DomainError&) {
        }
    }
    return make_node(op, 0.0, arg);
}

NodePtr derive(const NodePtr& n, Var v) {
    switch (n->op) {
        case Op::Const: return konst(0.0);
        case Op::VarX: return konst(v == Var::X ? 1.0 : 0.0);
        case Op::VarY: return konst(v == Var::Y ? 1.0 : 0.0);
        case Op::Add: return add(derive(n->lhs, v), derive(n->rhs, v));
        case Op::Sub: return sub(derive(n->lhs, v), derive(n->rhs, v));
        case Op::Neg: return neg(derive(n->lhs, v));
        case Op::Mul:
            return add(mul(derive(n->lhs, v), n->rhs), mul(n->lhs, derive(n->rhs, v)));
        case Op::Div: {
            const NodePtr num = sub(mul(derive(n->lhs, v), n->rhs), mul(n->lhs, derive(n->rhs, v)));
            return divide(num, power(n->rhs, 2.0));
        }
        case Op::Pow:
            return mul(mul(konst(n->value), power(n->lhs, n->value - 1.0)), derive(n->lhs, v));
        case Op::Sin: return mul(function(Op::Cos, n->lhs), derive(n->lhs, v));
        case Op::Cos: return neg(mul(function(Op::Sin, n->lhs), derive(n->lhs, v)));
        case Op::Tan: return divide(derive(n->lhs, v), power(function(Op::Cos, n->lhs), 2.0));
        case Op::Exp: return mul(n, derive(n->lhs, v));
        case Op::Log: return divide(derive(n->lhs, v), n->lhs);
        case Op::Sqrt: return divide(derive(n->lhs, v), mul(konst(2.0), n));
        case Op::Abs: return mul(function(Op::Sign, n->lhs), derive(n->lhs, v));
        case Op::Sign: return konst(0.0);
    }
    return konst(0.0);
}

NodePtr rebuild(const NodePtr& n, Var v, const NodePtr& replacement) {
    switch (n->op) {
        case Op::Const: return n;
        case Op::VarX: return v == Var::X ? replacement : n;
        case Op::VarY: return v == Var::Y ? replacement : n;
        case Op::Add: return add(rebuild(n->lhs, v, replacement), rebuild(n->rhs, v, replacement));
        case Op::Sub: return sub(rebuild(n->lhs, v, replacement), rebuild(n->rhs, v, replacement));
        case Op::Mul: return mul(rebuild(n->lhs, v, replacement), rebuild(n->rhs, v, replacement));
        case Op::Div:
            return divide(rebuild(n->lhs, v, replacement), rebuild(n->rhs, v, replacement));
        case Op::Pow: return power(rebuild(n->lhs, v, replacement), n->value);
        case Op::Neg: return neg(rebuild(n->lhs, v, replacement));
        default: return function(n->op, rebuild(n->lhs, v, replacement));
    }
}

bool mentions(const Expr::Node& n, Op var) {
    if (n.op == var) return true;
    if (n.lhs && mentions(*n.lhs, var)) return true;
    if (n.rhs && mentions(*n.rhs, var)) return true;
    return false;
}

// ---------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr run() {
        skip_space();
        if (pos_ == text_.size()) throw ParseError("empty input", 0);
        NodePtr e = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = add(lhs, term());
            } else if (accept('-')) {
                lhs = sub(lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = mul(lhs, unary());
            } else if (accept('/')) {
                lhs = divide(lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return neg(unary());
        if (accept('+')) return unary();
        return power_expr();
    }

    NodePtr power_expr() {
        NodePtr base = primary();
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '^') {
            ++pos_;
            skip_space();
            const std::size_t at = pos_;
            NodePtr exponent = unary();
            const auto c = const_of(*exponent);
            if (!c) throw ParseError("exponent must be a constant", at);
            return power(base, *c);
        }
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ == text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expression();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError("malformed number", start);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        const std::string token(text_.substr(start, pos_ - start));
        return konst(std::strtod(token.c_str(), nullptr));
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "x") return make_node(Op::VarX, 0.0);
        if (name == "y") return make_node(Op::VarY, 0.0);

        static constexpr std::pair<std::string_view, Op> functions[] = {
            {"sin", Op::Sin}, {"cos", Op::Cos}, {"tan", Op::Tan},   {"exp", Op::Exp},
            {"ln", Op::Log},  {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs},
            {"sign", Op::Sign},
        };
        for (const auto& [fname, op] : functions) {
            if (name == fname) {
                if (!accept('(')) fail("expected '(' after function " + std::string(name));
                NodePtr arg = expression();
                if (!accept(')')) fail("expected ')'");
                return function(op, arg);
            }
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
};

// ------------------------------------------------------------ polynomials

Polynomial poly_add(const Polynomial& a, const Polynomial& b, double sign) {
    Polynomial r = a;
    for (const auto& [k, c] : b) r[k] += sign * c;
    std::erase_if(r, [](const auto& kv) { return kv.second == 0.0; });
    return r;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ka, ca] : a) {
        for (const auto& [kb, cb] : b) r[{ka.first + kb.first, ka.second + kb.second}] += ca * cb;
    }
    std::erase_if(r, [](const auto& kv) { return kv.second == 0.0; });
    return r;
}

std::optional<Polynomial> expand(const Expr::Node& n) {
    switch (n.op) {
        case Op::Const: {
            Polynomial p;
            if (n.value != 0.0) p[{0, 0}] = n.value;
            return p;
        }
        case Op::VarX: return Polynomial{{{1, 0}, 1.0}};
        case Op::VarY: return Polynomial{{{0, 1}, 1.0}};
        case Op::Add:
        case Op::Sub: {
            auto a = expand(*n.lhs), b = expand(*n.rhs);
            if (!a || !b) return std::nullopt;
            return poly_add(*a, *b, n.op == Op::Add ? 1.0 : -1.0);
        }
        case Op::Mul: {
            auto a = expand(*n.lhs), b = expand(*n.rhs);
            if (!a || !b) return std::nullopt;
            return poly_mul(*a, *b);
        }
        case Op::Div: {
            auto a = expand(*n.lhs);
            const auto c = const_of(*n.rhs);
            if (!a || !c || *c == 0.0) return std::nullopt;
            for (auto& kv : *a) kv.second /= *c;
            return a;
        }
        case Op::Neg: {
            auto a = expand(*n.lhs);
            if (!a) return std::nullopt;
            for (auto& kv : *a) kv.second = -kv.second;
            return a;
        }
        case Op::Pow: {
            if (!is_integer(n.value) || n.value < 0.0 || n.value > 64.0) return std::nullopt;
            auto a = expand(*n.lhs);
            if (!a) return std::nullopt;
            Polynomial r{{{0, 0}, 1.0}};
            for (int i = 0; i < static_cast<int>(n.value); ++i) r = poly_mul(r, *a);
            return r;
        }
        default: return std::nullopt;
    }
}

}  // namespace

Expr::Expr() : node_(konst(0.0)) {}

Expr Expr::constant(double value) { return Expr(konst(value)); }

Expr Expr::variable(Var v) { return Expr(make_node(v == Var::X ? Op::VarX : Op::VarY, 0.0)); }

double Expr::eval(double x, double y) const { return evaluate(*node_, x, y); }

Expr Expr::derivative(Var v) const { return Expr(derive(node_, v)); }

Expr Expr::substitute(Var v, const Expr& replacement) const {
    return Expr(rebuild(node_, v, replacement.node_));
}

std::string Expr::str() const { return to_string(*node_); }

Expr::Op Expr::op() const noexcept { return node_->op; }

std::optional<double> Expr::constant_value() const noexcept { return const_of(*node_); }

bool Expr::depends_on(Var v) const noexcept {
    return mentions(*node_, v == Var::X ? Op::VarX : Op::VarY);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.handle(), b.handle())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.handle(), b.handle())); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.handle(), b.handle())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(divide(a.handle(), b.handle())); }
Expr operator-(const Expr& a) { return Expr(neg(a.handle())); }
Expr pow(const Expr& base, double exponent) { return Expr(power(base.handle(), exponent)); }

Expr apply(Expr::Op function_op, const Expr& argument) {
    if (!is_function(function_op)) throw PreconditionError("apply() expects an elementary function");
    return Expr(function(function_op, argument.handle()));
}

Expr parse(std::string_view text) { return Expr(Parser(text).run()); }

std::optional<Polynomial> to_polynomial(const Expr& e) { return expand(*e.handle()); }

bool polynomials_equal(const Polynomial& a, const Polynomial& b, double tol) {
    Polynomial diff = poly_add(a, b, -1.0);
    for (const auto& [k, c] : diff) {
        if (std::fabs(c) > tol) return false;
    }
    return true;
}

}  // namespace filippov
