#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace filippov {

enum class Var { X, Y };

/// Immutable scalar expression in the two plane variables x and y.
///
/// Grammar (lowest to highest precedence): `+ -`, `* /`, unary `-`, `^`.
/// Exponents must reduce to a constant. Implicit multiplication is rejected.
/// Functions: sin cos tan exp ln (alias log) sqrt abs sign.
///
/// Copies share the underlying tree, so passing by value is cheap and
/// concurrent evaluation from several threads is safe.
class Expr {
public:
    enum class Op : unsigned char {
        Const, VarX, VarY,
        Add, Sub, Mul, Div, Pow, Neg,
        Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Sign,
    };

    /// The constant 0.
    Expr();

    static Expr constant(double value);
    static Expr variable(Var v);

    /// Evaluate at (x, y). Throws DomainError naming the offending subexpression.
    [[nodiscard]] double eval(double x, double y) const;

    /// Exact symbolic partial derivative. d|u| uses sign(u), with sign(0) = 0.
    [[nodiscard]] Expr derivative(Var v) const;

    /// Replace every occurrence of `v` by `replacement`.
    [[nodiscard]] Expr substitute(Var v, const Expr& replacement) const;

    /// Fully parenthesized infix; parse(str()) evaluates identically.
    [[nodiscard]] std::string str() const;

    [[nodiscard]] Op op() const noexcept;
    [[nodiscard]] std::optional<double> constant_value() const noexcept;
    [[nodiscard]] bool is_constant() const noexcept { return constant_value().has_value(); }
    [[nodiscard]] bool depends_on(Var v) const noexcept;

    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    [[nodiscard]] const std::shared_ptr<const Node>& handle() const noexcept { return node_; }

private:
    std::shared_ptr<const Node> node_;
};

[[nodiscard]] Expr operator+(const Expr& a, const Expr& b);
[[nodiscard]] Expr operator-(const Expr& a, const Expr& b);
[[nodiscard]] Expr operator*(const Expr& a, const Expr& b);
[[nodiscard]] Expr operator/(const Expr& a, const Expr& b);
[[nodiscard]] Expr operator-(const Expr& a);
[[nodiscard]] Expr pow(const Expr& base, double exponent);
[[nodiscard]] Expr apply(Expr::Op function, const Expr& argument);

/// Parse infix text. Throws ParseError with the byte offset of the problem.
[[nodiscard]] Expr parse(std::string_view text);

[[nodiscard]] inline double eval(const Expr& e, double x, double y) { return e.eval(x, y); }
[[nodiscard]] inline Expr differentiate(const Expr& e, Var v) { return e.derivative(v); }

/// Polynomial in x, y keyed by (power of x, power of y). Zero coefficients are dropped.
using Polynomial = std::map<std::pair<int, int>, double>;

/// Expand `e` into a polynomial when it is one (non-negative integer powers only).
[[nodiscard]] std::optional<Polynomial> to_polynomial(const Expr& e);

/// Coefficient-wise comparison with absolute tolerance.
[[nodiscard]] bool polynomials_equal(const Polynomial& a, const Polynomial& b, double tol = 1e-12);

}  // namespace filippov
