#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "filippov/expr.hpp"
#include "filippov/geometry.hpp"

namespace filippov {

enum class Field { X1, X2 };

[[nodiscard]] const char* to_string(Field field) noexcept;

/// Planar vector field with expression components.
struct VectorField {
    Expr x;
    Expr y;

    [[nodiscard]] Vec2 operator()(Vec2 q) const { return {x.eval(q.x, q.y), y.eval(q.x, q.y)}; }
    [[nodiscard]] VectorField operator-() const { return {-x, -y}; }
};

/// Numerical thresholds used when exact zeros of the theory meet floating point.
struct Tolerances {
    double tangency_rel = 1e-9;    // |L| <= tangency_rel * (1 + |X|) counts as zero
    double on_manifold = 1e-8;     // |f(q)| <= on_manifold * (1 + |q|) counts as on Sigma
    double gradient_min = 1e-8;    // |grad f| below this is a singular point of f
    double slope_floor = 1e-7;     // |d/ds of the sliding field| below this is non-hyperbolic
};

/// Parameterization of the switching manifold. Lines use the free coordinate (or the
/// signed distance along the line); general curves use arclength from a seed point.
class SigmaChart {
public:
    enum class Kind { Horizontal, Vertical, Line, Curve };

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] Vec2 point(double s) const;
    [[nodiscard]] double param(Vec2 q) const;
    /// Unit tangent at parameter s, oriented in the direction of increasing s.
    [[nodiscard]] Vec2 tangent(double s) const;
    [[nodiscard]] bool closed() const noexcept { return period_ > 0.0; }
    [[nodiscard]] double period() const noexcept { return period_; }
    /// Parameter range covered by a curve chart (unbounded for lines).
    [[nodiscard]] double s_min() const noexcept { return s_min_; }
    [[nodiscard]] double s_max() const noexcept { return s_max_; }

private:
    friend class NonSmoothSystem;
    struct CurveTable;

    Kind kind_ = Kind::Horizontal;
    Vec2 origin_{};
    Vec2 direction_{1.0, 0.0};
    double period_ = 0.0;
    double s_min_ = -std::numeric_limits<double>::infinity();
    double s_max_ = std::numeric_limits<double>::infinity();
    std::shared_ptr<const CurveTable> curve_;
};

/// The two-zone field: X1 on {f > 0}, X2 on {f < 0}, switching manifold {f = 0}.
/// Immutable; Lie derivatives are formed symbolically once at construction.
class NonSmoothSystem {
public:
    /// `sigma_seed` is a point near {f = 0}, needed only when f is not affine.
    NonSmoothSystem(VectorField x1, VectorField x2, Expr f, std::optional<Vec2> sigma_seed = {},
                    double curve_extent = 20.0);

    [[nodiscard]] const VectorField& field(Field which) const noexcept {
        return which == Field::X1 ? x1_ : x2_;
    }
    [[nodiscard]] const Expr& switching() const noexcept { return f_; }
    [[nodiscard]] const SigmaChart& chart() const noexcept { return chart_; }

    [[nodiscard]] Vec2 eval(Field which, Vec2 q) const { return field(which)(q); }
    [[nodiscard]] double f(Vec2 q) const { return f_.eval(q.x, q.y); }
    [[nodiscard]] Vec2 grad_f(Vec2 q) const { return {fx_.eval(q.x, q.y), fy_.eval(q.x, q.y)}; }

    /// X.f (order 1) or X.(X.f) (order 2) as an expression.
    [[nodiscard]] const Expr& lie(Field which, int order) const;
    [[nodiscard]] double lie(Field which, int order, Vec2 q) const {
        const Expr& e = lie(which, order);
        return e.eval(q.x, q.y);
    }

    /// The field on the side of Sigma containing q (X1 for f >= 0).
    [[nodiscard]] Vec2 side_field(Vec2 q) const { return f(q) >= 0.0 ? eval(Field::X1, q) : eval(Field::X2, q); }

    /// f is exactly the coordinate x or y (required by the blow-up chart).
    [[nodiscard]] std::optional<Var> coordinate_switching() const noexcept { return coordinate_; }

    /// The time-reversed system (-X1, -X2, f).
    [[nodiscard]] NonSmoothSystem reversed() const;

    [[nodiscard]] std::optional<Vec2> sigma_seed() const noexcept { return seed_; }

private:
    VectorField x1_;
    VectorField x2_;
    Expr f_;
    Expr fx_;
    Expr fy_;
    Expr lie_[2][2];
    std::optional<Var> coordinate_;
    std::optional<Vec2> seed_;
    double curve_extent_;
    SigmaChart chart_;

    void build_chart();
};

enum class Region {
    Sewing,
    Escaping,
    Sliding,
    FoldVisible,
    FoldInvisible,
    PseudoEquilibrium,
    Degenerate,
};

enum class PseudoKind { SigmaSaddle, SigmaAttractor, SigmaRepeller, NonHyperbolic };

[[nodiscard]] const char* to_string(Region region) noexcept;
[[nodiscard]] const char* to_string(PseudoKind kind) noexcept;

/// Pointwise class of a point of Sigma.
struct SigmaClass {
    Region region = Region::Degenerate;
    Field field = Field::X1;               // folds: which field is tangent
    PseudoKind pseudo = PseudoKind::NonHyperbolic;
    Region side = Region::Sliding;         // pseudo-equilibria: Sliding or Escaping
    std::string reason;                    // degenerate points

    [[nodiscard]] std::string label() const;
};

struct PseudoEquilibrium {
    double s = 0.0;
    Vec2 point{};
    Region side = Region::Sliding;
    PseudoKind kind = PseudoKind::NonHyperbolic;
    double slope = 0.0;  // d/ds of the tangential sliding component
};

struct FoldPoint {
    double s = 0.0;
    Vec2 point{};
    Field field = Field::X1;
    bool visible = false;
};

/// X.f or X.(X.f) as an expression.
[[nodiscard]] Expr lie_derivative(const NonSmoothSystem& sys, Field which, int order);

/// Tangency band at q: tangency_rel * (1 + max(|X1(q)|, |X2(q)|)).
[[nodiscard]] double tangency_tolerance(const NonSmoothSystem& sys, Vec2 q, const Tolerances& tol = {});

[[nodiscard]] SigmaClass classify_point(const NonSmoothSystem& sys, Vec2 q, const Tolerances& tol = {});

/// Filippov convex combination (L2 X1 - L1 X2) / (L2 - L1) on the sliding or escaping region.
[[nodiscard]] Vec2 sliding_field(const NonSmoothSystem& sys, Vec2 q, const Tolerances& tol = {});

/// H(z) = p(z) - z in the orthonormal frame (tangent, unit normal) at chart point z.
/// Equal to the tangential component of the sliding field.
[[nodiscard]] double direction_function(const NonSmoothSystem& sys, double z, const Tolerances& tol = {});

/// det[X1 X2] in the (tangent, unit normal) frame at chart point z.
[[nodiscard]] double frame_determinant(const NonSmoothSystem& sys, double z);

/// Normal components (X1.n, X2.n) with the unit normal n = grad f / |grad f| at chart point z.
[[nodiscard]] std::pair<double, double> frame_normals(const NonSmoothSystem& sys, double z);

/// Pseudo-equilibria on the chart interval [a, b]: sign changes of the tangential
/// sliding component plus double zeros detected as |H| minima below 1e-10.
[[nodiscard]] std::vector<PseudoEquilibrium> pseudo_equilibria(const NonSmoothSystem& sys, double a,
                                                               double b, int intervals = 1000,
                                                               const Tolerances& tol = {});

/// Classify a zero of the sliding field at chart parameter s.
[[nodiscard]] PseudoEquilibrium classify_pseudo_equilibrium(const NonSmoothSystem& sys, double s,
                                                            bool double_root,
                                                            const Tolerances& tol = {});

/// Zeros of X1.f and X2.f on [a, b] with visibility; two-fold points are listed once per field.
[[nodiscard]] std::vector<FoldPoint> fold_census(const NonSmoothSystem& sys, double a, double b,
                                                 int intervals = 2000);

}  // namespace filippov
