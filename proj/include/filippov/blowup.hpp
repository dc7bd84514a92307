#pragma once

#include <string>
#include <vector>

#include "filippov/regularize.hpp"
#include "filippov/system.hpp"

namespace filippov {

/// Singular-perturbation problem on the blow-up locus r = 0 of the regularization,
/// for f = x (x = r cos theta, eps = r sin theta) or f = y (same with y).
/// With s the coordinate along Sigma and u = phi(cot theta):
///   B(theta, s) = normal_mean(s) + u * normal_half_diff(s)
///   G(theta, s) = tangent_mean(s) + u * tangent_half_diff(s)
///   fast:    theta' = -sin(theta) B,  s' = 0
///   reduced: B = 0,  s_dot = G
struct SPProblem {
    NonSmoothSystem system;
    Var normal_var = Var::X;  // the coordinate f
    Var sigma_var = Var::Y;   // the coordinate along Sigma
    Expr normal_mean;
    Expr normal_half_diff;
    Expr tangent_mean;
    Expr tangent_half_diff;
    TransitionFunction phi;
    bool degenerate = false;  // normal_half_diff vanishes identically: B does not depend on theta

    [[nodiscard]] double u(double theta) const;
    [[nodiscard]] double B(double theta, double s) const;
    [[nodiscard]] double dB_ds(double theta, double s) const;
    [[nodiscard]] double G(double theta, double s) const;
    [[nodiscard]] double fast_theta(double theta, double s) const;
    /// Point of Sigma with coordinate s.
    [[nodiscard]] Vec2 sigma_point(double s) const;

    [[nodiscard]] std::string fast_str() const;
    [[nodiscard]] std::string reduced_str() const;
};

/// Throws PreconditionError unless f is exactly x or y.
[[nodiscard]] SPProblem sp_from_regularization(const NonSmoothSystem& sys,
                                               const TransitionFunction& phi = TransitionFunction::quintic());

struct Window {
    double a = -5.0;
    double b = 5.0;
};

/// Roots in s of B(theta, .) inside the window with |B| < 1e-10, ascending.
/// Throws PreconditionError for theta outside (0, pi) or when B vanishes identically.
[[nodiscard]] std::vector<double> slow_manifold(const SPProblem& spp, double theta, Window window = {},
                                                int intervals = 4000);

struct SlowSample {
    double theta = 0.0;
    double y = 0.0;  // coordinate along Sigma
    double residual = 0.0;
    double dy_reduced = 0.0;
    double dtheta_fast_above = 0.0;  // fast theta' at y + delta
    double dtheta_fast_below = 0.0;  // fast theta' at y - delta
};

struct SlowBranch {
    std::vector<SlowSample> points;
    std::string start;
    std::string end;
};

struct TurningPoint {
    double theta = 0.0;
    double y = 0.0;
};

struct SlowTrace {
    std::vector<SlowBranch> branches;
    std::vector<TurningPoint> turning_points;
    bool degenerate = false;
    std::vector<std::string> notes;
};

struct TraceOptions {
    double theta_a = 0.0;  // 0 selects the lower plateau boundary (cot theta = 1)
    double theta_b = 0.0;  // 0 selects the upper plateau boundary (cot theta = -1)
    int samples = 401;
    Window window{};
    int intervals = 4000;
    double plateau_gap = 1e-9;
};

/// Continuation of the slow-manifold branches over a theta grid with reduced-flow and
/// fast-fibre samples. Branches split where dB/ds changes sign (turning points).
[[nodiscard]] SlowTrace trace_slow_dynamics(const SPProblem& spp, const TraceOptions& options = {});

}  // namespace filippov
