#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "filippov/flow.hpp"
#include "filippov/system.hpp"

namespace filippov {

/// Monotone ramp equal to -1 on (-inf, -1] and 1 on [1, inf).
class TransitionFunction {
public:
    enum class Family { Quintic, Cubic, Table };

    /// (15x - 10x^3 + 3x^5) / 8, C^2 at the plateau boundaries.
    [[nodiscard]] static TransitionFunction quintic();
    /// (3x - x^3) / 2, C^1 at the plateau boundaries.
    [[nodiscard]] static TransitionFunction cubic();
    /// Piecewise-linear interpolation of (x, phi) nodes; the nodes must start at
    /// (-1, -1), end at (1, 1) and be strictly increasing in both coordinates.
    [[nodiscard]] static TransitionFunction table(std::vector<std::pair<double, double>> nodes);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] std::string name() const;

private:
    Family family_ = Family::Quintic;
    std::vector<std::pair<double, double>> nodes_;
};

/// X_eps = (1/2 + phi(f/eps)/2) X1 + (1/2 - phi(f/eps)/2) X2.
class RegularizedField {
public:
    RegularizedField(NonSmoothSystem sys, double epsilon, TransitionFunction phi = TransitionFunction::quintic());

    [[nodiscard]] Vec2 operator()(Vec2 q) const;
    /// Weight of X1 in the blend; exactly 1 where f >= eps and exactly 0 where f <= -eps.
    [[nodiscard]] double weight(Vec2 q) const;
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] const NonSmoothSystem& system() const noexcept { return sys_; }
    [[nodiscard]] const TransitionFunction& transition() const noexcept { return phi_; }

private:
    NonSmoothSystem sys_;
    double epsilon_;
    TransitionFunction phi_;
};

struct CycleEstimate {
    std::vector<ArcPoint> polyline;  // closed: last point returns to the section
    double period = 0.0;
    double multiplier = 0.0;
    double multiplier_error = 0.0;
    bool hyperbolic = false;  // |multiplier - 1| > 3 * error
    Section section;
    double u = 0.0;  // fixed point on the section, in [0, 1]
    double closure_gap = 0.0;
    int iterations = 0;
};

struct CycleOptions {
    double t_max = 1e3;
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step_length = 0.05;  // spatial sampling cap outside the strip
    int max_iterations = 50;
};

/// Fixed point of the first-return map on `section` by secant iteration from `guess`
/// (section coordinate in [0, 1]); multiplier by two-offset Richardson differences.
[[nodiscard]] CycleEstimate find_limit_cycle(const RegularizedField& field, const Section& section, double guess,
                                             const CycleOptions& options = {});

/// Symmetric Hausdorff distance between polylines, vertices measured to segments.
[[nodiscard]] double hausdorff(std::span<const Vec2> p, std::span<const Vec2> q);

/// Section along grad f through the vertex of `cycle` where |f| is largest.
[[nodiscard]] Section automatic_section(const NonSmoothSystem& sys, std::span<const Vec2> cycle);

struct StudyRow {
    double epsilon = 0.0;
    bool found = false;
    double hausdorff = 0.0;
    double multiplier = 0.0;
    double multiplier_error = 0.0;
    double period = 0.0;
    std::string error;
    std::vector<Vec2> cycle;
};

struct ConvergenceStudy {
    std::vector<StudyRow> rows;
    bool strictly_decreasing = false;
};

/// Limit cycles of X_eps for each eps (decreasing), seeded by continuation from the
/// previous row, and their Hausdorff distance to gamma0.
[[nodiscard]] ConvergenceStudy convergence_study(const NonSmoothSystem& sys, std::span<const Vec2> gamma0,
                                                 std::span<const double> epsilons,
                                                 const TransitionFunction& phi = TransitionFunction::quintic(),
                                                 const CycleOptions& options = {});

}  // namespace filippov
