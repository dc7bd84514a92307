#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "filippov/flow.hpp"
#include "filippov/system.hpp"

namespace filippov {

enum class CanardKind { I, II, III };

[[nodiscard]] const char* to_string(CanardKind kind) noexcept;

struct CycleSegment {
    Regime regime = Regime::X1Arc;
    std::vector<Vec2> points;
};

/// Closed curve made of regime-tagged pieces; the last point of each segment is the
/// first point of the next, and the last segment ends where the first begins.
struct CanardCycle {
    std::vector<CycleSegment> segments;

    /// Vertices in order with junctions kept once; closed (first == last).
    [[nodiscard]] std::vector<Vec2> polyline() const;
    [[nodiscard]] double closure_gap() const;
};

struct HSample {
    double s = 0.0;
    double h = 0.0;
};

struct Interval {
    double a = 0.0;
    double b = 0.0;
};

struct CanardOptions {
    double window_a = -5.0;   // fold census window on Sigma (chart parameter)
    double window_b = 5.0;
    int h_samples = 2000;
    double polyline_step = 0.05;  // spatial sampling of the assembled cycle
    FlowSettings flow{};
};

struct CanardReport {
    bool found = false;
    std::optional<CanardKind> kind;
    CanardCycle cycle;
    std::optional<FoldPoint> fold;
    Vec2 a{};
    Vec2 b{};
    double s_a = 0.0;
    double s_b = 0.0;
    std::vector<Interval> sliding_intervals;
    std::vector<Interval> escaping_intervals;
    bool hyperbolic = false;
    std::string certificate;

    // Geometric conditions and the zero-free-H route, computed independently.
    bool focal = false;
    bool normals_opposite = false;  // X1f * X2f < 0 on (A, B]
    bool independent = false;       // det[X1 X2] bounded away from 0 on [A, B]
    bool h_defined = false;
    bool h_zero_free = false;
    bool orientation_ok = false;    // sliding flow on [A, B] runs from B towards A
    bool theorem_a = false;
    bool corollary = false;

    std::vector<PseudoEquilibrium> pseudo_equilibria;
    std::vector<HSample> h_samples;
    std::vector<std::string> diagnostics;
};

/// Canard detector for systems with a single visible Sigma-fold.
/// Throws PreconditionError when the census does not find exactly one visible fold
/// and NumericError when the fold arc does not return.
[[nodiscard]] CanardReport detect_canard_one_fold(const NonSmoothSystem& sys, const CanardOptions& options = {});

/// Kind from the junction structure of a closed tagged curve. Throws PreconditionError
/// naming the offending junction when the curve violates the transition rules.
[[nodiscard]] CanardKind classify_kind(const NonSmoothSystem& sys, const CanardCycle& cycle,
                                       const Tolerances& tol = {});

struct HyperbolicityCertificate {
    bool hyperbolic = false;
    std::string method;
    double multiplier = 0.0;  // kind I: derivative of the first-return map
    double error = 0.0;       // kind I: Richardson error bar
    std::string detail;
};

[[nodiscard]] HyperbolicityCertificate is_hyperbolic(const NonSmoothSystem& sys, const CanardCycle& cycle,
                                                     CanardKind kind, const FlowSettings& settings = {});

struct ScanRow {
    double mu = 0.0;
    int zeros = 0;
    int sign_h_at_b = 0;
    int proposition_case = 0;  // 1, 2, 3 or 0 when none applies
    std::string verdict;
    double s_a = 0.0;
    double s_b = 0.0;
    double extreme_h = 0.0;  // max H on (A, B) when H(A) < 0, min H otherwise
    double margin = 0.0;     // extremum signed so that the canard side is negative
    std::string error;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    std::optional<double> bifurcation_mu;
    std::optional<double> bifurcation_s;  // where H touches zero at the bifurcation
};

using SystemFamily = std::function<NonSmoothSystem(double mu)>;

/// Sigma-loop scan over mu in [mu_a, mu_b] with `n` samples; the bifurcation between
/// a canard row and a row with pseudo-equilibria is located by bisection on the
/// extremum of H over (A, B).
[[nodiscard]] ScanResult sigma_loop_scan(const SystemFamily& family, double mu_a, double mu_b, int n,
                                         const CanardOptions& options = {});

}  // namespace filippov
