#pragma once

#include <optional>
#include <string>
#include <vector>

#include "filippov/system.hpp"

namespace filippov {

enum class Regime { X1Arc, X2Arc, Sliding };

enum class ArcEnd { CrossedSigma, HitFold, HitPseudoEquilibrium, HitSection, TimeBudget, LeftDomain };

[[nodiscard]] const char* to_string(Regime regime) noexcept;
[[nodiscard]] const char* to_string(ArcEnd end) noexcept;
[[nodiscard]] Regime regime_of(Field field) noexcept;

struct ArcPoint {
    double t = 0.0;
    Vec2 q{};
};

struct Arc {
    Regime regime = Regime::X1Arc;
    std::vector<ArcPoint> points;
    ArcEnd end = ArcEnd::TimeBudget;
    std::optional<Field> fold_field;  // set when end == HitFold
    bool escaping = false;            // sliding arcs on the escaping region

    [[nodiscard]] Vec2 start() const { return points.front().q; }
    [[nodiscard]] Vec2 finish() const { return points.back().q; }
    [[nodiscard]] double duration() const { return points.back().t - points.front().t; }
};

/// Transversal segment used as an extra stopping surface.
struct Section {
    Vec2 a{};
    Vec2 b{};
    int direction = 0;  // +1 / -1 restricts the crossing direction relative to the left normal of a->b

    [[nodiscard]] Vec2 normal() const { return {a.y - b.y, b.x - a.x}; }
    [[nodiscard]] double signed_distance(Vec2 q) const { return dot(q - a, normal()) / norm(normal()); }
    /// Coordinate of the projection of q along the segment, 0 at a and 1 at b.
    [[nodiscard]] double coordinate(Vec2 q) const { return dot(q - a, b - a) / dot(b - a, b - a); }
    [[nodiscard]] Vec2 at(double u) const { return a + u * (b - a); }
};

struct FlowSettings {
    double t_max = 1e3;
    double rtol = 1e-10;
    double atol = 1e-12;
    double domain_radius = 1e6;
    double event_tol = 1e-10;
    std::size_t max_points = 100'000;
    double max_step_length = 0.0;  // > 0 caps the distance travelled per step (dense polylines)
    Tolerances tol{};
};

struct StopSpec {
    bool sigma_crossing = true;
    bool folds = true;               // sliding arcs: leaving the sliding/escaping region
    bool pseudo_equilibria = true;   // sliding arcs: |X0^Sigma| falling below 1e-10
    std::optional<Section> section;  // any regime
};

/// One smooth piece of a Filippov trajectory: an X1 arc (stops on reaching
/// {f = 0} from above), an X2 arc (from below), or a sliding/escaping arc on Sigma.
[[nodiscard]] Arc integrate_arc(const NonSmoothSystem& sys, Regime regime, Vec2 q0,
                                const FlowSettings& settings = {}, const StopSpec& stop = {});

enum class Transition { SewingCrossing, SlidingEntry, FoldExit };

[[nodiscard]] const char* to_string(Transition transition) noexcept;

struct Junction {
    Transition kind = Transition::SewingCrossing;
    double t = 0.0;
    Vec2 point{};
};

struct HybridOrbit {
    std::vector<Arc> arcs;
    std::vector<Junction> transitions;  // transitions[i] joins arcs[i] and arcs[i + 1]
    std::string diagnostic;             // why the orbit stopped early, empty on t_max
    bool hit_section = false;

    [[nodiscard]] Vec2 finish() const { return arcs.back().finish(); }
    [[nodiscard]] double duration() const { return arcs.back().points.back().t; }
    /// All samples in order, junction points kept once.
    [[nodiscard]] std::vector<ArcPoint> samples() const;
};

/// Forward Filippov orbit: crosses at sewing points, enters sliding on Sigma3,
/// leaves sliding only tangentially at visible folds. Escaping arcs are followed
/// only when the orbit starts on the escaping region.
/// With `stop_at` set the orbit also ends on its first crossing of that section.
[[nodiscard]] HybridOrbit hybrid_orbit(const NonSmoothSystem& sys, Vec2 q0, const FlowSettings& settings = {},
                                       const std::optional<Section>& stop_at = {});

enum class ArcKind { Focal, Graphic, Neither };

[[nodiscard]] const char* to_string(ArcKind kind) noexcept;

struct ArcKindResult {
    ArcKind kind = ArcKind::Neither;
    Field field = Field::X1;
    Vec2 fold{};
    Vec2 ret{};        // first transversal return B
    double s_fold = 0.0;
    double s_return = 0.0;
    int folds_between = 0;
    Arc arc;
};

/// Integrate the arc leaving a visible fold and count folds strictly between the
/// fold and its first return to Sigma: none gives Focal, exactly one Graphic.
[[nodiscard]] ArcKindResult arc_kind(const NonSmoothSystem& sys, Vec2 fold, const FlowSettings& settings = {});

/// Keep at most `max_points` samples, always retaining both endpoints.
void decimate(std::vector<ArcPoint>& points, std::size_t max_points);

}  // namespace filippov
