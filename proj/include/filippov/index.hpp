#pragma once

#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "filippov/system.hpp"

namespace filippov {

struct JumpRecord {
    Vec2 point{};
    Field from = Field::X1;
    Field to = Field::X2;
    Vec2 before{};
    Vec2 after{};
    double angle = 0.0;  // smallest signed rotation from `before` to `after`
};

struct InteriorPoint {
    Vec2 point{};
    std::string kind;  // "X1 saddle", "X2 focus/node", "SigmaAttractor", ...
    int index = 0;
};

struct IndexReport {
    int index = 0;
    double total_angle = 0.0;
    double raw_winding = 0.0;  // total_angle / 2 pi before rounding
    std::vector<JumpRecord> jumps;
    std::vector<InteriorPoint> interior;
};

struct WindingOptions {
    int min_samples = 400;  // initial subdivision of the whole path
    double max_angle_step = std::numbers::pi / 2.0;
    int max_depth = 48;
    double singular_margin = 1e-6;
    Tolerances tol{};
};

/// Counterclockwise circle as a closed polyline with n distinct vertices.
[[nodiscard]] std::vector<Vec2> circle_path(Vec2 centre, double radius, int n = 720);

/// Winding of the field along a simple closed path in its traversal direction: smooth
/// angle increments of the side field plus the smallest-angle jump between the
/// one-sided fields at each Sigma crossing.
/// Throws DomainError on an antipodal jump and PreconditionError when the field
/// vanishes on the path or the path meets a Sigma-singular point.
[[nodiscard]] IndexReport angle_winding(const NonSmoothSystem& sys, std::span<const Vec2> path,
                                        const WindingOptions& options = {});

struct SingularityIndex {
    int index = 0;
    int expected = 0;  // from the linear / pseudo-equilibrium classification
    double radius = 0.0;
    std::string kind;
};

/// Index of a hyperbolic equilibrium of X1 or X2, or of a hyperbolic pseudo-equilibrium,
/// from windings on shrinking circles; NumericError if winding and classification disagree.
[[nodiscard]] SingularityIndex index_of_singularity(const NonSmoothSystem& sys, Vec2 p,
                                                    const WindingOptions& options = {});

struct TheoremCReport {
    int winding = 0;
    int interior_sum = 0;
    int saddles = 0;
    int non_saddles = 0;
    bool holds = false;           // winding == interior sum == 1
    bool corollary_split = false; // non_saddles == saddles + 1
    std::string verdict;
    IndexReport path_report;      // winding along the offset path, with the census attached
};

struct CensusOptions {
    int grid = 50;
    double offset = 1e-3;  // relative radial shrink of the cycle towards its centroid
    WindingOptions winding{};
};

/// Critical points strictly inside the polygon: equilibria of X1 in {f > 0}, of X2 in
/// {f < 0} (Newton from a grid over the bounding box) and pseudo-equilibria on Sigma.
[[nodiscard]] std::vector<InteriorPoint> interior_census(const NonSmoothSystem& sys, std::span<const Vec2> polygon,
                                                         const CensusOptions& options = {});

[[nodiscard]] TheoremCReport verify_theorem_c(const NonSmoothSystem& sys, std::span<const Vec2> cycle,
                                              const CensusOptions& options = {});

}  // namespace filippov
