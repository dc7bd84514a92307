#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace filippov {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator/(Vec2 a, double s) noexcept { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

[[nodiscard]] constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
[[nodiscard]] constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
[[nodiscard]] inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
[[nodiscard]] inline double distance(Vec2 a, Vec2 b) noexcept { return norm(a - b); }

/// Signed angle in (-pi, pi] rotating `from` onto `to` by the smallest angle.
[[nodiscard]] inline double signed_angle(Vec2 from, Vec2 to) noexcept {
    return std::atan2(cross(from, to), dot(from, to));
}

/// Distance from `p` to the closed segment [a, b].
[[nodiscard]] double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) noexcept;

/// Even-odd point-in-polygon test; the polygon may or may not repeat its first vertex.
[[nodiscard]] bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon) noexcept;

/// Distance from `p` to the polyline through `vertices` (segments between consecutive vertices).
[[nodiscard]] double point_polyline_distance(Vec2 p, std::span<const Vec2> vertices) noexcept;

/// Signed shoelace area; positive for counterclockwise vertex order.
[[nodiscard]] double signed_area(std::span<const Vec2> polygon) noexcept;

/// True when no two non-adjacent segments of the closed polygon intersect.
[[nodiscard]] bool is_simple_polygon(std::span<const Vec2> polygon);

}  // namespace filippov
