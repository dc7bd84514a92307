#include "filippov/geometry.hpp"

#include <algorithm>
#include <limits>

namespace filippov {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) noexcept {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon) noexcept {
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = polygon[i];
        const Vec2 b = polygon[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xi) inside = !inside;
        }
    }
    return inside;
}

double point_polyline_distance(Vec2 p, std::span<const Vec2> vertices) noexcept {
    if (vertices.empty()) return std::numeric_limits<double>::infinity();
    if (vertices.size() == 1) return distance(p, vertices[0]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        best = std::min(best, point_segment_distance(p, vertices[i], vertices[i + 1]));
    }
    return best;
}

double signed_area(std::span<const Vec2> polygon) noexcept {
    double twice = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        twice += cross(polygon[i], polygon[(i + 1) % n]);
    }
    return 0.5 * twice;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

bool is_simple_polygon(std::span<const Vec2> polygon) {
    std::vector<Vec2> v(polygon.begin(), polygon.end());
    if (v.size() > 1 && v.front() == v.back()) v.pop_back();
    const std::size_t n = v.size();
    if (n < 3) return false;

    // Sweep over x-sorted segment extents; adjacent segments share a vertex and are skipped.
    struct Seg {
        double xmin, xmax;
        std::size_t i;
    };
    std::vector<Seg> segs;
    segs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = v[i];
        const Vec2 b = v[(i + 1) % n];
        segs.push_back({std::min(a.x, b.x), std::max(a.x, b.x), i});
    }
    std::sort(segs.begin(), segs.end(), [](const Seg& l, const Seg& r) { return l.xmin < r.xmin; });
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = k + 1; m < n && segs[m].xmin <= segs[k].xmax; ++m) {
            const std::size_t i = segs[k].i;
            const std::size_t j = segs[m].i;
            const std::size_t d = i > j ? i - j : j - i;
            if (d == 1 || d == n - 1) continue;
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
        }
    }
    return true;
}

}  // namespace filippov
