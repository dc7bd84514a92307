#include "filippov/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "filippov/errors.hpp"
#include "numerics.hpp"

namespace filippov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string at(Vec2 q) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.9g, %.9g)", q.x, q.y);
    return buf;
}

struct Piece {
    Vec2 a{};
    Vec2 b{};
    Field side = Field::X1;
};

std::vector<Vec2> closed_copy(std::span<const Vec2> path, bool counterclockwise = false) {
    std::vector<Vec2> pts(path.begin(), path.end());
    if (pts.size() < 3) throw PreconditionError("closed path needs at least three vertices");
    if (pts.front() != pts.back()) pts.push_back(pts.front());
    if (pts.size() < 4) throw PreconditionError("closed path needs at least three distinct vertices");
    if (counterclockwise && signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
    return pts;
}

int side_sign(double f) { return f > 0.0 ? 1 : (f < 0.0 ? -1 : 0); }

// Split the path into pieces lying in a single closed half-plane of f.
std::vector<Piece> split_path(const NonSmoothSystem& sys, const std::vector<Vec2>& pts, int min_samples) {
    double perimeter = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) perimeter += distance(pts[i - 1], pts[i]);
    const double h0 = perimeter / std::max(min_samples, 1);

    std::vector<Piece> pieces;
    const auto emit = [&](Vec2 a, Vec2 b) {
        if (a == b) return;
        const Vec2 mid = 0.5 * (a + b);
        const int s = side_sign(sys.f(mid));
        if (s == 0) throw PreconditionError("path runs along Sigma near " + at(mid));
        pieces.push_back({a, b, s > 0 ? Field::X1 : Field::X2});
    };

    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec2 p = pts[i - 1];
        const Vec2 q = pts[i];
        const int m = std::max(1, static_cast<int>(std::ceil(distance(p, q) / h0)));
        for (int j = 0; j < m; ++j) {
            const Vec2 u = p + (static_cast<double>(j) / m) * (q - p);
            const Vec2 v = p + (static_cast<double>(j + 1) / m) * (q - p);
            const auto f_at = [&](double t) { return sys.f(u + t * (v - u)); };
            // Breakpoints where the side changes, located between five samples.
            std::vector<double> breaks;
            double t_prev = 0.0;
            double f_prev = f_at(0.0);
            for (int k = 1; k <= 4; ++k) {
                const double t = k / 4.0;
                const double fk = f_at(t);
                if (f_prev * fk < 0.0) {
                    breaks.push_back(detail::refine_root(f_at, t_prev, t, f_prev, fk, 1e-15));
                } else if (fk == 0.0 && k < 4) {
                    const double f_next = f_at((k + 1) / 4.0);
                    if (f_prev * f_next < 0.0) breaks.push_back(t);
                }
                t_prev = t;
                f_prev = fk;
            }
            Vec2 start = u;
            for (double t : breaks) {
                const Vec2 c = u + t * (v - u);
                emit(start, c);
                start = c;
            }
            emit(start, v);
        }
    }
    if (pieces.empty()) throw PreconditionError("degenerate path");
    return pieces;
}

Vec2 field_on_path(const NonSmoothSystem& sys, Field side, Vec2 q) {
    const Vec2 v = sys.eval(side, q);
    if (!(norm(v) > 1e-14 * (1.0 + norm(q)))) {
        throw PreconditionError(std::string("field ") + to_string(side) + " vanishes on the path at " + at(q));
    }
    return v;
}

double smooth_angle(const NonSmoothSystem& sys, Field side, Vec2 a, Vec2 b, Vec2 va, Vec2 vb,
                    const WindingOptions& opt, int depth) {
    const double d = signed_angle(va, vb);
    if (std::fabs(d) < opt.max_angle_step) return d;
    if (depth >= opt.max_depth) throw NumericError("angle refinement did not converge near " + at(a));
    const Vec2 m = 0.5 * (a + b);
    const Vec2 vm = field_on_path(sys, side, m);
    return smooth_angle(sys, side, a, m, va, vm, opt, depth + 1) + smooth_angle(sys, side, m, b, vm, vb, opt, depth + 1);
}

void check_crossing(const NonSmoothSystem& sys, Vec2 c, const WindingOptions& opt) {
    if (norm(sys.grad_f(c)) < opt.tol.gradient_min) throw PreconditionError("path crosses a singular point of f at " + at(c));
    const Vec2 v1 = sys.eval(Field::X1, c);
    const Vec2 v2 = sys.eval(Field::X2, c);
    const double margin = opt.singular_margin * (1.0 + std::max(norm(v1), norm(v2)));
    const double l1 = sys.lie(Field::X1, 1, c);
    const double l2 = sys.lie(Field::X2, 1, c);
    if (std::fabs(l1) <= margin || std::fabs(l2) <= margin) {
        throw PreconditionError("path crosses Sigma at a fold (within margin) at " + at(c));
    }
    if (l1 * l2 < 0.0 && norm(sliding_field(sys, c, opt.tol)) <= margin) {
        throw PreconditionError("path crosses Sigma at a pseudo-equilibrium (within margin) at " + at(c));
    }
}

}  // namespace

std::vector<Vec2> circle_path(Vec2 centre, double radius, int n) {
    if (n < 3) throw PreconditionError("circle needs at least three vertices");
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k < n; ++k) {
        const double t = kTwoPi * k / n;
        pts.push_back({centre.x + radius * std::cos(t), centre.y + radius * std::sin(t)});
    }
    pts.push_back(pts.front());
    return pts;
}

IndexReport angle_winding(const NonSmoothSystem& sys, std::span<const Vec2> path, const WindingOptions& options) {
    const std::vector<Vec2> pts = closed_copy(path);
    if (!is_simple_polygon(pts)) throw PreconditionError("path is not simple");
    const std::vector<Piece> pieces = split_path(sys, pts, options.min_samples);

    IndexReport rep;
    double total = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const Piece& p = pieces[k];
        const Vec2 va = field_on_path(sys, p.side, p.a);
        const Vec2 vb = field_on_path(sys, p.side, p.b);
        total += smooth_angle(sys, p.side, p.a, p.b, va, vb, options, 0);

        const Piece& next = pieces[(k + 1) % pieces.size()];
        if (next.side == p.side) continue;
        const Vec2 c = p.b;
        check_crossing(sys, c, options);
        JumpRecord j;
        j.point = c;
        j.from = p.side;
        j.to = next.side;
        j.before = vb;
        j.after = field_on_path(sys, next.side, next.a);
        j.angle = signed_angle(j.before, j.after);
        if (std::fabs(std::fabs(j.angle) - std::numbers::pi) <= 1e-9) {
            throw DomainError("antipodal jump at " + at(c) + ": the smallest angle is undefined");
        }
        total += j.angle;
        rep.jumps.push_back(j);
    }
    rep.total_angle = total;
    rep.raw_winding = total / kTwoPi;
    const double rounded = std::round(rep.raw_winding);
    if (std::fabs(rep.raw_winding - rounded) > 1e-6) {
        throw NumericError("winding is not an integer: " + std::to_string(rep.raw_winding));
    }
    rep.index = static_cast<int>(rounded);
    return rep;
}

SingularityIndex index_of_singularity(const NonSmoothSystem& sys, Vec2 p, const WindingOptions& options) {
    SingularityIndex out;
    double r0 = 1e-2;
    if (std::fabs(sys.f(p)) <= options.tol.on_manifold * (1.0 + norm(p))) {
        const PseudoEquilibrium pe = classify_pseudo_equilibrium(sys, sys.chart().param(p), false, options.tol);
        if (pe.kind == PseudoKind::NonHyperbolic) throw PreconditionError("non-hyperbolic pseudo-equilibrium at " + at(p));
        out.expected = pe.kind == PseudoKind::SigmaSaddle ? -1 : 1;
        out.kind = to_string(pe.kind);
    } else {
        const Field w = sys.f(p) > 0.0 ? Field::X1 : Field::X2;
        const VectorField& X = sys.field(w);
        const Vec2 v = X(p);
        if (norm(v) > 1e-8 * (1.0 + norm(p))) throw PreconditionError("not a critical point: " + at(p));
        const double a = X.x.derivative(Var::X).eval(p.x, p.y);
        const double b = X.x.derivative(Var::Y).eval(p.x, p.y);
        const double c = X.y.derivative(Var::X).eval(p.x, p.y);
        const double d = X.y.derivative(Var::Y).eval(p.x, p.y);
        const double det = a * d - b * c;
        const double tr = a + d;
        const double scale = 1.0 + a * a + b * b + c * c + d * d;
        if (std::fabs(det) <= 1e-12 * scale || (det > 0.0 && std::fabs(tr) <= 1e-12 * std::sqrt(scale))) {
            throw PreconditionError("non-hyperbolic equilibrium at " + at(p));
        }
        out.expected = det < 0.0 ? -1 : 1;
        out.kind = std::string(to_string(w)) + (det < 0.0 ? " saddle" : (tr * tr < 4.0 * det ? " focus" : " node"));
        const double g = norm(sys.grad_f(p));
        if (g > 0.0) r0 = std::min(r0, 0.5 * std::fabs(sys.f(p)) / g);
    }

    double r = r0;
    int prev = angle_winding(sys, circle_path(p, r, 360), options).index;
    bool agreed = false;
    for (int i = 0; i < 30; ++i) {
        r *= 0.5;
        const int cur = angle_winding(sys, circle_path(p, r, 360), options).index;
        if (cur == prev) {
            agreed = true;
            break;
        }
        prev = cur;
    }
    if (!agreed) throw NumericError("winding around " + at(p) + " does not stabilise under radius halving");
    out.index = prev;
    out.radius = r;
    if (out.index != out.expected) {
        throw NumericError("winding index " + std::to_string(out.index) + " disagrees with classification (" +
                           out.kind + ", expected " + std::to_string(out.expected) + ") at " + at(p));
    }
    return out;
}

namespace {

struct Jacobian {
    Expr xx, xy, yx, yy;
};

std::optional<Vec2> newton(const VectorField& X, const Jacobian& J, Vec2 q) {
    for (int it = 0; it < 60; ++it) {
        Vec2 v;
        double a, b, c, d;
        try {
            v = X(q);
            a = J.xx.eval(q.x, q.y);
            b = J.xy.eval(q.x, q.y);
            c = J.yx.eval(q.x, q.y);
            d = J.yy.eval(q.x, q.y);
        } catch (const DomainError&) {
            return std::nullopt;
        }
        if (norm(v) <= 1e-13 * (1.0 + norm(q))) return q;
        const double det = a * d - b * c;
        if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
        const Vec2 step{(d * v.x - b * v.y) / det, (-c * v.x + a * v.y) / det};
        q = q - step;
        if (!std::isfinite(q.x) || !std::isfinite(q.y)) return std::nullopt;
        if (norm(step) <= 1e-15 * (1.0 + norm(q))) {
            return norm(X(q)) <= 1e-9 * (1.0 + norm(q)) ? std::optional<Vec2>(q) : std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<InteriorPoint> interior_census(const NonSmoothSystem& sys, std::span<const Vec2> polygon,
                                           const CensusOptions& options) {
    const std::vector<Vec2> poly = closed_copy(polygon);
    Vec2 lo = poly.front(), hi = poly.front();
    for (const Vec2& q : poly) {
        lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
        hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
    }
    const double scale = 1.0 + std::max(norm(lo), norm(hi));
    const auto strictly_inside = [&](Vec2 q) {
        return point_in_polygon(q, poly) && point_polyline_distance(q, poly) > 1e-9 * scale;
    };

    std::vector<InteriorPoint> found;
    const auto known = [&](Vec2 q) {
        return std::any_of(found.begin(), found.end(),
                           [&](const InteriorPoint& ip) { return distance(ip.point, q) <= 1e-7 * (1.0 + norm(q)); });
    };

    const int n = std::max(options.grid, 2);
    for (const Field w : {Field::X1, Field::X2}) {
        const VectorField& X = sys.field(w);
        const Jacobian J{X.x.derivative(Var::X), X.x.derivative(Var::Y), X.y.derivative(Var::X),
                         X.y.derivative(Var::Y)};
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const Vec2 seed{lo.x + (i + 0.5) * (hi.x - lo.x) / n, lo.y + (j + 0.5) * (hi.y - lo.y) / n};
                const auto root = newton(X, J, seed);
                if (!root) continue;
                const double fq = sys.f(*root);
                const double band = options.winding.tol.on_manifold * (1.0 + norm(*root));
                const bool own_side = w == Field::X1 ? fq > band : fq < -band;
                if (!own_side || !strictly_inside(*root) || known(*root)) continue;
                const SingularityIndex si = index_of_singularity(sys, *root, options.winding);
                found.push_back({*root, si.kind, si.index});
            }
        }
    }

    const SigmaChart& chart = sys.chart();
    double a = chart.s_min(), b = chart.s_max();
    if (!std::isfinite(a) || !std::isfinite(b)) {
        a = std::numeric_limits<double>::infinity();
        b = -a;
        for (const Vec2 corner : {lo, hi, Vec2{lo.x, hi.y}, Vec2{hi.x, lo.y}}) {
            const double s = chart.param(corner);
            a = std::min(a, s);
            b = std::max(b, s);
        }
    }
    for (const PseudoEquilibrium& pe : pseudo_equilibria(sys, a, b, 4000, options.winding.tol)) {
        if (!strictly_inside(pe.point) || known(pe.point)) continue;
        const SingularityIndex si = index_of_singularity(sys, pe.point, options.winding);
        found.push_back({pe.point, si.kind, si.index});
    }
    return found;
}

TheoremCReport verify_theorem_c(const NonSmoothSystem& sys, std::span<const Vec2> cycle, const CensusOptions& options) {
    const std::vector<Vec2> poly = closed_copy(cycle, true);
    const double area = signed_area(poly);
    if (area == 0.0) throw PreconditionError("cycle encloses no area");
    Vec2 c{};
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const double w = cross(poly[i], poly[i + 1]);
        c += w * (poly[i] + poly[i + 1]);
    }
    c = c / (6.0 * area);
    if (!point_in_polygon(c, poly)) throw PreconditionError("centroid of the cycle lies outside it");

    std::vector<Vec2> offset;
    offset.reserve(poly.size());
    for (const Vec2& q : poly) offset.push_back(c + (1.0 - options.offset) * (q - c));

    TheoremCReport rep;
    rep.path_report = angle_winding(sys, offset, options.winding);
    rep.path_report.interior = interior_census(sys, poly, options);
    rep.winding = rep.path_report.index;
    for (const InteriorPoint& ip : rep.path_report.interior) {
        rep.interior_sum += ip.index;
        (ip.index < 0 ? rep.saddles : rep.non_saddles) += 1;
    }
    rep.holds = rep.winding == rep.interior_sum && rep.interior_sum == 1;
    rep.corollary_split = rep.non_saddles == rep.saddles + 1;
    if (!rep.path_report.interior.empty() && rep.non_saddles == 0) {
        rep.verdict = "no canard cycles: every interior critical point is a saddle";
    } else if (rep.winding != rep.interior_sum) {
        rep.verdict = "census failure: interior index sum " + std::to_string(rep.interior_sum) +
                      " differs from the winding " + std::to_string(rep.winding);
    } else if (rep.holds) {
        rep.verdict = "winding = interior index sum = 1";
    } else {
        rep.verdict = "index sum " + std::to_string(rep.interior_sum) + " is not 1: not a hyperbolic canard cycle";
    }
    return rep;
}

}  // namespace filippov
