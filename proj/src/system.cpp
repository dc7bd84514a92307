#include "filippov/system.hpp"

#include <algorithm>
#include <cmath>

#include "filippov/errors.hpp"
#include "numerics.hpp"

namespace filippov {

const char* to_string(Field field) noexcept { return field == Field::X1 ? "X1" : "X2"; }

const char* to_string(Region region) noexcept {
    switch (region) {
        case Region::Sewing: return "Sewing";
        case Region::Escaping: return "Escaping";
        case Region::Sliding: return "Sliding";
        case Region::FoldVisible: return "FoldVisible";
        case Region::FoldInvisible: return "FoldInvisible";
        case Region::PseudoEquilibrium: return "PseudoEquilibrium";
        case Region::Degenerate: return "Degenerate";
    }
    return "?";
}

const char* to_string(PseudoKind kind) noexcept {
    switch (kind) {
        case PseudoKind::SigmaSaddle: return "SigmaSaddle";
        case PseudoKind::SigmaAttractor: return "SigmaAttractor";
        case PseudoKind::SigmaRepeller: return "SigmaRepeller";
        case PseudoKind::NonHyperbolic: return "NonHyperbolic";
    }
    return "?";
}

std::string SigmaClass::label() const {
    switch (region) {
        case Region::FoldVisible:
        case Region::FoldInvisible:
            return std::string(to_string(region)) + "(" + to_string(field) + ")";
        case Region::PseudoEquilibrium:
            return std::string(to_string(region)) + "(" + to_string(pseudo) + ")";
        case Region::Degenerate:
            return reason.empty() ? std::string("Degenerate") : "Degenerate(" + reason + ")";
        default: return to_string(region);
    }
}

// ------------------------------------------------------------------ chart

struct SigmaChart::CurveTable {
    Expr f, fx, fy;
    double h = 2e-3;
    std::vector<Vec2> nodes;  // nodes[i] sits at s_min + i * h

    [[nodiscard]] Vec2 grad(Vec2 q) const { return {fx.eval(q.x, q.y), fy.eval(q.x, q.y)}; }

    [[nodiscard]] Vec2 unit_tangent(Vec2 q) const {
        const Vec2 g = grad(q);
        const double n = norm(g);
        if (n == 0.0) throw PreconditionError("switching function has a singular point on Sigma");
        return {g.y / n, -g.x / n};
    }

    [[nodiscard]] Vec2 project(Vec2 q) const {
        for (int it = 0; it < 30; ++it) {
            const double v = f.eval(q.x, q.y);
            if (std::fabs(v) <= 1e-15 * (1.0 + norm(q))) break;
            const Vec2 g = grad(q);
            const double g2 = dot(g, g);
            if (g2 == 0.0) throw PreconditionError("switching function has a singular point on Sigma");
            q -= (v / g2) * g;
        }
        return q;
    }

    [[nodiscard]] Vec2 advance(Vec2 q, double ds) const {
        const Vec2 k1 = unit_tangent(q);
        const Vec2 k2 = unit_tangent(q + 0.5 * ds * k1);
        const Vec2 k3 = unit_tangent(q + 0.5 * ds * k2);
        const Vec2 k4 = unit_tangent(q + ds * k3);
        return project(q + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
};

Vec2 SigmaChart::point(double s) const {
    if (kind_ != Kind::Curve) return origin_ + s * direction_;
    if (closed()) {
        s = std::fmod(s - s_min_, period_);
        if (s < 0.0) s += period_;
        s += s_min_;
    } else if (s < s_min_ - 1e-12 || s > s_max_ + 1e-12) {
        throw PreconditionError("parameter outside the charted part of Sigma");
    }
    const auto& t = *curve_;
    const auto last = static_cast<double>(t.nodes.size() - 1);
    const double pos = std::clamp((s - s_min_) / t.h, 0.0, last);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double ds = s - (s_min_ + static_cast<double>(i) * t.h);
    if (ds == 0.0) return t.nodes[i];
    return t.advance(t.nodes[i], ds);
}

double SigmaChart::param(Vec2 q) const {
    if (kind_ != Kind::Curve) return dot(q - origin_, direction_);
    const auto& t = *curve_;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const double d = distance(q, t.nodes[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    double s = s_min_ + static_cast<double>(best) * t.h;
    // Two Newton-like corrections along the local tangent.
    for (int it = 0; it < 3; ++it) s += dot(q - point(s), tangent(s));
    if (closed()) {
        s = std::fmod(s - s_min_, period_);
        if (s < 0.0) s += period_;
        s += s_min_;
    }
    return s;
}

Vec2 SigmaChart::tangent(double s) const {
    if (kind_ != Kind::Curve) return direction_;
    return curve_->unit_tangent(point(s));
}

// ----------------------------------------------------------------- system

NonSmoothSystem::NonSmoothSystem(VectorField x1, VectorField x2, Expr f, std::optional<Vec2> sigma_seed,
                                 double curve_extent)
    : x1_(std::move(x1)),
      x2_(std::move(x2)),
      f_(std::move(f)),
      fx_(f_.derivative(Var::X)),
      fy_(f_.derivative(Var::Y)),
      seed_(sigma_seed),
      curve_extent_(curve_extent) {
    for (const Field w : {Field::X1, Field::X2}) {
        const VectorField& X = field(w);
        const Expr first = fx_ * X.x + fy_ * X.y;
        const Expr second = first.derivative(Var::X) * X.x + first.derivative(Var::Y) * X.y;
        lie_[static_cast<int>(w)][0] = first;
        lie_[static_cast<int>(w)][1] = second;
    }
    if (f_.op() == Expr::Op::VarX) coordinate_ = Var::X;
    if (f_.op() == Expr::Op::VarY) coordinate_ = Var::Y;
    build_chart();
}

const Expr& NonSmoothSystem::lie(Field which, int order) const {
    if (order != 1 && order != 2) throw PreconditionError("Lie derivative order must be 1 or 2");
    return lie_[static_cast<int>(which)][order - 1];
}

NonSmoothSystem NonSmoothSystem::reversed() const {
    return NonSmoothSystem(-x1_, -x2_, f_, seed_, curve_extent_);
}

void NonSmoothSystem::build_chart() {
    const auto cx = fx_.constant_value();
    const auto cy = fy_.constant_value();
    if (cx && cy) {
        if (*cx == 0.0 && *cy == 0.0) throw PreconditionError("switching function is constant");
        const double c = f_.eval(0.0, 0.0);
        if (*cx == 0.0) {
            chart_.kind_ = SigmaChart::Kind::Horizontal;
            chart_.origin_ = {0.0, -c / *cy + 0.0};
            chart_.direction_ = {1.0, 0.0};
        } else if (*cy == 0.0) {
            chart_.kind_ = SigmaChart::Kind::Vertical;
            chart_.origin_ = {-c / *cx + 0.0, 0.0};
            chart_.direction_ = {0.0, 1.0};
        } else {
            const Vec2 g{*cx, *cy};
            const double n2 = dot(g, g);
            const Vec2 n = g / std::sqrt(n2);
            chart_.kind_ = SigmaChart::Kind::Line;
            chart_.origin_ = (-c / n2) * g;
            chart_.direction_ = {n.y, -n.x};
        }
        return;
    }

    auto table = std::make_shared<SigmaChart::CurveTable>();
    table->f = f_;
    table->fx = fx_;
    table->fy = fy_;

    Vec2 seed;
    if (seed_) {
        seed = table->project(*seed_);
    } else {
        // Coarse search for a sign change of f on a grid around the origin.
        std::optional<Vec2> found;
        const auto grid = detail::linspace(-5.0, 5.0, 101);
        for (std::size_t i = 0; i + 1 < grid.size() && !found; ++i) {
            for (const double yv : grid) {
                const double a = f_.eval(grid[i], yv);
                const double b = f_.eval(grid[i + 1], yv);
                if (a == 0.0 || a * b < 0.0) {
                    const auto g = [&](double t) { return f_.eval(t, yv); };
                    found = Vec2{detail::refine_root(g, grid[i], grid[i + 1], a, b), yv};
                    break;
                }
            }
        }
        if (!found) throw PreconditionError("could not locate the switching manifold; supply a seed point");
        seed = table->project(*found);
    }
    seed_ = seed;
    if (norm(table->grad(seed)) < Tolerances{}.gradient_min) {
        throw PreconditionError("seed point lies on a singular point of the switching function");
    }

    const double h = table->h;
    const auto max_nodes = static_cast<std::size_t>(std::ceil(curve_extent_ / h));

    // Forward sweep, watching for closure back onto the seed.
    std::vector<Vec2> forward{seed};
    double period = 0.0;
    double prev_d = 0.0;
    for (std::size_t k = 1; k <= max_nodes; ++k) {
        const Vec2 q = table->advance(forward.back(), h);
        const double d = distance(q, seed);
        if (k > 8 && d < 2.0 * h && d > prev_d) {
            // Passed the seed between nodes k-2 and k-1.
            const Vec2 qp = forward[k - 1];
            period = static_cast<double>(k - 1) * h + dot(seed - qp, table->unit_tangent(qp));
            break;
        }
        prev_d = d;
        forward.push_back(q);
    }
    if (period > 0.0) {
        // Rebuild exactly from the seed with spacing period / n so the table wraps cleanly.
        const auto n = static_cast<std::size_t>(std::ceil(period / h));
        table->h = period / static_cast<double>(n);
        std::vector<Vec2> nodes{seed};
        for (std::size_t k = 1; k < n; ++k) nodes.push_back(table->advance(nodes.back(), table->h));
        table->nodes = std::move(nodes);
        chart_.period_ = period;
        chart_.s_min_ = 0.0;
        chart_.s_max_ = period;
    } else {
        std::vector<Vec2> backward;
        Vec2 q = seed;
        for (std::size_t k = 1; k <= max_nodes; ++k) {
            q = table->advance(q, -h);
            backward.push_back(q);
        }
        std::vector<Vec2> nodes(backward.rbegin(), backward.rend());
        nodes.insert(nodes.end(), forward.begin(), forward.end());
        table->nodes = std::move(nodes);
        chart_.s_min_ = -static_cast<double>(backward.size()) * h;
        chart_.s_max_ = static_cast<double>(forward.size() - 1) * h;
    }
    chart_.kind_ = SigmaChart::Kind::Curve;
    chart_.origin_ = seed;
    chart_.curve_ = std::move(table);
}

// --------------------------------------------------------------- analyses

Expr lie_derivative(const NonSmoothSystem& sys, Field which, int order) { return sys.lie(which, order); }

double tangency_tolerance(const NonSmoothSystem& sys, Vec2 q, const Tolerances& tol) {
    const double mag = std::max(norm(sys.eval(Field::X1, q)), norm(sys.eval(Field::X2, q)));
    return tol.tangency_rel * (1.0 + mag);
}

namespace {

struct Frame {
    Vec2 t;
    Vec2 n;
    double grad_norm;
};

Frame frame_at(const NonSmoothSystem& sys, double s, Vec2 q, const Tolerances& tol = {}) {
    const Vec2 g = sys.grad_f(q);
    const double gn = norm(g);
    if (gn < tol.gradient_min) throw PreconditionError("degenerate frame: grad f vanishes on Sigma");
    return {sys.chart().tangent(s), g / gn, gn};
}

}  // namespace

std::pair<double, double> frame_normals(const NonSmoothSystem& sys, double z) {
    const Vec2 q = sys.chart().point(z);
    const Frame fr = frame_at(sys, z, q);
    return {dot(sys.eval(Field::X1, q), fr.n), dot(sys.eval(Field::X2, q), fr.n)};
}

double frame_determinant(const NonSmoothSystem& sys, double z) {
    const Vec2 q = sys.chart().point(z);
    const Frame fr = frame_at(sys, z, q);
    const Vec2 a = sys.eval(Field::X1, q);
    const Vec2 b = sys.eval(Field::X2, q);
    const double d1 = dot(a, fr.t), d2 = dot(a, fr.n);
    const double e1 = dot(b, fr.t), e2 = dot(b, fr.n);
    return d1 * e2 - d2 * e1;
}

double direction_function(const NonSmoothSystem& sys, double z, const Tolerances& tol) {
    const Vec2 q = sys.chart().point(z);
    const Frame fr = frame_at(sys, z, q, tol);
    const Vec2 a = sys.eval(Field::X1, q);
    const Vec2 b = sys.eval(Field::X2, q);
    const double d1 = dot(a, fr.t), d2 = dot(a, fr.n);
    const double e1 = dot(b, fr.t), e2 = dot(b, fr.n);
    const double denom = e2 - d2;
    if (std::fabs(denom) <= tol.tangency_rel * (1.0 + std::max(norm(a), norm(b)))) {
        throw DomainError("direction function undefined: X1.f = X2.f at s = " + std::to_string(z));
    }
    return (d1 * e2 - d2 * e1) / denom;
}

Vec2 sliding_field(const NonSmoothSystem& sys, Vec2 q, const Tolerances& tol) {
    const double l1 = sys.lie(Field::X1, 1, q);
    const double l2 = sys.lie(Field::X2, 1, q);
    const double tau = tangency_tolerance(sys, q, tol);
    if (l1 * l2 > 0.0 && std::fabs(l1) > tau && std::fabs(l2) > tau) {
        throw PreconditionError("point is not in the sliding or escaping region");
    }
    if (l2 == l1) throw PreconditionError("sliding field undefined: X1.f = X2.f");
    return (l2 * sys.eval(Field::X1, q) - l1 * sys.eval(Field::X2, q)) / (l2 - l1);
}

PseudoEquilibrium classify_pseudo_equilibrium(const NonSmoothSystem& sys, double s, bool double_root,
                                              const Tolerances& tol) {
    PseudoEquilibrium pe;
    pe.s = s;
    pe.point = sys.chart().point(s);
    const double l1 = sys.lie(Field::X1, 1, pe.point);
    pe.side = l1 < 0.0 ? Region::Sliding : Region::Escaping;
    const double h = 1e-6 * (1.0 + std::fabs(s));
    pe.slope = (direction_function(sys, s + h, tol) - direction_function(sys, s - h, tol)) / (2.0 * h);
    if (double_root || std::fabs(pe.slope) < tol.slope_floor) {
        pe.kind = PseudoKind::NonHyperbolic;
        return pe;
    }
    const bool attractor = pe.slope < 0.0;
    if (pe.side == Region::Sliding) {
        pe.kind = attractor ? PseudoKind::SigmaAttractor : PseudoKind::SigmaSaddle;
    } else {
        pe.kind = attractor ? PseudoKind::SigmaSaddle : PseudoKind::SigmaRepeller;
    }
    return pe;
}

SigmaClass classify_point(const NonSmoothSystem& sys, Vec2 q, const Tolerances& tol) {
    const double fq = sys.f(q);
    if (std::fabs(fq) > tol.on_manifold * (1.0 + norm(q))) {
        throw PreconditionError("point is not on Sigma (|f| = " + std::to_string(std::fabs(fq)) + ")");
    }
    SigmaClass out;
    if (norm(sys.grad_f(q)) < tol.gradient_min) {
        out.region = Region::Degenerate;
        out.reason = "grad f vanishes";
        return out;
    }
    const double tau = tangency_tolerance(sys, q, tol);
    const double l1 = sys.lie(Field::X1, 1, q);
    const double l2 = sys.lie(Field::X2, 1, q);
    const bool t1 = std::fabs(l1) <= tau;
    const bool t2 = std::fabs(l2) <= tau;
    if (t1 && t2) {
        out.region = Region::Degenerate;
        out.reason = "both fields tangent to Sigma";
        return out;
    }
    if (t1 || t2) {
        const Field w = t1 ? Field::X1 : Field::X2;
        const double second = sys.lie(w, 2, q);
        if (std::fabs(second) <= tau) {
            out.region = Region::Degenerate;
            out.reason = std::string(to_string(w)) + " tangent to second order";
            return out;
        }
        const bool visible = w == Field::X1 ? second > 0.0 : second < 0.0;
        out.region = visible ? Region::FoldVisible : Region::FoldInvisible;
        out.field = w;
        return out;
    }
    if (l1 * l2 > 0.0) {
        out.region = Region::Sewing;
        return out;
    }
    out.region = l1 < 0.0 ? Region::Sliding : Region::Escaping;
    const Vec2 xs = (l2 * sys.eval(Field::X1, q) - l1 * sys.eval(Field::X2, q)) / (l2 - l1);
    if (norm(xs) <= tau) {
        const PseudoEquilibrium pe = classify_pseudo_equilibrium(sys, sys.chart().param(q), false, tol);
        out.side = out.region;
        out.region = Region::PseudoEquilibrium;
        out.pseudo = pe.kind;
    }
    return out;
}

std::vector<PseudoEquilibrium> pseudo_equilibria(const NonSmoothSystem& sys, double a, double b,
                                                 int intervals, const Tolerances& tol) {
    const auto h = [&](double s) -> std::optional<double> {
        const Vec2 q = sys.chart().point(s);
        const double l1 = sys.lie(Field::X1, 1, q);
        const double l2 = sys.lie(Field::X2, 1, q);
        const double tau = tangency_tolerance(sys, q, tol);
        if (l1 * l2 > 0.0 && std::fabs(l1) > tau && std::fabs(l2) > tau) return std::nullopt;
        try {
            return direction_function(sys, s, tol);
        } catch (const DomainError&) {
            return std::nullopt;
        }
    };
    detail::ScanOptions opts;
    opts.intervals = intervals;
    std::vector<PseudoEquilibrium> out;
    for (const auto& r : detail::scan_roots(h, a, b, opts)) {
        out.push_back(classify_pseudo_equilibrium(sys, r.s, r.double_root, tol));
    }
    return out;
}

std::vector<FoldPoint> fold_census(const NonSmoothSystem& sys, double a, double b, int intervals) {
    std::vector<FoldPoint> folds;
    for (const Field w : {Field::X1, Field::X2}) {
        const auto g = [&](double s) -> std::optional<double> {
            return sys.lie(w, 1, sys.chart().point(s));
        };
        detail::ScanOptions opts;
        opts.intervals = intervals;
        opts.xtol = 1e-14;
        for (const auto& r : detail::scan_roots(g, a, b, opts)) {
            FoldPoint fp;
            fp.s = r.s;
            fp.point = sys.chart().point(r.s);
            fp.field = w;
            const double second = sys.lie(w, 2, fp.point);
            fp.visible = w == Field::X1 ? second > 0.0 : second < 0.0;
            folds.push_back(fp);
        }
    }
    std::sort(folds.begin(), folds.end(), [](const FoldPoint& l, const FoldPoint& r) { return l.s < r.s; });
    return folds;
}

}  // namespace filippov
