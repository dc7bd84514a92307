#include "filippov/canard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "filippov/errors.hpp"
#include "numerics.hpp"

namespace filippov {

const char* to_string(CanardKind kind) noexcept {
    switch (kind) {
        case CanardKind::I: return "I";
        case CanardKind::II: return "II";
        case CanardKind::III: return "III";
    }
    return "?";
}

std::vector<Vec2> CanardCycle::polyline() const {
    std::vector<Vec2> out;
    for (const CycleSegment& seg : segments) {
        for (std::size_t k = 0; k < seg.points.size(); ++k) {
            if (k == 0 && !out.empty() && out.back() == seg.points[0]) continue;
            out.push_back(seg.points[k]);
        }
    }
    if (!out.empty() && out.front() != out.back()) out.push_back(out.front());
    return out;
}

double CanardCycle::closure_gap() const {
    double gap = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& cur = segments[i].points;
        const auto& nxt = segments[(i + 1) % segments.size()].points;
        if (cur.empty() || nxt.empty()) return std::numeric_limits<double>::infinity();
        gap = std::max(gap, distance(cur.back(), nxt.front()));
    }
    return gap;
}

namespace {

std::string coordinate_label(const NonSmoothSystem& sys, double s) {
    char buf[64];
    switch (sys.chart().kind()) {
        case SigmaChart::Kind::Horizontal: std::snprintf(buf, sizeof buf, "x=%.6g", s); break;
        case SigmaChart::Kind::Vertical: std::snprintf(buf, sizeof buf, "y=%.6g", s); break;
        default: std::snprintf(buf, sizeof buf, "s=%.6g", s); break;
    }
    return buf;
}

std::optional<double> safe_h(const NonSmoothSystem& sys, double s, const Tolerances& tol) {
    try {
        const double h = direction_function(sys, s, tol);
        if (!std::isfinite(h)) return std::nullopt;
        return h;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

FoldPoint single_visible_fold(const NonSmoothSystem& sys, const CanardOptions& options) {
    const auto census = fold_census(sys, options.window_a, options.window_b);
    const auto visible = std::count_if(census.begin(), census.end(), [](const FoldPoint& f) { return f.visible; });
    if (census.size() != 1 || visible != 1) {
        throw PreconditionError("expected exactly one visible Sigma-fold in the window, found " +
                                std::to_string(census.size()) + " fold(s), " + std::to_string(visible) +
                                " visible");
    }
    return census.front();
}

// Extremum of H on [lo, hi] in the direction that would first reach zero:
// max H when `negative` (canard side has H < 0), min H otherwise.
std::pair<double, double> h_extremum(const NonSmoothSystem& sys, double lo, double hi, bool negative, int n,
                                     const Tolerances& tol) {
    const double sign = negative ? -1.0 : 1.0;
    const auto objective = [&](double s) {
        const auto h = safe_h(sys, s, tol);
        return h ? sign * *h : std::numeric_limits<double>::infinity();
    };
    const auto grid = detail::linspace(lo, hi, n + 1);
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = objective(grid[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = grid[best == 0 ? 0 : best - 1];
    const double b = grid[std::min(best + 1, grid.size() - 1)];
    auto [s, v] = detail::minimize(objective, a, b);
    if (best_val < v) {
        s = grid[best];
        v = best_val;
    }
    return {s, sign * v};
}

std::vector<Vec2> sigma_path(const SigmaChart& chart, double from, double to, double step) {
    const int n = std::max(2, static_cast<int>(std::ceil(std::fabs(to - from) / step)) + 1);
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (double s : detail::linspace(from, to, n)) pts.push_back(chart.point(s));
    return pts;
}

}  // namespace

CanardReport detect_canard_one_fold(const NonSmoothSystem& sys, const CanardOptions& options) {
    const Tolerances& tol = options.flow.tol;
    const SigmaChart& chart = sys.chart();
    CanardReport rep;
    const FoldPoint fold = single_visible_fold(sys, options);
    rep.fold = fold;
    rep.a = fold.point;

    const ArcKindResult ak = arc_kind(sys, fold.point, options.flow);
    rep.b = ak.ret;
    rep.s_a = ak.s_fold;
    rep.s_b = ak.s_return;
    rep.focal = ak.kind == ArcKind::Focal;
    if (!rep.focal) {
        rep.diagnostics.push_back(std::string("fold arc is of ") + to_string(ak.kind) + " kind (" +
                                  std::to_string(ak.folds_between) + " folds between A and B)");
    }

    const double lo = std::min(rep.s_a, rep.s_b);
    const double hi = std::max(rep.s_a, rep.s_b);
    const auto samples = detail::linspace(rep.s_a, rep.s_b, options.h_samples + 1);

    // Opposite normal components on (A, B].
    rep.normals_opposite = true;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const Vec2 q = chart.point(samples[i]);
        const double l1 = sys.lie(Field::X1, 1, q);
        const double l2 = sys.lie(Field::X2, 1, q);
        const double tau = tangency_tolerance(sys, q, tol);
        if (!(l1 * l2 < 0.0 && std::fabs(l1) > tau && std::fabs(l2) > tau)) {
            rep.normals_opposite = false;
            rep.diagnostics.push_back("X1f*X2f >= 0 at " + coordinate_label(sys, samples[i]));
            break;
        }
    }

    // det[X1 X2] bounded away from zero on [A, B].
    const auto det_at = [&](double s) {
        const Vec2 q = chart.point(s);
        return cross(sys.eval(Field::X1, q), sys.eval(Field::X2, q));
    };
    rep.independent = true;
    for (double s : samples) {
        const Vec2 q = chart.point(s);
        const double bound = 1e-10 * (1.0 + norm(sys.eval(Field::X1, q)) * norm(sys.eval(Field::X2, q)));
        if (!(std::fabs(det_at(s)) > bound)) {
            rep.independent = false;
            rep.diagnostics.push_back("X1 and X2 are not linearly independent at " + coordinate_label(sys, s));
            break;
        }
    }
    if (rep.independent) {
        const auto det_roots = detail::scan_roots([&](double s) -> std::optional<double> { return det_at(s); }, lo,
                                                  hi, {.intervals = options.h_samples});
        if (!det_roots.empty()) {
            rep.independent = false;
            rep.diagnostics.push_back("X1 and X2 are not linearly independent at " +
                                      coordinate_label(sys, det_roots.front().s));
        }
    }
    rep.theorem_a = rep.focal && rep.normals_opposite && rep.independent;

    // H well defined on [A, B] (inside the closure of Sigma2 u Sigma3) and zero-free.
    rep.h_defined = true;
    rep.h_samples.reserve(samples.size());
    for (double s : samples) {
        const auto [d2, e2] = frame_normals(sys, s);
        const auto h = safe_h(sys, s, tol);
        const double tau = tangency_tolerance(sys, chart.point(s), tol);
        const bool tangent = std::min(std::fabs(d2), std::fabs(e2)) <= tau;
        if (!h || (d2 * e2 > 0.0 && !tangent)) {
            rep.h_defined = false;
            rep.diagnostics.push_back("H is not defined at " + coordinate_label(sys, s));
            break;
        }
        rep.h_samples.push_back({s, *h});
    }
    rep.h_zero_free = false;
    if (rep.h_defined) {
        rep.h_zero_free = true;
        const auto roots = detail::scan_roots([&](double s) { return safe_h(sys, s, tol); }, lo, hi,
                                              {.intervals = options.h_samples});
        for (const auto& r : roots) {
            rep.h_zero_free = false;
            rep.diagnostics.push_back("H has a zero at " + coordinate_label(sys, r.s));
        }
        for (const auto& hs : rep.h_samples) {
            if (std::fabs(hs.h) <= 1e-10 && rep.h_zero_free) {
                rep.h_zero_free = false;
                rep.diagnostics.push_back("H has a zero at " + coordinate_label(sys, hs.s));
            }
        }
        rep.pseudo_equilibria = pseudo_equilibria(sys, lo, hi, options.h_samples, tol);
    }
    rep.corollary = rep.focal && rep.h_defined && rep.h_zero_free;
    if (rep.corollary != rep.theorem_a) {
        rep.diagnostics.push_back("geometric conditions and the direction-function criterion disagree");
    }

    const double towards_a = rep.s_a < rep.s_b ? -1.0 : 1.0;
    rep.orientation_ok = !rep.h_samples.empty() &&
                         std::all_of(rep.h_samples.begin(), rep.h_samples.end(),
                                     [&](const HSample& hs) { return hs.h * towards_a > 0.0; });
    if (rep.corollary && !rep.orientation_ok) {
        rep.diagnostics.push_back("sliding flow on [A, B] runs away from the fold");
    }

    const Vec2 mid = chart.point(0.5 * (lo + hi));
    (sys.lie(Field::X1, 1, mid) < 0.0 ? rep.sliding_intervals : rep.escaping_intervals).push_back({lo, hi});

    rep.found = rep.corollary && rep.orientation_ok;
    if (!rep.found) return rep;

    FlowSettings dense = options.flow;
    dense.max_step_length = options.polyline_step;
    const Arc gamma = integrate_arc(sys, regime_of(fold.field), fold.point, dense);
    if (gamma.end != ArcEnd::CrossedSigma) throw NumericError("dense re-integration of the fold arc did not return");
    CycleSegment arc_seg{gamma.regime, {}};
    for (const auto& p : gamma.points) arc_seg.points.push_back(p.q);
    CycleSegment slide_seg{Regime::Sliding, sigma_path(chart, chart.param(arc_seg.points.back()), rep.s_a,
                                                      options.polyline_step)};
    slide_seg.points.front() = arc_seg.points.back();
    slide_seg.points.back() = arc_seg.points.front();
    rep.b = arc_seg.points.back();
    rep.cycle.segments = {std::move(arc_seg), std::move(slide_seg)};

    rep.kind = classify_kind(sys, rep.cycle, tol);
    const HyperbolicityCertificate cert = is_hyperbolic(sys, rep.cycle, *rep.kind, options.flow);
    rep.hyperbolic = cert.hyperbolic;
    rep.certificate = cert.method + ": " + cert.detail;
    return rep;
}

CanardKind classify_kind(const NonSmoothSystem& sys, const CanardCycle& cycle, const Tolerances& tol) {
    const auto& segs = cycle.segments;
    if (segs.empty()) throw PreconditionError("empty cycle");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (segs[i].points.empty()) throw PreconditionError("cycle segment " + std::to_string(i) + " is empty");
    }
    const auto on_sigma = [&](Vec2 q) { return std::fabs(sys.f(q)) <= tol.on_manifold * (1.0 + norm(q)); };
    const SigmaChart& chart = sys.chart();

    bool has_sliding = false;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (segs[i].regime != Regime::Sliding) continue;
        has_sliding = true;
        for (const Vec2& q : segs[i].points) {
            if (!on_sigma(q)) throw PreconditionError("sliding segment " + std::to_string(i) + " leaves Sigma");
        }
    }

    if (segs.size() == 1) {
        const auto& pts = segs[0].points;
        if (segs[0].regime != Regime::Sliding) throw PreconditionError("cycle does not meet Sigma");
        if (!chart.closed()) throw PreconditionError("kind II requires a compact Sigma");
        if (distance(pts.front(), pts.back()) > 1e-8 * (1.0 + norm(pts.front()))) {
            throw PreconditionError("cycle is not closed");
        }
        double length = 0.0;
        for (std::size_t k = 1; k < pts.size(); ++k) length += distance(pts[k - 1], pts[k]);
        if (length < 0.5 * chart.period()) throw PreconditionError("sliding cycle does not cover Sigma");
        for (const Vec2& q : pts) {
            const SigmaClass c = classify_point(sys, q, tol);
            if (c.region != Region::Sliding && c.region != Region::Escaping) {
                throw PreconditionError("kind II cycle meets a " + c.label() + " point");
            }
        }
        return CanardKind::II;
    }

    bool has_fold = false;
    bool all_sewing = true;
    int contacts = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const CycleSegment& cur = segs[i];
        const CycleSegment& nxt = segs[(i + 1) % segs.size()];
        const Vec2 p = cur.points.back();
        const std::string where = "junction " + std::to_string(i) + " at (" + std::to_string(p.x) + ", " +
                                  std::to_string(p.y) + ")";
        if (distance(p, nxt.points.front()) > 1e-8 * (1.0 + norm(p))) {
            throw PreconditionError(where + ": segments do not meet");
        }
        if (cur.regime == nxt.regime) continue;
        if (!on_sigma(p)) throw PreconditionError(where + ": regime change off Sigma");
        ++contacts;
        const SigmaClass c = classify_point(sys, p, tol);
        const bool smooth_pair = cur.regime != Regime::Sliding && nxt.regime != Regime::Sliding;
        if (smooth_pair) {
            if (c.region != Region::Sewing) {
                throw PreconditionError(where + ": X1/X2 transition at a " + c.label() + " point");
            }
        } else {
            all_sewing = false;
            if (c.region == Region::FoldVisible) {
                has_fold = true;
            } else if (c.region != Region::Sliding && c.region != Region::Escaping) {
                throw PreconditionError(where + ": sliding transition at a " + c.label() + " point");
            }
        }
    }
    if (contacts == 0) throw PreconditionError("cycle does not meet Sigma");

    if (!has_fold && has_sliding) {
        for (const CycleSegment& seg : segs) {
            if (seg.regime != Regime::Sliding) continue;
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const Vec2& q : seg.points) {
                const double s = chart.param(q);
                lo = std::min(lo, s);
                hi = std::max(hi, s);
            }
            for (const FoldPoint& fp : fold_census(sys, lo, hi)) has_fold = has_fold || fp.visible;
        }
    }
    if (has_fold) return CanardKind::III;
    if (all_sewing && !has_sliding) return CanardKind::I;
    throw PreconditionError("cycle matches no canard kind: sliding contact without a visible fold");
}

namespace {

HyperbolicityCertificate kind_three_purity(const NonSmoothSystem& sys, const CanardCycle& cycle) {
    HyperbolicityCertificate cert;
    cert.method = "contact purity";
    const auto& segs = cycle.segments;
    const std::size_t n = segs.size();
    // Start from a non-sliding segment so runs of consecutive sliding segments stay together.
    std::size_t start = 0;
    while (start < n && segs[start].regime == Regime::Sliding) ++start;
    if (start == n) start = 0;

    int intervals = 0;
    bool mixed = false;
    bool saw_sliding = false;
    bool saw_escaping = false;
    const auto close_run = [&] {
        if (saw_sliding || saw_escaping) ++intervals;
        if (saw_sliding && saw_escaping) mixed = true;
        saw_sliding = saw_escaping = false;
    };
    for (std::size_t k = 0; k < n; ++k) {
        const CycleSegment& seg = segs[(start + k) % n];
        if (seg.regime != Regime::Sliding) {
            close_run();
            continue;
        }
        for (std::size_t j = 0; j + 1 < seg.points.size() || j == 0; ++j) {
            const Vec2 p = seg.points[j];
            const Vec2 q = j + 1 < seg.points.size() ? seg.points[j + 1] : p;
            for (int m = 0; m < 8; ++m) {
                const Vec2 r = sys.chart().point(sys.chart().param(p + (m / 8.0) * (q - p)));
                const SigmaClass c = classify_point(sys, r);
                if (c.region == Region::Sliding) saw_sliding = true;
                if (c.region == Region::Escaping) saw_escaping = true;
            }
            if (seg.points.size() == 1) break;
        }
    }
    close_run();
    cert.hyperbolic = !mixed;
    cert.detail = mixed ? "a contact interval mixes sliding and escaping pieces"
                        : std::to_string(intervals) + " contact interval(s), each purely sliding or purely escaping";
    return cert;
}

HyperbolicityCertificate kind_one_return_map(const NonSmoothSystem& sys, const CanardCycle& cycle,
                                             const FlowSettings& settings) {
    HyperbolicityCertificate cert;
    cert.method = "first-return derivative";
    const CycleSegment* longest = nullptr;
    for (const auto& seg : cycle.segments) {
        if (seg.regime != Regime::Sliding && (!longest || seg.points.size() > longest->points.size())) {
            longest = &seg;
        }
    }
    if (!longest || longest->points.size() < 3) throw PreconditionError("kind I cycle needs a smooth arc");
    const Vec2 p = longest->points[longest->points.size() / 2];
    const Field w = longest->regime == Regime::X1Arc ? Field::X1 : Field::X2;
    const Vec2 v = sys.eval(w, p);
    if (norm(v) == 0.0) throw NumericError("field vanishes on the cycle");

    double xmin = p.x, xmax = p.x, ymin = p.y, ymax = p.y;
    for (const Vec2& q : cycle.polyline()) {
        xmin = std::min(xmin, q.x);
        xmax = std::max(xmax, q.x);
        ymin = std::min(ymin, q.y);
        ymax = std::max(ymax, q.y);
    }
    const double half = std::max(1e-3, 0.05 * std::hypot(xmax - xmin, ymax - ymin));
    const Vec2 nrm = Vec2{-v.y, v.x} / norm(v);
    Section sec{p - half * nrm, p + half * nrm, 0};
    sec.direction = dot(v, sec.normal()) > 0.0 ? 1 : -1;
    const double length = 2.0 * half;

    const auto ret = [&](double u) {
        const HybridOrbit orbit = hybrid_orbit(sys, sec.at(u), settings, sec);
        if (!orbit.hit_section) {
            throw NumericError("first-return map undefined: " +
                               (orbit.diagnostic.empty() ? std::string("no return within t_max") : orbit.diagnostic));
        }
        return sec.coordinate(orbit.finish());
    };
    const detail::FixedPoint fp = detail::secant_fixed_point(ret, 0.5, 0.5 + 1e-3, 1e-12);
    const detail::Derivative d = detail::richardson_derivative(ret, fp.u, 1e-4 / length);
    cert.multiplier = d.value;
    cert.error = d.error;
    cert.hyperbolic = std::fabs(d.value - 1.0) > 1e-3;
    char buf[128];
    std::snprintf(buf, sizeof buf, "eta' = %.6e +- %.1e", d.value, d.error);
    cert.detail = buf;
    return cert;
}

}  // namespace

HyperbolicityCertificate is_hyperbolic(const NonSmoothSystem& sys, const CanardCycle& cycle, CanardKind kind,
                                       const FlowSettings& settings) {
    switch (kind) {
        case CanardKind::II: return {true, "kind II", 0.0, 0.0, "Gamma coincides with Sigma"};
        case CanardKind::III: return kind_three_purity(sys, cycle);
        case CanardKind::I: return kind_one_return_map(sys, cycle, settings);
    }
    throw PreconditionError("unknown canard kind");
}

namespace {

struct RowGeometry {
    double s_a = 0.0;
    double s_b = 0.0;
    double h_a = 0.0;
    bool focal = false;
};

RowGeometry row_geometry(const NonSmoothSystem& sys, const CanardOptions& options) {
    const FoldPoint fold = single_visible_fold(sys, options);
    const ArcKindResult ak = arc_kind(sys, fold.point, options.flow);
    RowGeometry g;
    g.s_a = ak.s_fold;
    g.s_b = ak.s_return;
    g.focal = ak.kind == ArcKind::Focal;
    const auto h = safe_h(sys, g.s_a, options.flow.tol);
    if (!h) throw NumericError("H undefined at the fold");
    g.h_a = *h;
    return g;
}

// Signed distance of the H extremum from zero: negative on the canard side.
double canard_margin(const NonSmoothSystem& sys, const RowGeometry& g, const CanardOptions& options,
                     double* where = nullptr) {
    const double lo = std::min(g.s_a, g.s_b);
    const double hi = std::max(g.s_a, g.s_b);
    const bool negative = g.h_a < 0.0;
    const auto [s, h] = h_extremum(sys, lo, hi, negative, options.h_samples, options.flow.tol);
    if (where) *where = s;
    return negative ? h : -h;
}

ScanRow scan_row(const NonSmoothSystem& sys, double mu, const CanardOptions& options) {
    ScanRow row;
    row.mu = mu;
    const Tolerances& tol = options.flow.tol;
    const RowGeometry g = row_geometry(sys, options);
    row.s_a = g.s_a;
    row.s_b = g.s_b;
    const double lo = std::min(g.s_a, g.s_b);
    const double hi = std::max(g.s_a, g.s_b);
    const double margin = 1e-9 * (1.0 + hi - lo);

    const auto roots = detail::scan_roots([&](double s) { return safe_h(sys, s, tol); }, lo, hi,
                                          {.intervals = options.h_samples});
    std::vector<double> interior;
    for (const auto& r : roots) {
        if (r.s > lo + margin && r.s < hi - margin) interior.push_back(r.s);
    }
    row.zeros = static_cast<int>(interior.size());
    const auto hb = safe_h(sys, g.s_b, tol);
    if (!hb) throw NumericError("H undefined at the return point");
    row.sign_h_at_b = std::fabs(*hb) <= 1e-10 ? 0 : (*hb > 0.0 ? 1 : -1);
    row.margin = canard_margin(sys, g, options);
    row.extreme_h = row.margin * (g.h_a < 0.0 ? 1.0 : -1.0);

    const int sign_a = g.h_a > 0.0 ? 1 : -1;
    if (row.zeros == 0 && row.sign_h_at_b == 0) {
        row.proposition_case = 3;
        row.verdict = "Sigma-loop, unstable (case 3)";
    } else if (row.zeros == 0) {
        row.verdict = g.focal && row.sign_h_at_b == sign_a ? "canard kind III" : "no canard";
    } else if (row.zeros == 1 && row.sign_h_at_b < 0) {
        row.proposition_case = 1;
        row.verdict = "Sigma-loop, unstable (case 1)";
    } else if (row.zeros == 1 && row.sign_h_at_b > 0) {
        row.proposition_case = 2;
        row.verdict = "Sigma-loop, stable (case 2)";
    } else if (row.zeros == 2) {
        std::string kinds;
        for (double s : interior) {
            if (!kinds.empty()) kinds += " + ";
            kinds += to_string(classify_pseudo_equilibrium(sys, s, false, tol).kind);
        }
        row.verdict = "two pseudo-equilibria (" + kinds + ") with Sigma-separatrix connection";
    } else {
        row.verdict = std::to_string(row.zeros) + " pseudo-equilibria";
    }
    return row;
}

}  // namespace

ScanResult sigma_loop_scan(const SystemFamily& family, double mu_a, double mu_b, int n,
                           const CanardOptions& options) {
    if (n < 1) throw PreconditionError("scan needs at least one sample");
    ScanResult result;
    const auto mus = detail::linspace(mu_a, mu_b, n);
    result.rows.resize(mus.size());
    detail::parallel_for(mus.size(), [&](std::size_t i) {
        try {
            result.rows[i] = scan_row(family(mus[i]), mus[i], options);
        } catch (const Error& e) {
            result.rows[i].mu = mus[i];
            result.rows[i].verdict = "error";
            result.rows[i].error = e.what();
        }
    });

    const auto margin = [&](double mu) {
        const NonSmoothSystem sys = family(mu);
        return canard_margin(sys, row_geometry(sys, options), options);
    };
    const auto locate = [&](double mu) {
        double where = 0.0;
        const NonSmoothSystem sys = family(mu);
        (void)canard_margin(sys, row_geometry(sys, options), options, &where);
        result.bifurcation_mu = mu;
        result.bifurcation_s = where;
    };
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const ScanRow& l = result.rows[i];
        if (!l.error.empty()) continue;
        if (std::fabs(l.margin) <= 1e-14) {
            locate(l.mu);
            break;
        }
        if (i + 1 == result.rows.size()) break;
        const ScanRow& r = result.rows[i + 1];
        if (!r.error.empty() || std::fabs(r.margin) <= 1e-14 || l.margin * r.margin > 0.0) continue;
        locate(detail::refine_root(margin, l.mu, r.mu, l.margin, r.margin, 1e-13));
        break;
    }
    return result;
}

}  // namespace filippov
