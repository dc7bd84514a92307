#include "filippov/flow.hpp"

#include <algorithm>
#include <cmath>

#include "filippov/errors.hpp"
#include "ode.hpp"

namespace filippov {

const char* to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::X1Arc: return "X1";
        case Regime::X2Arc: return "X2";
        case Regime::Sliding: return "sliding";
    }
    return "?";
}

const char* to_string(ArcEnd end) noexcept {
    switch (end) {
        case ArcEnd::CrossedSigma: return "CrossedSigma";
        case ArcEnd::HitFold: return "HitFold";
        case ArcEnd::HitPseudoEquilibrium: return "HitPseudoEquilibrium";
        case ArcEnd::HitSection: return "HitSection";
        case ArcEnd::TimeBudget: return "TimeBudget";
        case ArcEnd::LeftDomain: return "LeftDomain";
    }
    return "?";
}

const char* to_string(Transition transition) noexcept {
    switch (transition) {
        case Transition::SewingCrossing: return "sewing-crossing";
        case Transition::SlidingEntry: return "sliding-entry";
        case Transition::FoldExit: return "fold-exit";
    }
    return "?";
}

const char* to_string(ArcKind kind) noexcept {
    switch (kind) {
        case ArcKind::Focal: return "Focal";
        case ArcKind::Graphic: return "Graphic";
        case ArcKind::Neither: return "Neither";
    }
    return "?";
}

Regime regime_of(Field field) noexcept { return field == Field::X1 ? Regime::X1Arc : Regime::X2Arc; }

void decimate(std::vector<ArcPoint>& points, std::size_t max_points) {
    if (max_points < 2 || points.size() <= max_points) return;
    const std::size_t n = points.size();
    std::vector<ArcPoint> kept;
    kept.reserve(max_points);
    for (std::size_t k = 0; k < max_points - 1; ++k) {
        kept.push_back(points[k * (n - 1) / (max_points - 1)]);
    }
    kept.push_back(points.back());
    points = std::move(kept);
}

namespace {

ode::State to_state(Vec2 q) { return {q.x, q.y}; }
Vec2 to_vec(const ode::State& s) { return {s[0], s[1]}; }

ode::Settings ode_settings(const FlowSettings& fs) {
    ode::Settings s;
    s.rtol = fs.rtol;
    s.atol = fs.atol;
    s.t_max = fs.t_max;
    s.domain_radius = fs.domain_radius;
    return s;
}

ode::Event section_event(const Section& sec, double tol) {
    ode::Event ev;
    ev.g = [sec](const ode::State& s) { return sec.signed_distance(to_vec(s)); };
    ev.direction = sec.direction;
    ev.tol = tol;
    ev.accept = [sec](const ode::State& s) {
        const double u = sec.coordinate(to_vec(s));
        return u >= 0.0 && u <= 1.0;
    };
    return ev;
}

Arc smooth_arc(const NonSmoothSystem& sys, Field w, Vec2 q0, const FlowSettings& fs, const StopSpec& stop) {
    const VectorField& X = sys.field(w);
    const ode::Rhs rhs = [&X](const ode::State& s, ode::State& ds) {
        const Vec2 v = X({s[0], s[1]});
        ds[0] = v.x;
        ds[1] = v.y;
    };
    std::vector<ode::Event> events;
    std::vector<ArcEnd> ends;
    if (stop.sigma_crossing) {
        ode::Event ev;
        ev.g = [&sys](const ode::State& s) { return sys.f(to_vec(s)); };
        ev.direction = w == Field::X1 ? -1 : +1;
        ev.tol = fs.event_tol;
        events.push_back(std::move(ev));
        ends.push_back(ArcEnd::CrossedSigma);
    }
    if (stop.section) {
        events.push_back(section_event(*stop.section, fs.event_tol));
        ends.push_back(ArcEnd::HitSection);
    }
    ode::Settings os = ode_settings(fs);
    if (fs.max_step_length > 0.0) {
        const double len = fs.max_step_length;
        os.max_step = [&X, len](const ode::State& s) { return len / std::max(norm(X({s[0], s[1]})), 1e-300); };
    }
    const ode::Result r = ode::integrate(rhs, to_state(q0), 0.0, os, events);

    Arc arc;
    arc.regime = regime_of(w);
    arc.points.reserve(r.samples.size());
    for (const auto& s : r.samples) arc.points.push_back({s.t, to_vec(s.q)});
    switch (r.stop) {
        case ode::Stop::Event: arc.end = ends[static_cast<std::size_t>(r.event)]; break;
        case ode::Stop::TimeBudget: arc.end = ArcEnd::TimeBudget; break;
        case ode::Stop::LeftDomain: arc.end = ArcEnd::LeftDomain; break;
    }
    decimate(arc.points, fs.max_points);
    return arc;
}

Arc sliding_arc(const NonSmoothSystem& sys, Vec2 q0, const FlowSettings& fs, const StopSpec& stop) {
    const SigmaChart& chart = sys.chart();
    const double s0 = chart.param(q0);
    const Vec2 p0 = chart.point(s0);
    const double l1 = sys.lie(Field::X1, 1, p0);
    const double l2 = sys.lie(Field::X2, 1, p0);
    const double tau = tangency_tolerance(sys, p0, fs.tol);
    if (l1 * l2 > 0.0 && std::fabs(l1) > tau && std::fabs(l2) > tau) {
        throw PreconditionError("sliding arc must start on the sliding or escaping region");
    }

    const ode::Rhs rhs = [&](const ode::State& s, ode::State& ds) {
        ds[0] = direction_function(sys, s[0], fs.tol);
        ds[1] = 0.0;
    };
    std::vector<ode::Event> events;
    std::vector<ArcEnd> ends;
    std::vector<std::optional<Field>> fold_of;
    if (stop.folds) {
        for (const Field w : {Field::X1, Field::X2}) {
            ode::Event ev;
            ev.g = [&sys, &chart, w](const ode::State& s) { return sys.lie(w, 1, chart.point(s[0])); };
            ev.tol = fs.event_tol;
            events.push_back(std::move(ev));
            ends.push_back(ArcEnd::HitFold);
            fold_of.emplace_back(w);
        }
    }
    if (stop.pseudo_equilibria) {
        ode::Event ev;
        ev.g = [&](const ode::State& s) {
            return std::fabs(direction_function(sys, s[0], fs.tol)) - 1e-10;
        };
        ev.direction = -1;
        ev.tol = 1e-12;
        events.push_back(std::move(ev));
        ends.push_back(ArcEnd::HitPseudoEquilibrium);
        fold_of.emplace_back(std::nullopt);
    }
    if (stop.section) {
        const Section sec = *stop.section;
        ode::Event ev;
        ev.g = [sec, &chart](const ode::State& s) { return sec.signed_distance(chart.point(s[0])); };
        ev.direction = sec.direction;
        ev.tol = fs.event_tol;
        ev.accept = [sec, &chart](const ode::State& s) {
            const double u = sec.coordinate(chart.point(s[0]));
            return u >= 0.0 && u <= 1.0;
        };
        events.push_back(std::move(ev));
        ends.push_back(ArcEnd::HitSection);
        fold_of.emplace_back(std::nullopt);
    }

    Arc arc;
    arc.regime = Regime::Sliding;
    arc.escaping = l1 > 0.0 || (std::fabs(l1) <= tau && l2 < 0.0);

    // Starting exactly on a pseudo-equilibrium: nothing moves.
    if (stop.pseudo_equilibria && std::fabs(direction_function(sys, s0, fs.tol)) <= 1e-10) {
        arc.points.push_back({0.0, p0});
        arc.end = ArcEnd::HitPseudoEquilibrium;
        return arc;
    }

    ode::Settings os = ode_settings(fs);
    if (fs.max_step_length > 0.0) {
        const double len = fs.max_step_length;
        os.max_step = [&, len](const ode::State& s) {
            return len / std::max(std::fabs(direction_function(sys, s[0], fs.tol)), 1e-300);
        };
    }
    const ode::Result r = ode::integrate(rhs, {s0, 0.0}, 0.0, os, events);
    arc.points.reserve(r.samples.size());
    for (const auto& s : r.samples) {
        const Vec2 p = chart.point(s.q[0]);
        if (norm(p) > fs.domain_radius) {
            arc.points.push_back({s.t, p});
            arc.end = ArcEnd::LeftDomain;
            decimate(arc.points, fs.max_points);
            return arc;
        }
        arc.points.push_back({s.t, p});
    }
    switch (r.stop) {
        case ode::Stop::Event:
            arc.end = ends[static_cast<std::size_t>(r.event)];
            arc.fold_field = fold_of[static_cast<std::size_t>(r.event)];
            break;
        case ode::Stop::TimeBudget: arc.end = ArcEnd::TimeBudget; break;
        case ode::Stop::LeftDomain: arc.end = ArcEnd::LeftDomain; break;
    }
    decimate(arc.points, fs.max_points);
    return arc;
}

}  // namespace

Arc integrate_arc(const NonSmoothSystem& sys, Regime regime, Vec2 q0, const FlowSettings& settings,
                  const StopSpec& stop) {
    const double band = 1e-9 * (1.0 + norm(q0));
    switch (regime) {
        case Regime::X1Arc:
            if (sys.f(q0) < -band) throw PreconditionError("X1 arc must start in {f >= 0}");
            return smooth_arc(sys, Field::X1, q0, settings, stop);
        case Regime::X2Arc:
            if (sys.f(q0) > band) throw PreconditionError("X2 arc must start in {f <= 0}");
            return smooth_arc(sys, Field::X2, q0, settings, stop);
        case Regime::Sliding:
            if (std::fabs(sys.f(q0)) > settings.tol.on_manifold * (1.0 + norm(q0))) {
                throw PreconditionError("sliding arc must start on Sigma");
            }
            return sliding_arc(sys, q0, settings, stop);
    }
    throw PreconditionError("unknown regime");
}

std::vector<ArcPoint> HybridOrbit::samples() const {
    std::vector<ArcPoint> out;
    for (const Arc& arc : arcs) {
        auto first = arc.points.begin();
        if (!out.empty() && first != arc.points.end() && distance(out.back().q, first->q) == 0.0) ++first;
        out.insert(out.end(), first, arc.points.end());
    }
    return out;
}

HybridOrbit hybrid_orbit(const NonSmoothSystem& sys, Vec2 q0, const FlowSettings& settings,
                         const std::optional<Section>& stop_at) {
    HybridOrbit orbit;
    const double on_tol = settings.tol.on_manifold * (1.0 + norm(q0));

    std::optional<Regime> regime;
    const double f0 = sys.f(q0);
    if (f0 > on_tol) {
        regime = Regime::X1Arc;
    } else if (f0 < -on_tol) {
        regime = Regime::X2Arc;
    } else {
        const SigmaClass c = classify_point(sys, q0, settings.tol);
        switch (c.region) {
            case Region::Sewing:
                regime = sys.lie(Field::X1, 1, q0) > 0.0 ? Regime::X1Arc : Regime::X2Arc;
                break;
            case Region::Sliding:
            case Region::Escaping: regime = Regime::Sliding; break;
            case Region::FoldVisible: regime = regime_of(c.field); break;
            default:
                throw PreconditionError("hybrid orbit cannot start at a Sigma-singular point (" + c.label() +
                                        ")");
        }
    }

    Vec2 q = q0;
    double t = 0.0;
    std::size_t total_points = 0;
    int short_arcs = 0;
    for (int k = 0; k < 100'000 && regime; ++k) {
        FlowSettings fs = settings;
        fs.t_max = settings.t_max - t;
        if (fs.t_max <= 0.0) break;
        StopSpec stop;
        stop.section = stop_at;
        Arc arc = integrate_arc(sys, *regime, q, fs, stop);
        for (auto& p : arc.points) p.t += t;
        t = arc.points.back().t;
        q = arc.finish();
        total_points += arc.points.size();
        short_arcs = arc.duration() < 1e-12 ? short_arcs + 1 : 0;
        const ArcEnd end = arc.end;
        const std::optional<Field> fold_field = arc.fold_field;
        const Regime current = *regime;
        orbit.arcs.push_back(std::move(arc));
        regime.reset();

        if (short_arcs > 8) {
            orbit.diagnostic = "orbit stalled: repeated zero-length arcs (possible Zeno behaviour)";
            break;
        }

        if (end == ArcEnd::CrossedSigma) {
            const SigmaClass c = classify_point(sys, q, settings.tol);
            switch (c.region) {
                case Region::Sewing:
                    regime = current == Regime::X1Arc ? Regime::X2Arc : Regime::X1Arc;
                    orbit.transitions.push_back({Transition::SewingCrossing, t, q});
                    break;
                case Region::Sliding:
                    regime = Regime::Sliding;
                    orbit.transitions.push_back({Transition::SlidingEntry, t, q});
                    break;
                case Region::PseudoEquilibrium:
                    orbit.diagnostic = "landed on a pseudo-equilibrium";
                    break;
                default:
                    orbit.diagnostic = "reached Sigma at a " + c.label() + " point";
                    break;
            }
        } else if (end == ArcEnd::HitFold) {
            const Field w = fold_field.value_or(Field::X1);
            const double second = sys.lie(w, 2, q);
            const bool visible = w == Field::X1 ? second > 0.0 : second < 0.0;
            if (visible) {
                regime = regime_of(w);
                orbit.transitions.push_back({Transition::FoldExit, t, q});
            } else {
                orbit.diagnostic = std::string("sliding reached an invisible fold of ") + to_string(w);
            }
        } else if (end == ArcEnd::HitSection) {
            orbit.hit_section = true;
        } else if (end == ArcEnd::HitPseudoEquilibrium) {
            orbit.diagnostic = "absorbed by a pseudo-equilibrium";
        } else if (end == ArcEnd::LeftDomain) {
            orbit.diagnostic = "left the integration domain";
        }
    }

    if (total_points > settings.max_points) {
        const double ratio = static_cast<double>(settings.max_points) / static_cast<double>(total_points);
        for (auto& arc : orbit.arcs) {
            const auto keep = std::max<std::size_t>(
                2, static_cast<std::size_t>(ratio * static_cast<double>(arc.points.size())));
            decimate(arc.points, keep);
        }
    }
    return orbit;
}

ArcKindResult arc_kind(const NonSmoothSystem& sys, Vec2 fold, const FlowSettings& settings) {
    const SigmaClass c = classify_point(sys, fold, settings.tol);
    if (c.region != Region::FoldVisible) {
        throw PreconditionError("arc_kind needs a visible Sigma-fold, got " + c.label());
    }
    ArcKindResult out;
    out.field = c.field;
    out.fold = fold;
    out.arc = integrate_arc(sys, regime_of(c.field), fold, settings);
    if (out.arc.end != ArcEnd::CrossedSigma) {
        throw NumericError(std::string("arc from the fold does not return to Sigma (") + to_string(out.arc.end) +
                           ")");
    }
    out.ret = out.arc.finish();
    const SigmaChart& chart = sys.chart();
    out.s_fold = chart.param(fold);
    out.s_return = chart.param(out.ret);

    const double lo = std::min(out.s_fold, out.s_return);
    const double hi = std::max(out.s_fold, out.s_return);
    const double margin = 1e-9 * (1.0 + (hi - lo));
    int count = 0;
    for (const FoldPoint& fp : fold_census(sys, lo, hi)) {
        if (fp.s > lo + margin && fp.s < hi - margin) ++count;
    }
    out.folds_between = count;
    out.kind = count == 0 ? ArcKind::Focal : count == 1 ? ArcKind::Graphic : ArcKind::Neither;
    return out;
}

}  // namespace filippov
