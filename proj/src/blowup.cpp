#include "filippov/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "filippov/errors.hpp"
#include "numerics.hpp"

namespace filippov {

namespace {

constexpr double kPi = std::numbers::pi;

double eval_on(const Expr& e, Var sigma_var, double s) {
    return sigma_var == Var::X ? e.eval(s, 0.0) : e.eval(0.0, s);
}

bool vanishes(const Expr& e, Var sigma_var) {
    if (const auto p = to_polynomial(e)) return p->empty();
    for (int k = 0; k < 17; ++k) {
        const double s = -10.0 + 1.25 * k + 0.0137;
        try {
            if (std::fabs(eval_on(e, sigma_var, s)) > 1e-14) return false;
        } catch (const DomainError&) {
            return false;
        }
    }
    return true;
}

const char* name(Var v) { return v == Var::X ? "x" : "y"; }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

double SPProblem::u(double theta) const { return phi(std::cos(theta) / std::sin(theta)); }

double SPProblem::B(double theta, double s) const {
    return eval_on(normal_mean, sigma_var, s) + u(theta) * eval_on(normal_half_diff, sigma_var, s);
}

double SPProblem::dB_ds(double theta, double s) const {
    return eval_on(normal_mean.derivative(sigma_var), sigma_var, s) +
           u(theta) * eval_on(normal_half_diff.derivative(sigma_var), sigma_var, s);
}

double SPProblem::G(double theta, double s) const {
    return eval_on(tangent_mean, sigma_var, s) + u(theta) * eval_on(tangent_half_diff, sigma_var, s);
}

double SPProblem::fast_theta(double theta, double s) const { return -std::sin(theta) * B(theta, s); }

Vec2 SPProblem::sigma_point(double s) const { return sigma_var == Var::X ? Vec2{s, 0.0} : Vec2{0.0, s}; }

std::string SPProblem::fast_str() const {
    return "theta' = -sin(theta)*(" + normal_mean.str() + " + phi(cot(theta))*" + normal_half_diff.str() + "), " +
           name(sigma_var) + "' = 0";
}

std::string SPProblem::reduced_str() const {
    return normal_mean.str() + " + phi(cot(theta))*" + normal_half_diff.str() + " = 0, " + name(sigma_var) +
           "_dot = " + tangent_mean.str() + " + phi(cot(theta))*" + tangent_half_diff.str();
}

SPProblem sp_from_regularization(const NonSmoothSystem& sys, const TransitionFunction& phi) {
    const auto coord = sys.coordinate_switching();
    if (!coord) throw PreconditionError("blow-up needs f = x or f = y, got f = " + sys.switching().str());
    const Var n = *coord;
    const Var t = n == Var::X ? Var::Y : Var::X;
    const auto normal = [&](const VectorField& X) { return (n == Var::X ? X.x : X.y).substitute(n, Expr::constant(0.0)); };
    const auto tangent = [&](const VectorField& X) { return (n == Var::X ? X.y : X.x).substitute(n, Expr::constant(0.0)); };
    const VectorField& X1 = sys.field(Field::X1);
    const VectorField& X2 = sys.field(Field::X2);
    const Expr half = Expr::constant(0.5);

    SPProblem spp{sys,
                  n,
                  t,
                  half * (normal(X1) + normal(X2)),
                  half * (normal(X1) - normal(X2)),
                  half * (tangent(X1) + tangent(X2)),
                  half * (tangent(X1) - tangent(X2)),
                  phi,
                  false};
    spp.degenerate = vanishes(spp.normal_half_diff, t);
    return spp;
}

std::vector<double> slow_manifold(const SPProblem& spp, double theta, Window window, int intervals) {
    if (!(theta > 0.0 && theta < kPi)) throw PreconditionError("theta must lie in (0, pi)");
    if (!(window.a < window.b)) throw PreconditionError("empty window");
    if (spp.degenerate && vanishes(spp.normal_mean, spp.sigma_var)) {
        throw PreconditionError("slow manifold is degenerate: B vanishes identically");
    }
    const auto g = [&](double s) -> std::optional<double> {
        try {
            return spp.B(theta, s);
        } catch (const DomainError&) {
            return std::nullopt;
        }
    };
    detail::ScanOptions opt;
    opt.intervals = intervals;
    opt.xtol = 1e-14;
    std::vector<double> out;
    for (const auto& r : detail::scan_roots(g, window.a, window.b, opt)) {
        if (std::fabs(spp.B(theta, r.s)) < 1e-10) out.push_back(r.s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct Active {
    SlowBranch branch;
    int sign = 0;  // sign of dB/ds
};

SlowSample sample(const SPProblem& spp, double theta, double y) {
    const double delta = 1e-3 * (1.0 + std::fabs(y));
    return {theta, y, std::fabs(spp.B(theta, y)), spp.G(theta, y), spp.fast_theta(theta, y + delta),
            spp.fast_theta(theta, y - delta)};
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

std::string plateau_note(const SPProblem& spp, double theta, double y) {
    const double c = std::cos(theta) / std::sin(theta);
    if (std::fabs(std::fabs(c) - 1.0) > 1e-6) return "";
    const Field w = c > 0.0 ? Field::X1 : Field::X2;
    const Expr& mean = spp.normal_mean;
    const Expr& diff = spp.normal_half_diff;
    const double nw = eval_on(w == Field::X1 ? mean + diff : mean - diff, spp.sigma_var, y);
    std::string note = std::string("plateau boundary theta=") + (c > 0.0 ? "pi/4" : "3pi/4");
    if (std::fabs(nw) <= 1e-6) note += ": " + std::string(to_string(w)) + " fold at " + name(spp.sigma_var) + "=" + fmt(y);
    return note;
}

}  // namespace

SlowTrace trace_slow_dynamics(const SPProblem& spp, const TraceOptions& options) {
    SlowTrace trace;
    trace.degenerate = spp.degenerate;
    if (spp.degenerate && vanishes(spp.normal_mean, spp.sigma_var)) {
        trace.notes.push_back("B vanishes identically: the whole blow-up locus is singular");
        return trace;
    }
    if (spp.degenerate) trace.notes.push_back("B does not depend on theta: the slow manifold is a union of fibres");

    const double lo = kPi / 4.0, hi = 3.0 * kPi / 4.0;
    const double ta = options.theta_a > 0.0 ? options.theta_a : lo + options.plateau_gap;
    const double tb = options.theta_b > 0.0 ? options.theta_b : hi - options.plateau_gap;
    if (!(ta > 0.0 && tb < kPi && ta < tb)) throw PreconditionError("theta range must satisfy 0 < a < b < pi");

    std::vector<double> grid;
    for (double th : detail::linspace(ta, tb, std::max(options.samples, 2))) {
        if (std::fabs(th - lo) < 0.5 * options.plateau_gap || std::fabs(th - hi) < 0.5 * options.plateau_gap) continue;
        grid.push_back(th);
    }

    std::vector<Active> active;
    const auto finish = [&](Active& a, std::string why) {
        if (a.branch.end.empty()) a.branch.end = std::move(why);
        trace.branches.push_back(std::move(a.branch));
    };

    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double th = grid[k];
        const std::vector<double> roots = slow_manifold(spp, th, options.window, options.intervals);
        std::vector<int> signs;
        for (double r : roots) signs.push_back(sign_of(spp.dB_ds(th, r)));

        // Greedy nearest matching of extrapolated branch ends to the new roots.
        struct Pair {
            double d;
            std::size_t branch, root;
        };
        std::vector<Pair> pairs;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const auto& pts = active[i].branch.points;
            double pred = pts.back().y;
            if (pts.size() >= 2) {
                const auto& p0 = pts[pts.size() - 2];
                const auto& p1 = pts.back();
                pred += (p1.y - p0.y) * (th - p1.theta) / (p1.theta - p0.theta);
            }
            for (std::size_t j = 0; j < roots.size(); ++j) pairs.push_back({std::fabs(roots[j] - pred), i, j});
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
        std::vector<int> branch_root(active.size(), -1);
        std::vector<bool> root_taken(roots.size(), false);
        for (const Pair& p : pairs) {
            if (branch_root[p.branch] >= 0 || root_taken[p.root]) continue;
            branch_root[p.branch] = static_cast<int>(p.root);
            root_taken[p.root] = true;
        }

        std::vector<Active> next;
        std::vector<std::size_t> ended;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const int j = branch_root[i];
            if (j >= 0 && signs[j] == active[i].sign) {
                active[i].branch.points.push_back(sample(spp, th, roots[j]));
                next.push_back(std::move(active[i]));
            } else {
                if (j >= 0) root_taken[j] = false;
                ended.push_back(i);
            }
        }
        // Two branches with opposite dB/ds vanishing together meet at a turning point.
        std::vector<bool> ended_paired(active.size(), false);
        for (std::size_t a = 0; a < ended.size(); ++a) {
            for (std::size_t b = a + 1; b < ended.size(); ++b) {
                Active& A = active[ended[a]];
                Active& Bn = active[ended[b]];
                if (ended_paired[ended[a]] || ended_paired[ended[b]] || A.sign != -Bn.sign) continue;
                const double ya = A.branch.points.back().y, yb = Bn.branch.points.back().y;
                bool between = false;
                for (const Active& o : active) {
                    const double yo = o.branch.points.back().y;
                    if (yo > std::min(ya, yb) && yo < std::max(ya, yb)) between = true;
                }
                if (between) continue;
                const TurningPoint tp{0.5 * (A.branch.points.back().theta + th), 0.5 * (ya + yb)};
                trace.turning_points.push_back(tp);
                A.branch.end = Bn.branch.end = "turning point near theta=" + fmt(tp.theta);
                ended_paired[ended[a]] = ended_paired[ended[b]] = true;
            }
        }
        for (std::size_t i : ended) {
            const double y = active[i].branch.points.back().y;
            const double span = options.window.b - options.window.a;
            const bool near_edge = std::min(y - options.window.a, options.window.b - y) < 0.05 * span;
            finish(active[i], near_edge ? "leaves window" : "dB/ds changes sign: turning point");
        }
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (root_taken[j]) continue;
            Active a;
            a.sign = signs[j];
            a.branch.points.push_back(sample(spp, th, roots[j]));
            std::string note = k == 0 ? plateau_note(spp, th, roots[j]) : "";
            if (note.empty()) note = k == 0 ? "range start" : "enters window";
            a.branch.start = note;
            next.push_back(std::move(a));
        }
        active = std::move(next);
    }
    for (Active& a : active) {
        const auto& p = a.branch.points.back();
        std::string note = plateau_note(spp, p.theta, p.y);
        finish(a, note.empty() ? "range end" : note);
    }
    std::stable_sort(trace.branches.begin(), trace.branches.end(), [](const SlowBranch& a, const SlowBranch& b) {
        const auto& pa = a.points.front();
        const auto& pb = b.points.front();
        return pa.theta != pb.theta ? pa.theta < pb.theta : pa.y < pb.y;
    });
    return trace;
}

}  // namespace filippov
