// Acceptance run: one PASS/FAIL line per criterion with its runtime.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "../support.hpp"
#include "filippov/blowup.hpp"
#include "filippov/canard.hpp"
#include "filippov/errors.hpp"
#include "filippov/index.hpp"
#include "filippov/regularize.hpp"

using namespace filippov;

namespace {

// Pinned tolerances and budgets.
constexpr double kValueTol = 1e-9;
constexpr double kIdentityTol = 1e-9;
constexpr double kSegmentTol = 1e-9;
constexpr double kBifurcationTol = 1e-6;
constexpr double kIntegerTol = 1e-6;
constexpr double kResidualTol = 1e-10;
constexpr double kDerivativeTol = 1e-6;
constexpr double kConvergenceRatio = 3.0;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    Outcome& out;
    void operator()(bool ok, const std::string& what) {
        if (!ok) {
            out.pass = false;
            if (!out.detail.empty()) out.detail += "; ";
            out.detail += what;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<Vec2> reversed(std::vector<Vec2> p) {
    std::reverse(p.begin(), p.end());
    return p;
}

// ---- 1 ----
Outcome direction_values() {
    Outcome o;
    Check c{o};
    const auto sys = fixtures::one_fold();
    const double h05 = direction_function(sys, 0.5);
    const double h15 = direction_function(sys, 1.5);
    const double h1 = direction_function(sys, 1.0);
    c(std::fabs(h05 + 1.0 / 5.0) < kValueTol, "H(1/2) = " + fmt("%.15g", h05));
    c(std::fabs(h15 + 3.0 / 14.0) < kValueTol, "H(3/2) = " + fmt("%.15g", h15));
    c(std::fabs(h1) < kValueTol, "H(1) = " + fmt("%.3g", h1));
    if (o.pass) o.detail = "H(1/2)=" + fmt("%.12f", h05) + " H(3/2)=" + fmt("%.12f", h15) + " H(1)=" + fmt("%.1e", h1);
    return o;
}

// ---- 2 ----
Outcome region_census() {
    Outcome o;
    Check c{o};
    const auto sys = fixtures::one_fold();
    int sewing = 0, sliding = 0;
    for (int k = 0; k <= 600; ++k) {
        const double x = -3.0 + 6.0 * k / 600.0;
        const SigmaClass cls = classify_point(sys, {x, 0.0});
        if (k == 200) {
            c(cls.region == Region::FoldVisible && cls.field == Field::X1, "(-1,0) is " + cls.label());
        } else if (k == 400) {
            c(cls.region == Region::PseudoEquilibrium && cls.pseudo == PseudoKind::NonHyperbolic,
              "(1,0) is " + cls.label());
        } else if (x < -1.0) {
            c(cls.region == Region::Sewing, "x=" + fmt("%.3f", x) + " is " + cls.label());
            ++sewing;
        } else {
            c(cls.region == Region::Sliding, "x=" + fmt("%.3f", x) + " is " + cls.label());
            ++sliding;
        }
    }
    if (o.pass) o.detail = std::to_string(sewing) + " sewing, " + std::to_string(sliding) + " sliding, fold and pseudo-equilibrium";
    return o;
}

NonSmoothSystem random_system(std::mt19937_64& rng, Vec2& normal) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const double a = coef(rng), b = 1.0 + std::fabs(coef(rng)), c = coef(rng);
    normal = Vec2{a, b} / norm(Vec2{a, b});
    const std::string f = fixtures::num(a) + "*x+" + fixtures::num(b) + "*y+" + fixtures::num(c);
    return fixtures::make(fixtures::random_quadratic(rng, 1.0), "-3+" + fixtures::random_quadratic(rng, 0.3),
                          fixtures::random_quadratic(rng, 1.0), "3+" + fixtures::random_quadratic(rng, 0.3), f);
}

// Sliding chart parameters of a random system, drawn uniformly from [-2, 2].
std::vector<double> sliding_points(const NonSmoothSystem& sys, std::mt19937_64& rng, int wanted) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> out;
    for (int tries = 0; tries < 50 * wanted && static_cast<int>(out.size()) < wanted; ++tries) {
        const double s = u(rng);
        if (classify_point(sys, sys.chart().point(s)).region == Region::Sliding) out.push_back(s);
    }
    return out;
}

// ---- 3 ----
Outcome direction_identity() {
    Outcome o;
    Check c{o};
    std::mt19937_64 rng(31);
    int systems = 0, points = 0;
    double worst = 0.0;
    for (int attempt = 0; attempt < 500 && systems < 50; ++attempt) {
        Vec2 n;
        const auto sys = random_system(rng, n);
        const auto ss = sliding_points(sys, rng, 100);
        if (ss.size() < 100) continue;
        ++systems;
        for (double s : ss) {
            const auto [l1, l2] = frame_normals(sys, s);
            worst = std::max(worst, std::fabs(direction_function(sys, s) * (l2 - l1) - frame_determinant(sys, s)));
            ++points;
        }
    }
    c(systems == 50, "only " + std::to_string(systems) + " systems with a sliding interval");
    c(worst < kIdentityTol, "max residual " + fmt("%.3e", worst));
    const auto sec = fixtures::one_fold();
    const auto [l1, l2] = frame_normals(sec, 0.5);
    const double prod = direction_function(sec, 0.5) * (l2 - l1);
    c(std::fabs(l2 - l1 - 2.5) < kValueTol, "L2-L1 at 1/2 = " + fmt("%.15g", l2 - l1));
    c(std::fabs(prod + 0.5) < kValueTol, "(-1/5)(5/2) = " + fmt("%.15g", prod));
    c(std::fabs(frame_determinant(sec, 0.5) + 0.5) < kValueTol, "det at 1/2 is not -1/2");
    if (o.pass) o.detail = std::to_string(points) + " points, max residual " + fmt("%.2e", worst) + ", H(1/2)(L2-L1) = -1/2";
    return o;
}

// ---- 4 ----
Outcome segment_oracle() {
    Outcome o;
    Check c{o};
    std::mt19937_64 rng(47);
    int systems = 0, points = 0;
    double worst = 0.0;
    for (int attempt = 0; attempt < 200 && systems < 10; ++attempt) {
        Vec2 n;
        const auto sys = random_system(rng, n);
        const auto ss = sliding_points(sys, rng, 10);
        if (ss.size() < 10) continue;
        ++systems;
        for (double s : ss) {
            const Vec2 q = sys.chart().point(s);
            // The segment from q + X1 to q + X2 meets the tangent line at q + X0.
            const Vec2 p1 = q + sys.eval(Field::X1, q);
            const Vec2 p2 = q + sys.eval(Field::X2, q);
            const double d1 = dot(p1 - q, n), d2 = dot(p2 - q, n);
            const Vec2 hit = p1 + (d1 / (d1 - d2)) * (p2 - p1);
            const Vec2 v = sliding_field(sys, q);
            worst = std::max(worst, norm(v - (hit - q)) / (1.0 + norm(v)));
            ++points;
        }
    }
    c(systems == 10 && points == 100, "only " + std::to_string(points) + " sliding points");
    c(worst < kSegmentTol, "max deviation " + fmt("%.3e", worst));
    if (o.pass) o.detail = std::to_string(points) + " points, max deviation " + fmt("%.2e", worst);
    return o;
}

// ---- 5 ----
Outcome theorem_a_equivalence() {
    Outcome o;
    Check c{o};
    const CanardReport rm = detect_canard_one_fold(fixtures::one_fold(-0.25));
    const CanardReport r0 = detect_canard_one_fold(fixtures::one_fold(0.0));
    const CanardReport rp = detect_canard_one_fold(fixtures::one_fold(0.25));
    for (const CanardReport* r : {&rm, &r0, &rp}) c(r->theorem_a == r->corollary, "family member disagrees");
    c(!rm.found && rm.pseudo_equilibria.size() == 2, "mu=-1/4 is not two pseudo-equilibria");
    c(!r0.found && r0.pseudo_equilibria.size() == 1, "mu=0 is not a Sigma-loop");
    c(rp.found && rp.kind == CanardKind::III, "mu=1/4 is not a kind III canard");

    // One visible X1 fold at (p - 1, 0) with a returning focal arc; X2 crosses upward.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pu(-0.4, 0.4), cu(-1.0, 1.0), ku(0.5, 2.0);
    int admissible = 0, found = 0, agree = 0;
    for (int attempt = 0; attempt < 400 && admissible < 50; ++attempt) {
        const double p = pu(rng), k = ku(rng);
        const std::string x2x = fixtures::num(cu(rng)) + "+" + fixtures::num(cu(rng)) + "*x+" +
                                fixtures::num(-0.5 + 0.5 * cu(rng)) + "*x^2";
        const auto sys = fixtures::make("x+y-1", "-x+y-1+" + fixtures::num(p), x2x, fixtures::num(k), "y");
        CanardReport r;
        try {
            r = detect_canard_one_fold(sys);
        } catch (const Error&) {
            continue;
        }
        ++admissible;
        found += r.found ? 1 : 0;
        if (r.theorem_a == r.corollary) ++agree;
    }
    c(admissible == 50, "only " + std::to_string(admissible) + " admissible systems");
    c(agree == admissible, std::to_string(admissible - agree) + " disagreements");
    c(found > 0 && found < admissible, "random family is one-sided: " + std::to_string(found) + " canards");
    if (o.pass) {
        o.detail = std::to_string(agree) + "/50 agree (" + std::to_string(found) +
                   " canards); mu=-1/4,0,1/4: two pseudo-equilibria, Sigma-loop, kind III";
    }
    return o;
}

// ---- 6 ----
Outcome bifurcation() {
    Outcome o;
    Check c{o};
    const ScanResult scan = sigma_loop_scan([](double mu) { return fixtures::one_fold(mu); }, -0.5, 0.5, 41);
    c(scan.bifurcation_mu.has_value() && scan.bifurcation_s.has_value(), "no bifurcation located");
    if (!o.pass) return o;
    c(std::fabs(*scan.bifurcation_mu) < kBifurcationTol, "mu* = " + fmt("%.3e", *scan.bifurcation_mu));
    c(std::fabs(*scan.bifurcation_s - 1.0) < kBifurcationTol, "x* = " + fmt("%.9f", *scan.bifurcation_s));
    if (o.pass) o.detail = "mu*=" + fmt("%.2e", *scan.bifurcation_mu) + " x*=" + fmt("%.9f", *scan.bifurcation_s);
    return o;
}

// ---- 7 ----
Outcome convergence() {
    Outcome o;
    Check c{o};
    const auto sys = fixtures::one_fold(0.25);
    const CanardReport r = detect_canard_one_fold(sys);
    c(r.found, "no canard at mu=1/4");
    if (!o.pass) return o;
    const std::vector<double> eps{0.1, 0.05, 0.02, 0.01};
    const ConvergenceStudy st = convergence_study(sys, r.cycle.polyline(), eps);
    std::string ds;
    for (const StudyRow& row : st.rows) {
        c(row.found, "no cycle at eps=" + fmt("%g", row.epsilon) + ": " + row.error);
        c(std::fabs(row.multiplier) < 1.0, "multiplier " + fmt("%.3e", row.multiplier) + " at eps=" + fmt("%g", row.epsilon));
        ds += (ds.empty() ? "" : ", ") + fmt("%.4f", row.hausdorff);
    }
    c(st.rows.size() == 4, "missing rows");
    c(st.strictly_decreasing, "D not strictly decreasing: " + ds);
    if (st.rows.size() == 4) {
        c(st.rows[3].hausdorff < st.rows[0].hausdorff / kConvergenceRatio, "D(0.01) >= D(0.1)/3: " + ds);
    }
    if (o.pass) o.detail = "D = " + ds;
    return o;
}

// ---- 8 ----
Outcome regularization_exact() {
    Outcome o;
    Check c{o};
    const auto sys = fixtures::one_fold(0.25);
    const double eps = 0.05;
    const RegularizedField xe(sys, eps);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    int above = 0, below = 0, bad = 0;
    while (above < 1000 || below < 1000) {
        const Vec2 q{u(rng), u(rng)};
        const double f = sys.f(q);
        if (f >= eps && above < 1000) {
            ++above;
            const Vec2 v = xe(q), w = sys.eval(Field::X1, q);
            if (xe.weight(q) != 1.0 || v.x != w.x || v.y != w.y) ++bad;
        } else if (f <= -eps && below < 1000) {
            ++below;
            const Vec2 v = xe(q), w = sys.eval(Field::X2, q);
            if (xe.weight(q) != 0.0 || v.x != w.x || v.y != w.y) ++bad;
        }
    }
    c(bad == 0, std::to_string(bad) + " points differ");
    if (o.pass) o.detail = "1000 points on each side bitwise equal";
    return o;
}

// ---- 9 ----
Outcome index_suite() {
    Outcome o;
    Check c{o};
    double worst = 0.0;
    const auto expect = [&](const NonSmoothSystem& sys, const std::vector<Vec2>& path, int want, const std::string& what) {
        for (const bool rev : {false, true}) {
            const IndexReport r = angle_winding(sys, rev ? reversed(path) : path);
            const int w = rev ? -want : want;
            worst = std::max(worst, std::fabs(r.raw_winding - w));
            c(r.index == w && std::fabs(r.raw_winding - w) < kIntegerTol,
              what + (rev ? " reversed" : "") + " winds " + fmt("%.9f", r.raw_winding));
        }
    };
    const auto smooth = [](const std::string& fx, const std::string& fy) {
        return fixtures::make(fx, fy, fx, fy, "y+5");
    };
    const auto unit = circle_path({0, 0}, 1.0);
    expect(smooth("x", "-y"), unit, -1, "saddle");
    expect(smooth("x-y", "x+y"), unit, 1, "focus");

    const auto circ = fixtures::circle();
    expect(circ, circle_path({0, 0}, 1.001), 1, "kind II circle");
    int census = 0;
    for (const InteriorPoint& p : interior_census(circ, circle_path({0, 0}, 1.0))) census += p.index;
    c(census == 1, "kind II interior sum " + std::to_string(census));

    const auto sys = fixtures::one_fold(0.25);
    const CanardReport r = detect_canard_one_fold(sys);
    c(r.found, "no canard at mu=1/4");
    if (r.found) {
        const auto cycle = r.cycle.polyline();
        const TheoremCReport t = verify_theorem_c(sys, cycle);
        c(t.holds && t.winding == 1 && t.interior_sum == 1, "index theorem: " + t.verdict);
        worst = std::max(worst, std::fabs(t.path_report.raw_winding - 1.0));
        // Same offset path, both orientations.
        Vec2 centre{};
        for (std::size_t i = 0; i + 1 < cycle.size(); ++i) centre = centre + cycle[i];
        centre = centre / static_cast<double>(cycle.size() - 1);
        std::vector<Vec2> inner;
        for (std::size_t i = 0; i + 1 < cycle.size(); ++i) inner.push_back(centre + (1.0 - 1e-3) * (cycle[i] - centre));
        const int w = angle_winding(sys, inner).index;
        expect(sys, inner, w, "canard cycle");
        c(std::abs(w) == 1, "canard cycle winds " + std::to_string(w));
    }
    if (o.pass) o.detail = "saddle -1, focus +1, circle +1 (interior 1), canard 1 = interior 1; max |raw - int| " + fmt("%.1e", worst);
    return o;
}

// ---- 10 ----
Outcome blowup() {
    Outcome o;
    Check c{o};
    const auto sys = fixtures::vertical_switch();
    const SPProblem spp = sp_from_regularization(sys);
    const auto same = [](const Expr& e, const std::string& text) {
        const auto a = to_polynomial(e);
        const auto b = to_polynomial(parse(text));
        return a && b && polynomials_equal(*a, *b);
    };
    // theta' = -sin(theta)(y/2 + phi(cot theta)(y-2)/2), y' = 0;  y_dot = (y+3)/2 + phi(cot theta)(y-1)/2.
    c(spp.sigma_var == Var::Y, "blow-up variable is not y");
    c(same(spp.normal_mean, "y/2") && same(spp.normal_half_diff, "(y-2)/2"), "fast system differs: " + spp.fast_str());
    c(same(spp.tangent_mean, "(y+3)/2") && same(spp.tangent_half_diff, "(y-1)/2"), "reduced system differs: " + spp.reduced_str());

    const auto q = slow_manifold(spp, std::numbers::pi / 4);
    c(q.size() == 1 && std::fabs(q[0] - 1.0) < kValueTol, "slow manifold at pi/4");

    const TransitionFunction phi = TransitionFunction::quintic();
    double most_negative = 0.0;
    for (const double gap : {9e-4, 5e-4, 1e-4, 1e-5}) {
        // cot(theta) with phi(cot theta) = -1 + gap.
        double a = -1.0, b = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (a + b);
            (phi(m) + 1.0 < gap ? a : b) = m;
        }
        const double th = std::atan2(1.0, 0.5 * (a + b));
        const double u = spp.u(th);
        c(u > -1.0 && u < -1.0 + 1e-3, "phi(cot theta) outside the band");
        const auto ys = slow_manifold(spp, th, {-1e7, 10});
        c(ys.size() == 1 && ys[0] < -1e3, "y(theta) not below -1000 at gap " + fmt("%g", gap));
        if (!ys.empty()) most_negative = std::min(most_negative, ys[0]);
    }

    TraceOptions opt;
    opt.window = {-50, 5};
    const SlowTrace tr = trace_slow_dynamics(spp, opt);
    double worst = 0.0;
    int samples = 0;
    for (const SlowBranch& br : tr.branches) {
        for (const SlowSample& s : br.points) {
            worst = std::max(worst, s.residual);
            ++samples;
        }
    }
    c(samples > 0 && worst < kResidualTol, "branch residual " + fmt("%.3e", worst));

    int matched = 0;
    for (int k = 0; k < 50; ++k) {
        const double cval = -0.98 + 1.96 * k / 49.0;
        const double th = std::atan2(1.0, cval);
        const auto ys = slow_manifold(spp, th, {-1e7, 10});
        if (ys.size() != 1) continue;
        const double g = spp.G(th, ys[0]);
        const Vec2 v = sliding_field(sys, spp.sigma_point(ys[0]));
        if ((g > 0.0) == (v.y > 0.0) && (g < 0.0) == (v.y < 0.0)) ++matched;
    }
    c(matched == 50, "reduced flow sign matches at " + std::to_string(matched) + "/50 points");
    if (o.pass) {
        o.detail = "formulas match, y(pi/4)=1, min y " + fmt("%.3g", most_negative) + ", residual " + fmt("%.1e", worst) +
                   ", 50/50 signs";
    }
    return o;
}

std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 11);
    std::uniform_real_distribution<double> cu(-3.0, 3.0);
    char buf[32];
    switch (pick(rng)) {
        case 0: return "x";
        case 1: return "y";
        case 2: std::snprintf(buf, sizeof buf, "%.4f", cu(rng)); return buf;
        case 3: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1) + ")";
        case 5: return "(" + random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1) + ")";
        case 6: return "(" + random_expr(rng, depth - 1) + ")/(2+cos(" + random_expr(rng, depth - 1) + "))";
        case 7: return "sin(" + random_expr(rng, depth - 1) + ")";
        case 8: return "exp(-(" + random_expr(rng, depth - 1) + ")^2)";
        case 9: return "ln(1+(" + random_expr(rng, depth - 1) + ")^2)";
        case 10: return "sqrt(1+(" + random_expr(rng, depth - 1) + ")^2)";
        default: return "(" + random_expr(rng, depth - 1) + ")^3";
    }
}

// ---- 11 ----
Outcome expression_layer() {
    Outcome o;
    Check c{o};
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> pu(-1.5, 1.5);
    double worst = 0.0;
    int round_trip_failures = 0;
    for (int i = 0; i < 100; ++i) {
        const Expr e = parse(random_expr(rng, 4));
        const std::string text = e.str();
        if (parse(text).str() != text) ++round_trip_failures;
        const Expr dx = e.derivative(Var::X), dy = e.derivative(Var::Y);
        for (int k = 0; k < 10; ++k) {
            const double x = pu(rng), y = pu(rng);
            // Richardson-extrapolated central differences.
            const auto cd = [&](Var v, double h) {
                return v == Var::X ? (e.eval(x + h, y) - e.eval(x - h, y)) / (2 * h)
                                   : (e.eval(x, y + h) - e.eval(x, y - h)) / (2 * h);
            };
            for (const Var v : {Var::X, Var::Y}) {
                const double h = 1e-3;
                const double fd = (4.0 * cd(v, h / 2) - cd(v, h)) / 3.0;
                const double sym = (v == Var::X ? dx : dy).eval(x, y);
                worst = std::max(worst, std::fabs(sym - fd) / std::max(1.0, std::fabs(sym)));
            }
        }
    }
    c(worst < kDerivativeTol, "max relative error " + fmt("%.3e", worst));
    c(round_trip_failures == 0, std::to_string(round_trip_failures) + " round-trip failures");
    if (o.pass) o.detail = "1000 points, max relative error " + fmt("%.2e", worst) + ", round trip exact";
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "direction function values", 1.0, direction_values},
        {2, "region and fold census", 1.0, region_census},
        {3, "direction function identity", 5.0, direction_identity},
        {4, "sliding field segment oracle", 5.0, segment_oracle},
        {5, "canard conditions vs zero-free H", 30.0, theorem_a_equivalence},
        {6, "Sigma-loop bifurcation", 10.0, bifurcation},
        {7, "regularized cycles converge", 120.0, convergence},
        {8, "regularization exactness", 1.0, regularization_exact},
        {9, "Poincare index suite", 10.0, index_suite},
        {10, "blow-up slow dynamics", 10.0, blowup},
        {11, "expression layer", 5.0, expression_layer},
    };
    int failures = 0;
    for (const Criterion& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt > cr.budget_s) {
            o.pass = false;
            o.detail += (o.detail.empty() ? "" : "; ") + fmt("over budget of %.0f s", cr.budget_s);
        }
        std::printf("%s [%2d] %-34s %7.3fs  %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.name, dt, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
