#include <cmath>
#include <random>

#include "../support.hpp"
#include "doctest.h"
#include "filippov/errors.hpp"

using namespace filippov;
using fixtures::one_fold;

namespace {

// Tangential sliding component for f = y from the convex combination, written out by hand.
double h_oracle(double x, double mu) {
    const double l1 = -x - 1.0;
    const double l2 = 1.0;
    const double x1 = x - 1.0;
    const double x2 = -x * x + 1.5 * x - 0.5 - mu;
    return (l2 * x1 - l1 * x2) / (l2 - l1);
}

double bisect(const std::function<double(double)>& g, double a, double b) {
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        (g(a) * g(m) <= 0.0 ? b : a) = m;
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("direction function of the one-fold example") {
    const auto sys = one_fold();
    CHECK(direction_function(sys, 0.5) == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(direction_function(sys, 1.5) == doctest::Approx(-3.0 / 14.0).epsilon(1e-12));
    CHECK(std::fabs(direction_function(sys, 1.0)) < 1e-12);
    for (double x = -0.9; x < 5.0; x += 0.37) {
        CHECK(direction_function(sys, x) == doctest::Approx(h_oracle(x, 0.0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)direction_function(sys, -2.0), DomainError);
}

TEST_CASE("H times the normal jump is the frame determinant") {
    const auto sys = one_fold();
    // det[X1 X2] on y = 0 equals -(x - 1)^2 (x + 3/2) for mu = 0.
    const double x = 0.5;
    const auto [n1, n2] = frame_normals(sys, x);
    CHECK(direction_function(sys, x) * (n2 - n1) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(frame_determinant(sys, x) == doctest::Approx(-(x - 1) * (x - 1) * (x + 1.5)).epsilon(1e-12));
}

TEST_CASE("region census of the one-fold example") {
    const auto sys = one_fold();
    for (int k = 0; k <= 600; ++k) {
        const double x = -3.0 + 6.0 * k / 600.0;
        const SigmaClass c = classify_point(sys, {x, 0.0});
        if (std::fabs(x + 1.0) < 1e-12) {
            CHECK(c.region == Region::FoldVisible);
            CHECK(c.field == Field::X1);
        } else if (std::fabs(x - 1.0) < 1e-12) {
            CHECK(c.region == Region::PseudoEquilibrium);
            CHECK(c.pseudo == PseudoKind::NonHyperbolic);
        } else if (x < -1.0) {
            CHECK(c.region == Region::Sewing);
        } else {
            CHECK(c.region == Region::Sliding);
        }
    }
    const auto folds = fold_census(sys, -5, 5);
    REQUIRE(folds.size() == 1);
    CHECK(folds[0].point.x == doctest::Approx(-1.0));
    CHECK(folds[0].visible);
}

TEST_CASE("pseudo-equilibria of the perturbed family") {
    const double mu = -0.25;
    const auto sys = one_fold(mu);
    // Zeros of (x - 1)^2 (x + 3/2) + mu (x + 1), located independently.
    const auto det = [&](double x) { return (x - 1) * (x - 1) * (x + 1.5) + mu * (x + 1); };
    const double saddle = bisect(det, 0.0, 1.0);
    const double attractor = bisect(det, 1.0, 2.0);
    const auto pes = pseudo_equilibria(sys, -0.99, 5);
    REQUIRE(pes.size() == 2);
    CHECK(pes[0].s == doctest::Approx(saddle).epsilon(1e-10));
    CHECK(pes[0].kind == PseudoKind::SigmaSaddle);
    CHECK(pes[1].s == doctest::Approx(attractor).epsilon(1e-10));
    CHECK(pes[1].kind == PseudoKind::SigmaAttractor);
    CHECK(pseudo_equilibria(one_fold(0.25), -0.99, 5).empty());
}

TEST_CASE("sliding field matches the segment construction on random systems") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    int checked = 0;
    for (int sys_i = 0; sys_i < 10; ++sys_i) {
        const double a = coef(rng), b = 1.0 + std::fabs(coef(rng)), c = coef(rng);
        const std::string f = fixtures::num(a) + "*x+" + fixtures::num(b) + "*y+" + fixtures::num(c);
        const auto sys = fixtures::make(fixtures::random_quadratic(rng, 1.0), "-3+" + fixtures::random_quadratic(rng, 0.3),
                                        fixtures::random_quadratic(rng, 1.0), "3+" + fixtures::random_quadratic(rng, 0.3), f);
        const Vec2 n = Vec2{a, b} / norm(Vec2{a, b});
        for (int k = 0; k < 40; ++k) {
            const double s = -2.0 + 4.0 * k / 39.0;
            const Vec2 q = sys.chart().point(s);
            const SigmaClass cls = classify_point(sys, q);
            if (cls.region != Region::Sliding) continue;
            const Vec2 p1 = q + sys.eval(Field::X1, q);
            const Vec2 p2 = q + sys.eval(Field::X2, q);
            // Intersection of the segment [p1, p2] with the tangent line through q.
            const double d1 = dot(p1 - q, n), d2 = dot(p2 - q, n);
            const Vec2 hit = p1 + (d1 / (d1 - d2)) * (p2 - p1);
            const Vec2 v = sliding_field(sys, q);
            CHECK(norm(v - (hit - q)) < 1e-9 * (1.0 + norm(v)));
            const Vec2 t{n.y, -n.x};
            const auto [m1, m2] = frame_normals(sys, s);
            CHECK(std::fabs(direction_function(sys, s) * (m2 - m1) - frame_determinant(sys, s)) < 1e-9);
            CHECK(std::fabs(std::fabs(direction_function(sys, s)) - std::fabs(dot(v, t))) < 1e-9);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("closed switching curve") {
    const auto sys = fixtures::circle();
    CHECK(sys.chart().kind() == SigmaChart::Kind::Curve);
    REQUIRE(sys.chart().closed());
    CHECK(sys.chart().period() == doctest::Approx(2 * M_PI).epsilon(1e-6));
    for (double s = 0.1; s < 6.2; s += 0.7) {
        const Vec2 q = sys.chart().point(s);
        CHECK(std::fabs(norm(q) - 1.0) < 1e-9);
        CHECK(classify_point(sys, q).region == Region::Sliding);
        const Vec2 v = sliding_field(sys, q);
        CHECK(norm(v - Vec2{-q.y, q.x}) < 1e-9);
    }
}

TEST_CASE("coordinate switching and time reversal") {
    CHECK(one_fold().coordinate_switching() == Var::Y);
    CHECK(fixtures::vertical_switch().coordinate_switching() == Var::X);
    CHECK_FALSE(fixtures::circle().coordinate_switching().has_value());
    const auto r = one_fold().reversed();
    CHECK(r.eval(Field::X1, {2, 3}) == -one_fold().eval(Field::X1, {2, 3}));
    CHECK_THROWS_AS(fixtures::make("1", "1", "1", "1", "3"), PreconditionError);
}
