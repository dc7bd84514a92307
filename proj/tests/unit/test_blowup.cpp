#include <cmath>
#include <numbers>

#include "../support.hpp"
#include "doctest.h"
#include "filippov/blowup.hpp"
#include "filippov/errors.hpp"

using namespace filippov;

namespace {

bool same_polynomial(const Expr& e, const std::string& text) {
    const auto a = to_polynomial(e);
    const auto b = to_polynomial(parse(text));
    return a && b && polynomials_equal(*a, *b);
}

// theta with cot(theta) = c.
double theta_of(double c) { return std::atan2(1.0, c); }

}  // namespace

TEST_CASE("fast and reduced systems of the one-fold example with f = x") {
    const SPProblem spp = sp_from_regularization(fixtures::vertical_switch());
    CHECK(spp.sigma_var == Var::Y);
    CHECK(same_polynomial(spp.normal_mean, "y/2"));
    CHECK(same_polynomial(spp.normal_half_diff, "(y-2)/2"));
    CHECK(same_polynomial(spp.tangent_mean, "(y+3)/2"));
    CHECK(same_polynomial(spp.tangent_half_diff, "(y-1)/2"));
    CHECK_FALSE(spp.degenerate);
    const double th = 1.1, y = 0.7, u = TransitionFunction::quintic()(1.0 / std::tan(th));
    CHECK(spp.fast_theta(th, y) == doctest::Approx(-std::sin(th) * (y / 2 + u * (y - 2) / 2)));
    CHECK(spp.G(th, y) == doctest::Approx((y + 3) / 2 + u * (y - 1) / 2));
}

TEST_CASE("slow manifold values") {
    const SPProblem spp = sp_from_regularization(fixtures::vertical_switch());
    const auto at_quarter = slow_manifold(spp, std::numbers::pi / 4);
    REQUIRE(at_quarter.size() == 1);
    CHECK(std::fabs(at_quarter[0] - 1.0) < 1e-9);
    const auto at_half = slow_manifold(spp, std::numbers::pi / 2);
    REQUIRE(at_half.size() == 1);
    CHECK(std::fabs(at_half[0]) < 1e-12);
    // Closed form y = 2 phi / (1 + phi).
    for (double c : {0.9, 0.3, -0.2, -0.6, -0.95}) {
        const double th = theta_of(c);
        const double u = TransitionFunction::quintic()(c);
        const auto ys = slow_manifold(spp, th, {-1e5, 10});
        REQUIRE(ys.size() == 1);
        CHECK(ys[0] == doctest::Approx(2 * u / (1 + u)).epsilon(1e-10));
        CHECK(std::fabs(spp.B(th, ys[0])) < 1e-10);
    }
    CHECK_THROWS_AS((void)slow_manifold(spp, 0.0), PreconditionError);
    CHECK_THROWS_AS((void)slow_manifold(spp, 4.0), PreconditionError);
}

TEST_CASE("branch of the one-fold example descends towards 3 pi / 4") {
    const SPProblem spp = sp_from_regularization(fixtures::vertical_switch());
    TraceOptions opt;
    opt.window = {-50, 5};
    const SlowTrace tr = trace_slow_dynamics(spp, opt);
    REQUIRE(tr.branches.size() == 1);
    const SlowBranch& b = tr.branches[0];
    CHECK(b.start.find("X1 fold") != std::string::npos);
    CHECK(b.end == "leaves window");
    CHECK(b.points.front().y == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t i = 1; i < b.points.size(); ++i) CHECK(b.points[i].y < b.points[i - 1].y);
    for (const SlowSample& s : b.points) {
        CHECK(s.residual < 1e-10);
        // Fast flow points towards the manifold from both sides: it is attracting.
        CHECK(s.dtheta_fast_above < 0.0);
        CHECK(s.dtheta_fast_below > 0.0);
    }
}

TEST_CASE("two-fold example: branches end on the fold points") {
    const SPProblem spp = sp_from_regularization(fixtures::two_fold());
    CHECK(same_polynomial(spp.normal_mean, "-y"));
    CHECK(same_polynomial(spp.normal_half_diff, "3*y^2-2"));
    const SlowTrace tr = trace_slow_dynamics(spp);
    int x1_ends = 0, x2_ends = 0;
    for (const SlowBranch& b : tr.branches) {
        for (const std::string* note : {&b.start, &b.end}) {
            if (note->find("X1 fold") != std::string::npos) ++x1_ends;
            if (note->find("X2 fold") != std::string::npos) ++x2_ends;
        }
    }
    CHECK(x1_ends == 2);
    CHECK(x2_ends == 2);
    CHECK(tr.turning_points.empty());
    // Roots of the normal components: y in {1, -2/3} for X1 and {2/3, -1} for X2.
    const auto lo = slow_manifold(spp, std::numbers::pi / 4 + 1e-9);
    REQUIRE(lo.size() == 2);
    CHECK(lo[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-7));
    CHECK(lo[1] == doctest::Approx(1.0).epsilon(1e-7));
    const auto hi = slow_manifold(spp, 3 * std::numbers::pi / 4 - 1e-9);
    REQUIRE(hi.size() == 2);
    CHECK(hi[0] == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(hi[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("reduced flow agrees with the sliding field") {
    const auto sys = fixtures::vertical_switch();
    const SPProblem spp = sp_from_regularization(sys);
    for (double c = -0.95; c < 0.96; c += 0.1) {
        const double th = theta_of(c);
        for (double y : slow_manifold(spp, th, {-1e3, 10})) {
            const Vec2 q = spp.sigma_point(y);
            const Vec2 v = sliding_field(sys, q);
            CHECK(spp.G(th, y) == doctest::Approx(v.y).epsilon(1e-9));
        }
    }
}

TEST_CASE("degenerate and unsupported problems") {
    const SPProblem flat = sp_from_regularization(fixtures::make("0", "1", "0", "1", "x"));
    CHECK(flat.degenerate);
    CHECK_THROWS_AS((void)slow_manifold(flat, 1.0), PreconditionError);
    const SlowTrace tr = trace_slow_dynamics(flat);
    CHECK(tr.degenerate);
    CHECK(tr.branches.empty());
    const SPProblem same = sp_from_regularization(fixtures::make("y-1", "1", "y-1", "1", "x"));
    CHECK(same.degenerate);
    const auto ys = slow_manifold(same, 1.0);
    REQUIRE(ys.size() == 1);
    CHECK(ys[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)sp_from_regularization(fixtures::circle()), PreconditionError);
}

TEST_CASE("switching along y swaps the component roles") {
    const SPProblem spp = sp_from_regularization(fixtures::one_fold());
    CHECK(spp.sigma_var == Var::X);
    CHECK(same_polynomial(spp.normal_mean, "(-x-1+1)/2"));
    CHECK(same_polynomial(spp.tangent_mean, "(x-1-x^2+1.5*x-0.5)/2"));
}
