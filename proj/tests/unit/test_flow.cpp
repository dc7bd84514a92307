#include <cmath>

#include "../support.hpp"
#include "doctest.h"
#include "filippov/errors.hpp"
#include "filippov/flow.hpp"

using namespace filippov;

TEST_CASE("fold arc of the one-fold example is focal and returns at the closed-form point") {
    const auto sys = fixtures::one_fold();
    const ArcKindResult r = arc_kind(sys, {-1.0, 0.0});
    CHECK(r.kind == ArcKind::Focal);
    CHECK(r.field == Field::X1);
    CHECK(r.folds_between == 0);
    CHECK(r.ret.x == doctest::Approx(fixtures::loop_return_x()).epsilon(1e-9));
    CHECK(std::fabs(r.ret.y) < 1e-9);
    for (const ArcPoint& p : r.arc.points) CHECK(p.q.y >= -1e-9);
}

TEST_CASE("arc_kind preconditions") {
    const auto sys = fixtures::one_fold();
    CHECK_THROWS_AS((void)arc_kind(sys, {0.5, 0.0}), PreconditionError);
    CHECK_THROWS_AS((void)arc_kind(fixtures::two_fold(), {0.0, 1.0}), NumericError);
}

TEST_CASE("sliding orbit leaves at the visible fold and re-enters sliding") {
    const auto sys = fixtures::one_fold();
    FlowSettings fs;
    fs.t_max = 50.0;
    const HybridOrbit o = hybrid_orbit(sys, {0.5, 0.0}, fs);
    REQUIRE(o.arcs.size() >= 3);
    CHECK(o.arcs[0].regime == Regime::Sliding);
    CHECK(o.arcs[0].end == ArcEnd::HitFold);
    CHECK(norm(o.arcs[0].finish() - Vec2{-1.0, 0.0}) < 1e-8);
    CHECK(o.transitions[0].kind == Transition::FoldExit);
    CHECK(o.arcs[1].regime == Regime::X1Arc);
    CHECK(o.arcs[1].finish().x == doctest::Approx(fixtures::loop_return_x()).epsilon(1e-8));
    CHECK(o.transitions[1].kind == Transition::SlidingEntry);
    CHECK(o.arcs[2].regime == Regime::Sliding);
    // Sliding points move left: H < 0 on (1, B).
    CHECK(o.arcs[2].finish().x < o.arcs[2].start().x);
}

TEST_CASE("orbit crosses the sewing region") {
    const auto sys = fixtures::one_fold();
    FlowSettings fs;
    fs.t_max = 0.3;
    const HybridOrbit o = hybrid_orbit(sys, {-1.5, -0.1}, fs);
    REQUIRE(o.arcs.size() >= 2);
    CHECK(o.arcs[0].regime == Regime::X2Arc);
    CHECK(o.arcs[0].end == ArcEnd::CrossedSigma);
    CHECK(o.transitions[0].kind == Transition::SewingCrossing);
    CHECK(o.transitions[0].point.x < -1.0);
    CHECK(std::fabs(o.transitions[0].point.y) < 1e-9);
    CHECK(o.arcs[1].regime == Regime::X1Arc);
}

TEST_CASE("integrate_arc stops on a section") {
    const auto sys = fixtures::van_der_pol();
    StopSpec stop;
    stop.sigma_crossing = false;
    stop.section = Section{{0.0, 0.5}, {0.0, 3.0}, 0};
    FlowSettings fs;
    fs.t_max = 20.0;
    const Arc arc = integrate_arc(sys, Regime::X1Arc, {1.0, 1.0}, fs, stop);
    CHECK(arc.end == ArcEnd::HitSection);
    CHECK(std::fabs(arc.finish().x) < 1e-9);
}

TEST_CASE("decimate keeps the endpoints") {
    std::vector<ArcPoint> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back({i * 0.1, {static_cast<double>(i), 0.0}});
    auto d = pts;
    decimate(d, 10);
    CHECK(d.size() <= 10);
    CHECK(d.front().t == pts.front().t);
    CHECK(d.back().t == pts.back().t);
}
