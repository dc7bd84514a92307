#pragma once

// Adaptive Dormand-Prince integration of autonomous planar ODEs with event
// location. Steps come from Boost.Odeint; events are located by re-stepping
// from the last accepted state with a shortened step and bracketing the root.

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace filippov::ode {

using State = std::array<double, 2>;
using Rhs = std::function<void(const State& q, State& dq)>;

struct Settings {
    double rtol = 1e-10;
    double atol = 1e-12;
    double t_max = 1e3;
    double h_init = 1e-3;
    double h_min = 1e-14;
    std::size_t max_steps = 20'000'000;
    double domain_radius = 1e6;
    /// Optional state-dependent cap on the step size.
    std::function<double(const State&)> max_step;
};

struct Event {
    std::function<double(const State&)> g;
    int direction = 0;  // +1: g rises through 0, -1: falls through 0, 0: either
    double tol = 1e-10;
    /// Optional filter applied at the located root; rejected roots are ignored.
    std::function<bool(const State&)> accept;
};

enum class Stop { Event, TimeBudget, LeftDomain };

struct Sample {
    double t = 0.0;
    State q{};
};

struct Result {
    std::vector<Sample> samples;
    Stop stop = Stop::TimeBudget;
    int event = -1;  // index into the event list when stop == Event
};

/// Integrate from (t0, q0) until an event, the time budget, or leaving the domain.
/// An event only fires on a sign change between two accepted states, so a start
/// exactly on the event surface does not trigger it. Throws NumericError on step
/// size underflow or a non-finite state.
Result integrate(const Rhs& rhs, State q0, double t0, const Settings& settings,
                 std::span<const Event> events = {});

}  // namespace filippov::ode
