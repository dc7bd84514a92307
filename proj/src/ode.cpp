#include "ode.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <optional>

#include "filippov/errors.hpp"

namespace filippov::ode {

namespace odeint = boost::numeric::odeint;

namespace {

using Stepper = odeint::runge_kutta_dopri5<State>;

struct RhsAdapter {
    const Rhs* rhs;
    void operator()(const State& q, State& dq, double /*t*/) const { (*rhs)(q, dq); }
};

bool finite(const State& q) { return std::isfinite(q[0]) && std::isfinite(q[1]); }

double magnitude(const State& q) { return std::hypot(q[0], q[1]); }

bool crosses(double before, double after, int direction) {
    if (before == 0.0) return false;
    const bool rising = before < 0.0 && after >= 0.0;
    const bool falling = before > 0.0 && after <= 0.0;
    if (direction > 0) return rising;
    if (direction < 0) return falling;
    return rising || falling;
}

struct Located {
    double theta;
    State q;
};

// Bracket the event root in the step fraction theta in (0, 1] using fresh
// Dormand-Prince steps of size theta * dt from the start of the step.
std::optional<Located> locate(const RhsAdapter& sys, const State& q_start, double t, double dt,
                              const Event& ev, double g_start, double g_end, const State& q_end) {
    // Dormand-Prince is FSAL: pass the start derivative explicitly so every trial
    // step restarts from q_start instead of reusing the last trial's end slope.
    Stepper stepper;
    State dq_start;
    sys(q_start, dq_start, t);
    const auto state_at = [&](double theta) {
        State out, dq_out;
        stepper.do_step(sys, q_start, dq_start, t, out, dq_out, theta * dt);
        return out;
    };
    double lo = 0.0, hi = 1.0;
    double glo = g_start, ghi = g_end;
    State qhi = q_end;
    const double scale = 1.0 + std::max(magnitude(q_start), magnitude(q_end));
    const double target = ev.tol * scale;
    int side = 0;  // Illinois bookkeeping
    for (int it = 0; it < 200; ++it) {
        if (std::fabs(ghi) <= target && hi - lo < 1.0) break;
        double theta = hi - ghi * (hi - lo) / (ghi - glo);
        if (!(theta > lo && theta < hi)) theta = 0.5 * (lo + hi);
        const State q = state_at(theta);
        const double g = ev.g(q);
        if (std::fabs(g) <= target) {
            if (ev.accept && !ev.accept(q)) return std::nullopt;
            return Located{theta, q};
        }
        if ((g < 0.0) == (glo < 0.0)) {
            lo = theta;
            glo = g;
            if (side == -1) ghi *= 0.5;
            side = -1;
        } else {
            hi = theta;
            ghi = g;
            qhi = q;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
        if ((hi - lo) * std::fabs(dt) < 1e-16 * (1.0 + std::fabs(t))) break;
    }
    if (ev.accept && !ev.accept(qhi)) return std::nullopt;
    return Located{hi, qhi};
}

}  // namespace

Result integrate(const Rhs& rhs, State q0, double t0, const Settings& settings,
                 std::span<const Event> events) {
    const RhsAdapter sys{&rhs};
    auto controlled = odeint::make_controlled(settings.atol, settings.rtol, Stepper());

    Result result;
    result.samples.push_back({t0, q0});

    State q = q0;
    double t = t0;
    const double t_end = t0 + settings.t_max;
    double dt = settings.h_init;
    std::vector<double> g_prev(events.size(), 0.0);
    for (std::size_t i = 0; i < events.size(); ++i) g_prev[i] = events[i].g(q);

    for (std::size_t step = 0; step < settings.max_steps; ++step) {
        if (t >= t_end) {
            result.stop = Stop::TimeBudget;
            return result;
        }
        double cap = t_end - t;
        if (settings.max_step) cap = std::min(cap, settings.max_step(q));
        dt = std::min(dt, cap);

        const State q_start = q;
        const double t_start = t;
        odeint::controlled_step_result res = odeint::fail;
        for (int tries = 0; tries < 500; ++tries) {
            res = controlled.try_step(sys, q, t, dt);
            if (res == odeint::success) break;
            if (dt < settings.h_min * (1.0 + std::fabs(t))) {
                throw NumericError("step size underflow at t = " + std::to_string(t));
            }
        }
        if (res != odeint::success) throw NumericError("integrator failed to accept a step");
        if (!finite(q)) throw NumericError("non-finite state at t = " + std::to_string(t));
        const double h_taken = t - t_start;

        // Earliest event inside the accepted step.
        std::optional<Located> first;
        int first_index = -1;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const double g_new = events[i].g(q);
            const bool armed = step > 0 || std::fabs(g_prev[i]) > events[i].tol * (1.0 + magnitude(q_start));
            if (armed) {
                if (crosses(g_prev[i], g_new, events[i].direction)) {
                    auto loc = locate(sys, q_start, t_start, h_taken, events[i], g_prev[i], g_new, q);
                    if (loc && (!first || loc->theta < first->theta)) {
                        first = loc;
                        first_index = static_cast<int>(i);
                    }
                }
            }
            g_prev[i] = g_new;
        }
        if (first) {
            result.samples.push_back({t_start + first->theta * h_taken, first->q});
            result.stop = Stop::Event;
            result.event = first_index;
            return result;
        }

        result.samples.push_back({t, q});
        if (magnitude(q) > settings.domain_radius) {
            result.stop = Stop::LeftDomain;
            return result;
        }
    }
    throw NumericError("maximum number of integration steps exceeded");
}

}  // namespace filippov::ode
