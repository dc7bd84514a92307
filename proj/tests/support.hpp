#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "filippov/system.hpp"

namespace fixtures {

using namespace filippov;

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "(%.17g)", v);
    return buf;
}

inline NonSmoothSystem make(const std::string& x1x, const std::string& x1y, const std::string& x2x,
                            const std::string& x2y, const std::string& f, std::optional<Vec2> seed = {}) {
    return NonSmoothSystem({parse(x1x), parse(x1y)}, {parse(x2x), parse(x2y)}, parse(f), seed);
}

// One visible X1 fold at (-1, 0); mu shifts the X2 tangential component.
inline NonSmoothSystem one_fold(double mu = 0.0) {
    return make("x+y-1", "-x+y-1", "-x^2+1.5*x-0.5-" + num(mu), "1", "y");
}

inline NonSmoothSystem vertical_switch() { return make("x+y-1", "-x+y+1", "1", "2", "x"); }

inline NonSmoothSystem circle() { return make("-x-y", "x-y", "x-y", "x+y", "x^2+y^2-1", Vec2{1.0, 0.0}); }

inline NonSmoothSystem two_fold() { return make("3*y^2-y-2", "1", "-3*y^2-y+2", "-1", "x"); }

inline NonSmoothSystem van_der_pol() { return make("y", "-x+(1-x^2)*y", "y", "-x+(1-x^2)*y", "y"); }

// Closed-form return of the X1 arc from the fold (-1, 0): the X1 flow is
// x + i(y - 1) = (-1 - i) exp((1 - i) t), which meets y = 0 again where
// exp(t)(sin t - cos t) = -1.
inline double loop_return_x() {
    const auto g = [](double t) { return std::exp(t) * (std::sin(t) - std::cos(t)) + 1.0; };
    double a = 3.5, b = 4.5;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        (g(a) * g(m) <= 0.0 ? b : a) = m;
    }
    const double t = 0.5 * (a + b);
    return std::exp(t) * (-std::cos(t) - std::sin(t));
}

// Random quadratic polynomial in x, y as text.
inline std::string random_quadratic(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return num(u(rng)) + "+" + num(u(rng)) + "*x+" + num(u(rng)) + "*y+" + num(u(rng)) + "*x^2+" + num(u(rng)) +
           "*x*y+" + num(u(rng)) + "*y^2";
}

}  // namespace fixtures
