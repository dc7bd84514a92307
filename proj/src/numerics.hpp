#pragma once

// Internal scalar root/minimum helpers shared by the analysis modules.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace filippov::detail {

/// Root of `g` on [a, b] given a sign change, refined until the bracket is below `xtol`.
double refine_root(const std::function<double(double)>& g, double a, double b, double ga, double gb,
                   double xtol = 1e-13);

/// Minimum of `g` on [a, b] (golden section / Brent), returns (argmin, min).
std::pair<double, double> minimize(const std::function<double(double)>& g, double a, double b);

struct ScanRoot {
    double s = 0.0;
    bool double_root = false;  // found by the |g| minimum detector, no sign change
};

struct ScanOptions {
    int intervals = 1000;
    double double_root_tol = 1e-10;
    double xtol = 1e-12;
};

/// Roots of a scalar function on [a, b]: sign changes between consecutive samples
/// (refined by bracketing) plus local minima of |g| below `double_root_tol` where no
/// sign change occurs. Samples where `g` returns nullopt split the scan.
std::vector<ScanRoot> scan_roots(const std::function<std::optional<double>(double)>& g, double a,
                                 double b, const ScanOptions& options = {});

struct FixedPoint {
    double u = 0.0;
    double residual = 0.0;  // |P(u) - u|
    int iterations = 0;
};

/// Fixed point of a scalar map by secant iteration on P(u) - u from u0, u1.
/// Throws NumericError after `max_iterations` without reaching `tol`.
FixedPoint secant_fixed_point(const std::function<double(double)>& map, double u0, double u1,
                              double tol = 1e-12, int max_iterations = 50);

struct Derivative {
    double value = 0.0;
    double error = 0.0;  // |D(h) - D(2h)|
};

/// Central differences with offsets h and 2h combined by Richardson extrapolation.
Derivative richardson_derivative(const std::function<double(double)>& map, double u, double h);

/// Worker count for independent scan rows: hardware concurrency capped by the
/// FILIPPOV_THREADS environment variable.
unsigned worker_count();

/// Run body(i) for i in [0, n) on up to worker_count() threads. The first exception
/// thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// `n` evenly spaced values from a to b inclusive (b reached exactly).
std::vector<double> linspace(double a, double b, int n);

}  // namespace filippov::detail
