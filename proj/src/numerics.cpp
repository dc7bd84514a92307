#include "numerics.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "filippov/errors.hpp"

namespace filippov::detail {

double refine_root(const std::function<double(double)>& g, double a, double b, double ga, double gb,
                   double xtol) {
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    std::uintmax_t max_iter = 200;
    const auto tol = [xtol](double lo, double hi) { return std::fabs(hi - lo) <= xtol; };
    const auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, max_iter);
    const double glo = g(lo);
    const double ghi = g(hi);
    return std::fabs(glo) <= std::fabs(ghi) ? lo : hi;
}

std::pair<double, double> minimize(const std::function<double(double)>& g, double a, double b) {
    std::uintmax_t max_iter = 200;
    const auto r = boost::math::tools::brent_find_minima(g, a, b, std::numeric_limits<double>::digits,
                                                          max_iter);
    return {r.first, r.second};
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    if (n <= 1) {
        out.push_back(a);
        return out;
    }
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / (n - 1));
    out.back() = b;
    return out;
}

std::vector<ScanRoot> scan_roots(const std::function<std::optional<double>(double)>& g, double a,
                                 double b, const ScanOptions& options) {
    const int n = std::max(options.intervals, 2);
    const std::vector<double> s = linspace(a, b, n + 1);
    std::vector<std::optional<double>> v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) v[i] = g(s[i]);

    const auto value = [&](double t) {
        const auto r = g(t);
        return r ? *r : std::numeric_limits<double>::quiet_NaN();
    };

    std::vector<ScanRoot> roots;
    const auto push = [&](ScanRoot r) {
        if (!roots.empty() && std::fabs(roots.back().s - r.s) <= 10.0 * options.xtol) return;
        roots.push_back(r);
    };

    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!v[i]) continue;
        const double vi = *v[i];
        if (vi == 0.0) {
            const bool prev_zero = i > 0 && v[i - 1] && *v[i - 1] == 0.0;
            if (!prev_zero) {
                const bool sign_change = i > 0 && i + 1 < s.size() && v[i - 1] && v[i + 1] &&
                                         (*v[i - 1]) * (*v[i + 1]) < 0.0;
                push({s[i], !sign_change});
            }
            continue;
        }
        if (i + 1 < s.size() && v[i + 1] && *v[i + 1] != 0.0 && vi * (*v[i + 1]) < 0.0) {
            push({refine_root(value, s[i], s[i + 1], vi, *v[i + 1], options.xtol), false});
        }
        // |g| local minimum without a sign change: candidate double root.
        if (i > 0 && i + 1 < s.size() && v[i - 1] && v[i + 1]) {
            const double l = *v[i - 1];
            const double r = *v[i + 1];
            if (l * vi > 0.0 && r * vi > 0.0 && std::fabs(vi) <= std::fabs(l) &&
                std::fabs(vi) <= std::fabs(r)) {
                const auto [smin, gmin] =
                    minimize([&](double t) { return std::fabs(value(t)); }, s[i - 1], s[i + 1]);
                if (gmin <= options.double_root_tol) push({smin, true});
            }
        }
    }
    std::sort(roots.begin(), roots.end(), [](const ScanRoot& l, const ScanRoot& r) { return l.s < r.s; });
    return roots;
}

FixedPoint secant_fixed_point(const std::function<double(double)>& map, double u0, double u1, double tol,
                              int max_iterations) {
    double f0 = map(u0) - u0;
    if (std::fabs(f0) <= tol) return {u0, std::fabs(f0), 0};
    double f1 = map(u1) - u1;
    for (int it = 1; it <= max_iterations; ++it) {
        if (std::fabs(f1) <= tol) return {u1, std::fabs(f1), it};
        if (f1 == f0) throw NumericError("secant iteration stalled: flat return map");
        const double u2 = u1 - f1 * (u1 - u0) / (f1 - f0);
        if (!std::isfinite(u2)) throw NumericError("secant iteration produced a non-finite iterate");
        u0 = u1;
        f0 = f1;
        u1 = u2;
        f1 = map(u1) - u1;
    }
    if (std::fabs(f1) <= tol) return {u1, std::fabs(f1), max_iterations};
    throw NumericError("fixed-point iteration did not converge in " + std::to_string(max_iterations) +
                       " steps");
}

Derivative richardson_derivative(const std::function<double(double)>& map, double u, double h) {
    const double d1 = (map(u + h) - map(u - h)) / (2.0 * h);
    const double d2 = (map(u + 2.0 * h) - map(u - 2.0 * h)) / (4.0 * h);
    return {(4.0 * d1 - d2) / 3.0, std::fabs(d1 - d2)};
}

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FILIPPOV_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    const std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace filippov::detail
