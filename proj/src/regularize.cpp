#include "filippov/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "filippov/errors.hpp"
#include "numerics.hpp"
#include "ode.hpp"

namespace filippov {

TransitionFunction TransitionFunction::quintic() { return {}; }

TransitionFunction TransitionFunction::cubic() {
    TransitionFunction t;
    t.family_ = Family::Cubic;
    return t;
}

TransitionFunction TransitionFunction::table(std::vector<std::pair<double, double>> nodes) {
    if (nodes.size() < 2) throw PreconditionError("transition table needs at least two nodes");
    if (nodes.front() != std::pair{-1.0, -1.0} || nodes.back() != std::pair{1.0, 1.0}) {
        throw PreconditionError("transition table must cover [-1, 1] from (-1, -1) to (1, 1)");
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i].first > nodes[i - 1].first) || !(nodes[i].second > nodes[i - 1].second)) {
            throw PreconditionError("transition table must be strictly increasing");
        }
    }
    TransitionFunction t;
    t.family_ = Family::Table;
    t.nodes_ = std::move(nodes);
    return t;
}

double TransitionFunction::operator()(double x) const {
    if (x <= -1.0) return -1.0;
    if (x >= 1.0) return 1.0;
    switch (family_) {
        case Family::Quintic: {
            const double x2 = x * x;
            return x * (15.0 - 10.0 * x2 + 3.0 * x2 * x2) / 8.0;
        }
        case Family::Cubic: return x * (3.0 - x * x) / 2.0;
        case Family::Table: {
            const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                                             [](double v, const auto& node) { return v < node.first; });
            const auto& [x1, y1] = *it;
            const auto& [x0, y0] = *(it - 1);
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    return 0.0;
}

std::string TransitionFunction::name() const {
    switch (family_) {
        case Family::Quintic: return "quintic";
        case Family::Cubic: return "cubic";
        case Family::Table: return "table";
    }
    return "?";
}

RegularizedField::RegularizedField(NonSmoothSystem sys, double epsilon, TransitionFunction phi)
    : sys_(std::move(sys)), epsilon_(epsilon), phi_(std::move(phi)) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw PreconditionError("epsilon must be positive");
}

double RegularizedField::weight(Vec2 q) const { return 0.5 + 0.5 * phi_(sys_.f(q) / epsilon_); }

Vec2 RegularizedField::operator()(Vec2 q) const {
    const double w = weight(q);
    if (w == 1.0) return sys_.eval(Field::X1, q);
    if (w == 0.0) return sys_.eval(Field::X2, q);
    return w * sys_.eval(Field::X1, q) + (1.0 - w) * sys_.eval(Field::X2, q);
}

namespace {

// Uniform grid over the segments of a polyline for nearest-segment queries.
class SegmentGrid {
public:
    explicit SegmentGrid(std::span<const Vec2> pts) : pts_(pts) {
        lo_ = hi_ = pts.front();
        for (const Vec2& p : pts) {
            lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
            hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
        }
        const std::size_t nseg = std::max<std::size_t>(1, pts.size() - 1);
        const double extent = std::max({hi_.x - lo_.x, hi_.y - lo_.y, 1e-12});
        const double side = std::max(1.0, std::sqrt(static_cast<double>(nseg)));
        cell_ = extent / side;
        nx_ = static_cast<int>((hi_.x - lo_.x) / cell_) + 1;
        ny_ = static_cast<int>((hi_.y - lo_.y) / cell_) + 1;
        cells_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
        for (std::size_t k = 0; k < nseg; ++k) {
            const Vec2 a = pts[k];
            const Vec2 b = pts.size() > 1 ? pts[k + 1] : pts[k];
            const int i0 = cx(std::min(a.x, b.x)), i1 = cx(std::max(a.x, b.x));
            const int j0 = cy(std::min(a.y, b.y)), j1 = cy(std::max(a.y, b.y));
            for (int i = i0; i <= i1; ++i) {
                for (int j = j0; j <= j1; ++j) cells_[index(i, j)].push_back(k);
            }
        }
    }

    [[nodiscard]] double distance_to(Vec2 p) const {
        const int ci = cx(p.x), cj = cy(p.y);
        double best = std::numeric_limits<double>::infinity();
        const int max_ring = std::max(nx_, ny_);
        for (int r = 0; r <= max_ring; ++r) {
            for (int i = ci - r; i <= ci + r; ++i) {
                for (int j = cj - r; j <= cj + r; ++j) {
                    if (std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
                    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
                    for (std::size_t k : cells_[index(i, j)]) best = std::min(best, segment(p, k));
                }
            }
            if (best <= r * cell_) break;
        }
        return best;
    }

private:
    std::span<const Vec2> pts_;
    Vec2 lo_{}, hi_{};
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> cells_;

    [[nodiscard]] int cx(double x) const { return std::clamp(static_cast<int>((x - lo_.x) / cell_), 0, nx_ - 1); }
    [[nodiscard]] int cy(double y) const { return std::clamp(static_cast<int>((y - lo_.y) / cell_), 0, ny_ - 1); }
    [[nodiscard]] std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(j);
    }
    [[nodiscard]] double segment(Vec2 p, std::size_t k) const {
        if (pts_.size() == 1) return distance(p, pts_[0]);
        return point_segment_distance(p, pts_[k], pts_[k + 1]);
    }
};

double directed(std::span<const Vec2> from, const SegmentGrid& to) {
    double worst = 0.0;
    for (const Vec2& p : from) worst = std::max(worst, to.distance_to(p));
    return worst;
}

}  // namespace

double hausdorff(std::span<const Vec2> p, std::span<const Vec2> q) {
    if (p.empty() || q.empty()) throw PreconditionError("hausdorff needs non-empty polylines");
    const SegmentGrid gp(p), gq(q);
    return std::max(directed(p, gq), directed(q, gp));
}

Section automatic_section(const NonSmoothSystem& sys, std::span<const Vec2> cycle) {
    if (cycle.empty()) throw PreconditionError("empty cycle");
    std::size_t best = 0;
    for (std::size_t i = 1; i < cycle.size(); ++i) {
        if (std::fabs(sys.f(cycle[i])) > std::fabs(sys.f(cycle[best]))) best = i;
    }
    const Vec2 p = cycle[best];
    const Vec2 g = sys.grad_f(p);
    if (norm(g) == 0.0) throw PreconditionError("grad f vanishes at the section point");
    double xmin = p.x, xmax = p.x, ymin = p.y, ymax = p.y;
    for (const Vec2& q : cycle) {
        xmin = std::min(xmin, q.x);
        xmax = std::max(xmax, q.x);
        ymin = std::min(ymin, q.y);
        ymax = std::max(ymax, q.y);
    }
    const double reach = 0.5 * std::fabs(sys.f(p)) / norm(g);
    const double half = std::max(1e-6, std::min(reach, 0.05 * std::hypot(xmax - xmin, ymax - ymin)));
    const Vec2 dir = g / norm(g);
    return {p - half * dir, p + half * dir, 0};
}

CycleEstimate find_limit_cycle(const RegularizedField& field, const Section& section_in, double guess,
                               const CycleOptions& options) {
    const NonSmoothSystem& sys = field.system();
    const double eps = field.epsilon();
    Section section = section_in;
    const double length = distance(section.a, section.b);
    if (length == 0.0) throw PreconditionError("degenerate section");
    const Vec2 n_hat = section.normal() / norm(section.normal());

    // Transversality along the whole section.
    int sign = 0;
    for (double u : detail::linspace(0.0, 1.0, 21)) {
        const Vec2 v = field(section.at(u));
        const double c = dot(v, n_hat);
        if (std::fabs(c) <= 1e-8 * (1.0 + norm(v))) throw PreconditionError("section is tangent to the field");
        const int s = c > 0.0 ? 1 : -1;
        if (sign != 0 && s != sign) throw PreconditionError("section is tangent to the field");
        sign = s;
    }
    if (section.direction == 0) section.direction = sign;

    const ode::Rhs rhs = [&field](const ode::State& s, ode::State& ds) {
        const Vec2 v = field({s[0], s[1]});
        ds[0] = v.x;
        ds[1] = v.y;
    };
    ode::Settings os;
    os.rtol = options.rtol;
    os.atol = options.atol;
    os.t_max = options.t_max;
    os.max_step = [&](const ode::State& s) {
        const Vec2 q{s[0], s[1]};
        const Vec2 v = field(q);
        const double speed = std::max(norm(v), 1e-300);
        double cap = options.max_step_length / speed;
        const double fq = std::fabs(sys.f(q));
        if (fq <= 2.0 * eps) {
            cap = std::min(cap, eps / 10.0);
        } else {
            // Do not step across the strip in one go.
            const double rate = std::fabs(dot(sys.grad_f(q), v));
            if (rate > 0.0) cap = std::min(cap, std::max(eps / 10.0, 0.5 * (fq - eps) / rate));
        }
        return cap;
    };
    ode::Event ev;
    ev.g = [section](const ode::State& s) { return section.signed_distance({s[0], s[1]}); };
    ev.direction = section.direction;
    ev.accept = [section](const ode::State& s) {
        const double u = section.coordinate({s[0], s[1]});
        return u >= 0.0 && u <= 1.0;
    };
    const std::vector<ode::Event> events{ev};

    const auto run = [&](double u) {
        const Vec2 q0 = section.at(u);
        ode::Result r = ode::integrate(rhs, {q0.x, q0.y}, 0.0, os, events);
        if (r.stop != ode::Stop::Event) throw NumericError("orbit does not return to the section");
        return r;
    };
    const auto ret = [&](double u) {
        const auto r = run(u);
        const auto& q = r.samples.back().q;
        return section.coordinate({q[0], q[1]});
    };

    const double u1 = guess + (guess < 0.5 ? 1e-3 : -1e-3);
    const detail::FixedPoint fp = detail::secant_fixed_point(ret, guess, u1, 1e-12, options.max_iterations);
    if (fp.u < 0.0 || fp.u > 1.0) throw NumericError("fixed point left the section");

    CycleEstimate est;
    est.section = section;
    est.u = fp.u;
    est.iterations = fp.iterations;
    const auto r = run(fp.u);
    for (const auto& s : r.samples) est.polyline.push_back({s.t, {s.q[0], s.q[1]}});
    est.period = r.samples.back().t;
    est.closure_gap = distance(est.polyline.front().q, est.polyline.back().q);

    const double h = std::min(1e-4 / length, 0.25 * std::min(fp.u, 1.0 - fp.u));
    if (!(h > 0.0)) throw NumericError("fixed point at the end of the section");
    const detail::Derivative d = detail::richardson_derivative(ret, fp.u, h);
    est.multiplier = d.value;
    est.multiplier_error = d.error;
    est.hyperbolic = std::fabs(d.value - 1.0) > 3.0 * d.error;
    return est;
}

ConvergenceStudy convergence_study(const NonSmoothSystem& sys, std::span<const Vec2> gamma0,
                                   std::span<const double> epsilons, const TransitionFunction& phi,
                                   const CycleOptions& options) {
    ConvergenceStudy study;
    const Section section = automatic_section(sys, gamma0);
    double guess = 0.5;
    for (double eps : epsilons) {
        StudyRow row;
        row.epsilon = eps;
        try {
            const RegularizedField field(sys, eps, phi);
            const CycleEstimate est = find_limit_cycle(field, section, guess, options);
            row.found = true;
            row.multiplier = est.multiplier;
            row.multiplier_error = est.multiplier_error;
            row.period = est.period;
            for (const auto& p : est.polyline) row.cycle.push_back(p.q);
            row.hausdorff = hausdorff(row.cycle, gamma0);
            guess = est.u;
        } catch (const Error& e) {
            row.error = e.what();
        }
        study.rows.push_back(std::move(row));
    }
    study.strictly_decreasing = !study.rows.empty();
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        if (!study.rows[i].found) study.strictly_decreasing = false;
        if (i > 0 && !(study.rows[i].hausdorff < study.rows[i - 1].hausdorff)) study.strictly_decreasing = false;
    }
    return study;
}

}  // namespace filippov
