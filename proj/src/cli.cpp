#include "filippov/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "filippov/errors.hpp"
#include "filippov/io.hpp"
#include "numerics.hpp"

namespace filippov::cli {

namespace {

struct Grid {
    double a = 0.0;
    double b = 0.0;
    int n = 0;
};

std::vector<double> split_numbers(const std::string& text, char sep, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw CLI::ValidationError(flag, "not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

Grid parse_grid(const std::string& text, const std::string& flag, int default_n) {
    const auto v = split_numbers(text, ':', flag);
    if (v.size() != 2 && v.size() != 3) throw CLI::ValidationError(flag, "expected a:b or a:b:n");
    Grid g{v[0], v[1], v.size() == 3 ? static_cast<int>(v[2]) : default_n};
    if (!(g.a < g.b) || g.n < 2 || (v.size() == 3 && v[2] != std::floor(v[2]))) {
        throw CLI::ValidationError(flag, "need a < b and an integer n >= 2");
    }
    return g;
}

Vec2 parse_point(const std::string& text, const std::string& flag) {
    const auto v = split_numbers(text, ',', flag);
    if (v.size() != 2) throw CLI::ValidationError(flag, "expected x,y");
    return {v[0], v[1]};
}

TransitionFunction parse_phi(const std::string& name) {
    return name == "cubic" ? TransitionFunction::cubic() : TransitionFunction::quintic();
}

std::vector<Vec2> read_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read path file '" + path + "'");
    std::vector<Vec2> pts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        for (char& c : line) {
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        }
        std::istringstream ls(line);
        double x = 0.0, y = 0.0;
        if (!(ls >> x)) {
            if (pts.empty()) continue;  // header or blank line
            if (line.find_first_not_of(" \r") == std::string::npos) continue;
            throw ConfigError("malformed path row", line_no, 1);
        }
        if (!(ls >> y)) throw ConfigError("path rows need two coordinates", line_no, 1);
        pts.push_back({x, y});
    }
    return pts;
}

struct Common {
    std::string system_path;
    std::string format;
    std::string output;
    std::optional<double> mu;
    std::string expect;
};

class Emitter {
public:
    Emitter(std::ostream& out, const Common& c) : out_(out), common_(c) {}

    void json(const Json& j) {
        sink() << dump_json(j) << '\n';
        flush();
    }
    void csv(const Table& t) {
        write_csv(sink(), t);
        flush();
    }
    void either(const Json& j, const Table& t) { common_.format == "csv" ? csv(t) : json(j); }

private:
    std::ostream& sink() {
        if (common_.output.empty() || common_.output == "-") return out_;
        file_.open(common_.output, std::ios::binary);
        if (!file_) throw ConfigError("cannot open output file '" + common_.output + "'");
        return file_;
    }
    void flush() {
        if (file_.is_open()) {
            file_.close();
            if (!file_) throw Error("failed to write '" + common_.output + "'");
        }
    }

    std::ostream& out_;
    const Common& common_;
    std::ofstream file_;
};

NonSmoothSystem system_of(const SystemFile& file, const Common& c) {
    return c.mu ? file.instantiate(*c.mu) : file.system();
}

std::vector<double> sigma_grid(const NonSmoothSystem& sys, Grid g) {
    const SigmaChart& chart = sys.chart();
    if (chart.kind() == SigmaChart::Kind::Curve) {
        g.a = std::max(g.a, chart.s_min());
        g.b = std::min(g.b, chart.s_max());
        if (!(g.a < g.b)) throw PreconditionError("window does not meet the Sigma chart");
    }
    return detail::linspace(g.a, g.b, g.n);
}

double h_or_nan(const NonSmoothSystem& sys, double s, const Tolerances& tol) {
    try {
        return direction_function(sys, s, tol);
    } catch (const DomainError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Analysis of planar Filippov systems", "filippov"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all");

    Common common;
    std::string window_text, from_text, epsilons_text, mu_text, circle_text, path_text, phi_name = "quintic";
    std::string section_text, theta_text;
    double epsilon = 0.0, t_max = 0.0;
    int samples = 401;
    bool census = false, canard_cycle = false;

    const auto add_common = [&](CLI::App* sub, const std::string& default_format, const std::string& expect_help,
                                std::vector<std::string> expect_values) {
        sub->add_option("--system", common.system_path, "system file")->required()->check(CLI::ExistingFile);
        sub->add_option("--format", common.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->default_str(default_format);
        sub->add_option("--output", common.output, "output file (default: stdout)");
        sub->add_option("--mu", common.mu, "family parameter value");
        if (!expect_help.empty()) {
            auto* opt = sub->add_option("--expect", common.expect, expect_help);
            if (!expect_values.empty()) opt->check(CLI::IsMember(expect_values));
        }
        sub->callback([&common, default_format] {
            if (common.format.empty()) common.format = default_format;
        });
    };

    auto* classify = app.add_subcommand("classify", "region of every Sigma sample");
    add_common(classify, "csv", "", {});
    classify->add_option("--window", window_text, "a:b[:n] on the Sigma chart");

    auto* slide = app.add_subcommand("slide", "sliding field samples and pseudo-equilibria");
    add_common(slide, "csv", "", {});
    slide->add_option("--window", window_text, "a:b[:n] on the Sigma chart");

    auto* orbit = app.add_subcommand("orbit", "Filippov orbit from a point");
    add_common(orbit, "json", "", {});
    orbit->add_option("--from", from_text, "start point x,y")->required();
    orbit->add_option("--t-max", t_max, "time budget");

    auto* canard = app.add_subcommand("canard", "canard detector for one visible fold");
    add_common(canard, "json", "found | absent", {"found", "absent"});
    canard->add_option("--window", window_text, "fold census window a:b");

    auto* scan = app.add_subcommand("scan", "Sigma-loop bifurcation scan over mu");
    add_common(scan, "csv", "bifurcation", {"bifurcation"});
    scan->add_option("--mu-range", mu_text, "a:b:n (default: mu_range of the file)");

    auto* regularize = app.add_subcommand("regularize", "limit cycle of the regularization");
    add_common(regularize, "json", "hyperbolic", {"hyperbolic"});
    regularize->add_option("--epsilon", epsilon, "strip half-width")->required()->check(CLI::PositiveNumber);
    regularize->add_option("--phi", phi_name, "transition function")->check(CLI::IsMember({"quintic", "cubic"}));
    regularize->add_option("--section", section_text, "x1,y1,x2,y2 (default: automatic)");

    auto* converge = app.add_subcommand("converge", "Hausdorff convergence of regularized cycles");
    add_common(converge, "csv", "decreasing", {"decreasing"});
    converge->add_option("--epsilons", epsilons_text, "comma-separated list (default: epsilon_list of the file)");
    converge->add_option("--phi", phi_name, "transition function")->check(CLI::IsMember({"quintic", "cubic"}));

    auto* index = app.add_subcommand("index", "winding of a closed path");
    add_common(index, "json", "expected integer index", {});
    auto* path_opt = index->add_option("--path", path_text, "closed path file (x,y rows)")->check(CLI::ExistingFile);
    auto* circle_opt = index->add_option("--circle", circle_text, "cx,cy,r");
    auto* canard_opt = index->add_flag("--canard-cycle", canard_cycle, "use the detected canard cycle (index theorem)");
    path_opt->excludes(circle_opt)->excludes(canard_opt);
    circle_opt->excludes(canard_opt);
    index->add_flag("--census", census, "also list interior critical points");

    auto* blowup = app.add_subcommand("blowup", "singular perturbation problem and slow manifold");
    add_common(blowup, "csv", "", {});
    blowup->add_option("--theta", theta_text, "comma-separated angles (default: trace the branches)");
    blowup->add_option("--window", window_text, "y window a:b");
    blowup->add_option("--samples", samples, "theta samples of the trace")->check(CLI::Range(2, 100000));
    blowup->add_option("--phi", phi_name, "transition function")->check(CLI::IsMember({"quintic", "cubic"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return kUsage;
    }
    if (index->parsed() && path_text.empty() && circle_text.empty() && !canard_cycle) {
        err << "index: one of --path, --circle or --canard-cycle is required\n";
        return kUsage;
    }

    try {
        const SystemFile file = load_system(common.system_path);
        const AnalysisSettings& settings = file.analysis;
        Emitter emit(out, common);

        // Flag values are validated before any computation.
        std::optional<Grid> window;
        std::optional<Grid> mu_grid;
        std::optional<Vec2> from;
        std::vector<double> epsilons = settings.epsilon_list;
        std::optional<std::array<double, 3>> circle;
        std::optional<Section> section;
        std::vector<double> thetas;
        std::optional<int> expected_index;
        if (!window_text.empty()) window = parse_grid(window_text, "--window", 601);
        if (!mu_text.empty()) mu_grid = parse_grid(mu_text, "--mu-range", 41);
        if (!from_text.empty()) from = parse_point(from_text, "--from");
        if (!epsilons_text.empty()) {
            epsilons = split_numbers(epsilons_text, ',', "--epsilons");
            for (double e : epsilons) {
                if (!(e > 0.0)) throw CLI::ValidationError("--epsilons", "entries must be positive");
            }
        }
        if (!circle_text.empty()) {
            const auto v = split_numbers(circle_text, ',', "--circle");
            if (v.size() != 3 || !(v[2] > 0.0)) throw CLI::ValidationError("--circle", "expected cx,cy,r with r > 0");
            circle = std::array<double, 3>{v[0], v[1], v[2]};
        }
        if (!section_text.empty()) {
            const auto v = split_numbers(section_text, ',', "--section");
            if (v.size() != 4) throw CLI::ValidationError("--section", "expected x1,y1,x2,y2");
            section = Section{{v[0], v[1]}, {v[2], v[3]}, 0};
        }
        if (!theta_text.empty()) {
            thetas = split_numbers(theta_text, ',', "--theta");
            for (double t : thetas) {
                if (!(t > 0.0 && t < std::numbers::pi)) throw CLI::ValidationError("--theta", "angles must lie in (0, pi)");
            }
        }
        if (index->parsed() && !common.expect.empty()) {
            const auto v = split_numbers(common.expect, ',', "--expect");
            if (v.size() != 1 || v[0] != std::floor(v[0])) throw CLI::ValidationError("--expect", "expected an integer");
            expected_index = static_cast<int>(v[0]);
        }
        const Grid sigma{window ? window->a : settings.sigma_a, window ? window->b : settings.sigma_b,
                         window ? window->n : 601};

        if (classify->parsed()) {
            const NonSmoothSystem sys = system_of(file, common);
            Table t{{"s", "x", "y", "region", "label", "H"}, {}};
            Json rows = Json::array();
            for (double s : sigma_grid(sys, sigma)) {
                const Vec2 q = sys.chart().point(s);
                const SigmaClass c = classify_point(sys, q, settings.tol);
                const bool slides = c.region == Region::Sliding || c.region == Region::Escaping ||
                                    c.region == Region::PseudoEquilibrium;
                const double h = slides ? h_or_nan(sys, s, settings.tol) : std::numeric_limits<double>::quiet_NaN();
                t.rows.push_back({s, q.x, q.y, std::string(to_string(c.region)), c.label(), h});
                Json row = to_json(c);
                row["s"] = s;
                row["point"] = to_json(q);
                row["H"] = h;
                rows.push_back(std::move(row));
            }
            Json folds = Json::array();
            for (const FoldPoint& fp : fold_census(sys, sigma.a, sigma.b)) folds.push_back(to_json(fp));
            emit.either({{"samples", std::move(rows)}, {"folds", std::move(folds)}}, t);
            return kOk;
        }

        if (slide->parsed()) {
            const NonSmoothSystem sys = system_of(file, common);
            Table t{{"s", "x", "y", "region", "vx", "vy", "H"}, {}};
            Json rows = Json::array();
            for (double s : sigma_grid(sys, sigma)) {
                const Vec2 q = sys.chart().point(s);
                const SigmaClass c = classify_point(sys, q, settings.tol);
                if (c.region != Region::Sliding && c.region != Region::Escaping &&
                    c.region != Region::PseudoEquilibrium) {
                    continue;
                }
                Vec2 v;
                try {
                    v = sliding_field(sys, q, settings.tol);
                } catch (const DomainError&) {
                    continue;
                }
                const double h = h_or_nan(sys, s, settings.tol);
                t.rows.push_back({s, q.x, q.y, std::string(to_string(c.region)), v.x, v.y, h});
                rows.push_back({{"s", s}, {"point", to_json(q)}, {"region", to_string(c.region)},
                                {"field", to_json(v)}, {"H", h}});
            }
            Json pes = Json::array();
            for (const PseudoEquilibrium& pe : pseudo_equilibria(sys, sigma.a, sigma.b, 1000, settings.tol)) {
                pes.push_back(to_json(pe));
            }
            emit.either({{"samples", std::move(rows)}, {"pseudo_equilibria", std::move(pes)}}, t);
            return kOk;
        }

        if (orbit->parsed()) {
            const NonSmoothSystem sys = system_of(file, common);
            FlowSettings fs;
            fs.t_max = t_max > 0.0 ? t_max : settings.t_max;
            fs.tol = settings.tol;
            const HybridOrbit o = hybrid_orbit(sys, *from, fs);
            Table t{{"t", "x", "y", "regime"}, {}};
            for (const Arc& a : o.arcs) {
                for (const ArcPoint& p : a.points) t.rows.push_back({p.t, p.q.x, p.q.y, std::string(to_string(a.regime))});
            }
            if (!o.diagnostic.empty()) err << "orbit: " << o.diagnostic << '\n';
            emit.either(to_json(o), t);
            return kOk;
        }

        if (canard->parsed()) {
            const NonSmoothSystem sys = system_of(file, common);
            CanardOptions opt;
            opt.window_a = sigma.a;
            opt.window_b = sigma.b;
            opt.flow.t_max = settings.t_max;
            opt.flow.tol = settings.tol;
            const CanardReport r = detect_canard_one_fold(sys, opt);
            Table t{{"x", "y", "regime"}, {}};
            for (const CycleSegment& s : r.cycle.segments) {
                for (const Vec2& q : s.points) t.rows.push_back({q.x, q.y, std::string(to_string(s.regime))});
            }
            emit.either(to_json(r), t);
            if (common.expect == "found" && !r.found) return kExpectationFailed;
            if (common.expect == "absent" && r.found) return kExpectationFailed;
            return kOk;
        }

        if (scan->parsed()) {
            if (!file.is_family()) throw ConfigError(file.source + ": scan needs a family (expressions with mu)");
            if (!mu_grid && !settings.mu_range) throw ConfigError("scan: give --mu-range or mu_range in [analysis]");
            const Grid g = mu_grid ? *mu_grid : Grid{settings.mu_range->a, settings.mu_range->b, settings.mu_range->n};
            CanardOptions opt;
            opt.window_a = sigma.a;
            opt.window_b = sigma.b;
            opt.flow.tol = settings.tol;
            const ScanResult r = sigma_loop_scan([&](double mu) { return file.instantiate(mu); }, g.a, g.b, g.n, opt);
            emit.either(to_json(r), scan_table(r));
            if (r.bifurcation_mu) {
                err << "scan: Sigma-loop bifurcation at mu = " << *r.bifurcation_mu << '\n';
            } else {
                err << "scan: no bifurcation located\n";
            }
            if (common.expect == "bifurcation" && !r.bifurcation_mu) return kExpectationFailed;
            return kOk;
        }

        const auto gamma0 = [&](const NonSmoothSystem& sys) {
            CanardOptions opt;
            opt.window_a = sigma.a;
            opt.window_b = sigma.b;
            opt.flow.tol = settings.tol;
            const CanardReport r = detect_canard_one_fold(sys, opt);
            if (!r.found) throw PreconditionError("no canard cycle to regularize: " + r.certificate);
            return r.cycle.polyline();
        };

        if (regularize->parsed()) {
            const NonSmoothSystem sys = system_of(file, common);
            const std::vector<Vec2> g0 = gamma0(sys);
            const Section sec = section ? *section : automatic_section(sys, g0);
            const RegularizedField field(sys, epsilon, parse_phi(phi_name));
            const CycleEstimate c = find_limit_cycle(field, sec, 0.5);
            std::vector<Vec2> pts;
            for (const ArcPoint& p : c.polyline) pts.push_back(p.q);
            Json j = to_json(c);
            j["epsilon"] = epsilon;
            j["hausdorff"] = hausdorff(pts, g0);
            j["transition"] = field.transition().name();
            emit.either(j, polyline_table(pts));
            if (common.expect == "hyperbolic" && !c.hyperbolic) return kExpectationFailed;
            return kOk;
        }

        if (converge->parsed()) {
            const NonSmoothSystem sys = system_of(file, common);
            const std::vector<Vec2> g0 = gamma0(sys);
            const ConvergenceStudy st = convergence_study(sys, g0, epsilons, parse_phi(phi_name));
            for (const StudyRow& r : st.rows) {
                if (!r.found) err << "converge: epsilon " << r.epsilon << ": " << r.error << '\n';
            }
            emit.either(to_json(st), convergence_table(st));
            if (common.expect == "decreasing" && !st.strictly_decreasing) return kExpectationFailed;
            return kOk;
        }

        if (index->parsed()) {
            const NonSmoothSystem sys = system_of(file, common);
            WindingOptions wopt;
            wopt.tol = settings.tol;
            CensusOptions copt;
            copt.winding = wopt;
            int found_index = 0;
            if (canard_cycle) {
                const TheoremCReport r = verify_theorem_c(sys, gamma0(sys), copt);
                found_index = r.winding;
                Json j = to_json(r);
                j["index"] = r.winding;
                emit.json(j);
            } else {
                const std::vector<Vec2> path =
                    circle ? circle_path({(*circle)[0], (*circle)[1]}, (*circle)[2]) : read_path(path_text);
                IndexReport r = angle_winding(sys, path, wopt);
                if (census) r.interior = interior_census(sys, path, copt);
                found_index = r.index;
                emit.json(to_json(r));
            }
            if (expected_index && *expected_index != found_index) return kExpectationFailed;
            return kOk;
        }

        if (blowup->parsed()) {
            const NonSmoothSystem sys = system_of(file, common);
            const SPProblem spp = sp_from_regularization(sys, parse_phi(phi_name));
            const Window yw{window ? window->a : settings.sigma_a, window ? window->b : settings.sigma_b};
            if (!thetas.empty()) {
                Table t{{"theta", "y", "dy_reduced", "dtheta_fast_above", "dtheta_fast_below"}, {}};
                Json rows = Json::array();
                for (double th : thetas) {
                    const double delta = 1e-3;
                    for (double y : slow_manifold(spp, th, yw)) {
                        const double d = delta * (1.0 + std::fabs(y));
                        const double above = spp.fast_theta(th, y + d), below = spp.fast_theta(th, y - d);
                        t.rows.push_back({th, y, spp.G(th, y), above, below});
                        rows.push_back({{"theta", th}, {"y", y}, {"residual", std::fabs(spp.B(th, y))},
                                        {"dy_reduced", spp.G(th, y)}, {"dtheta_fast_above", above},
                                        {"dtheta_fast_below", below}});
                    }
                }
                emit.either({{"problem", to_json(spp)}, {"rows", std::move(rows)}}, t);
            } else {
                TraceOptions topt;
                topt.window = yw;
                topt.samples = samples;
                const SlowTrace tr = trace_slow_dynamics(spp, topt);
                for (const SlowBranch& b : tr.branches) err << "blowup: branch " << b.start << " -> " << b.end << '\n';
                emit.either({{"problem", to_json(spp)}, {"trace", to_json(tr)}}, slow_trace_table(tr));
            }
            return kOk;
        }
    } catch (const CLI::ValidationError& e) {
        err << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError& e) {
        err << "config: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kUsage;
}

}  // namespace filippov::cli
