#include "filippov/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "filippov/errors.hpp"
#include "numerics.hpp"

namespace filippov {

namespace {

struct Value {
    enum class Kind { String, Number, Array } kind = Kind::Number;
    std::string text;
    double number = 0.0;
    std::vector<Value> items;
    std::size_t column = 0;  // 1-based column of the first character
};

struct Entry {
    Value value;
    std::size_t line = 0;
    std::size_t column = 0;
};

class LineParser {
public:
    LineParser(const std::string& line, std::size_t line_no) : s_(line), line_(line_no) {}

    Value value() {
        skip_ws();
        Value v;
        v.column = pos_ + 1;
        if (pos_ >= s_.size()) fail("missing value");
        const char c = s_[pos_];
        if (c == '"') {
            v.kind = Value::Kind::String;
            ++pos_;
            while (pos_ < s_.size() && s_[pos_] != '"') v.text += s_[pos_++];
            if (pos_ >= s_.size()) fail("unterminated string", v.column);
            ++pos_;
        } else if (c == '[') {
            v.kind = Value::Kind::Array;
            ++pos_;
            skip_ws();
            if (peek() == ']') {
                ++pos_;
                return v;
            }
            for (;;) {
                v.items.push_back(value());
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                if (peek() == ']') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ']'");
            }
        } else {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            v.number = std::strtod(begin, &end);
            if (end == begin) fail("expected a quoted string, a number or an array");
            pos_ += static_cast<std::size_t>(end - begin);
        }
        return v;
    }

    void expect_end() {
        skip_ws();
        if (pos_ < s_.size()) fail("unexpected trailing characters");
    }

    [[noreturn]] void fail(const std::string& what, std::size_t column = 0) const {
        throw ConfigError(what, line_, column ? column : pos_ + 1);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    std::size_t& pos() { return pos_; }

private:
    const std::string& s_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

using Sections = std::map<std::string, std::map<std::string, Entry>>;

Sections tokenize(const std::string& text) {
    Sections sections;
    std::string current;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string line = strip_comment(raw);
        LineParser p(line, line_no);
        p.skip_ws();
        if (p.peek() == '\0') continue;
        if (p.peek() == '[') {
            const std::size_t open = p.pos();
            const std::size_t close = line.find(']', open);
            if (close == std::string::npos) p.fail("unterminated section header");
            current = line.substr(open + 1, close - open - 1);
            if (current != "system" && current != "analysis" && current != "tolerances") {
                throw ConfigError("unknown section [" + current + "]", line_no, open + 1);
            }
            p.pos() = close + 1;
            p.expect_end();
            sections[current];
            continue;
        }
        if (current.empty()) p.fail("key outside of a section");
        const std::size_t key_start = p.pos();
        while (std::isalnum(static_cast<unsigned char>(p.peek())) || p.peek() == '_') ++p.pos();
        const std::string key = line.substr(key_start, p.pos() - key_start);
        if (key.empty()) p.fail("expected a key");
        p.skip_ws();
        if (p.peek() != '=') p.fail("expected '=' after key '" + key + "'");
        ++p.pos();
        Entry e{p.value(), line_no, key_start + 1};
        p.expect_end();
        auto& sec = sections[current];
        if (sec.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no, key_start + 1);
        sec.emplace(key, std::move(e));
    }
    return sections;
}

[[noreturn]] void bad(const Entry& e, const std::string& what) { throw ConfigError(what, e.line, e.value.column); }

double number(const Entry& e, const std::string& key) {
    if (e.value.kind != Value::Kind::Number) bad(e, key + " must be a number");
    return e.value.number;
}

std::vector<double> numbers(const Entry& e, const std::string& key) {
    if (e.value.kind != Value::Kind::Array) bad(e, key + " must be an array of numbers");
    std::vector<double> out;
    for (const Value& v : e.value.items) {
        if (v.kind != Value::Kind::Number) throw ConfigError(key + " must contain numbers only", e.line, v.column);
        out.push_back(v.number);
    }
    return out;
}

std::string expression(const Entry& e, const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::String) throw ConfigError(key + " must be a quoted expression", e.line, v.column);
    try {
        (void)parse(substitute_mu(v.text, 0.0));
    } catch (const ParseError& err) {
        const bool shifted = v.text != substitute_mu(v.text, 0.0);
        throw ConfigError(std::string("cannot parse ") + key + ": " + err.what(), e.line,
                          shifted ? v.column : v.column + 1 + err.offset());
    }
    return v.text;
}

std::array<std::string, 2> field(const Entry& e, const std::string& key) {
    if (e.value.kind != Value::Kind::Array || e.value.items.size() != 2) {
        bad(e, key + " must have exactly 2 components");
    }
    return {expression(e, e.value.items[0], key + "[0]"), expression(e, e.value.items[1], key + "[1]")};
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_e(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

}  // namespace

std::string substitute_mu(const std::string& text, double mu) {
    static const std::regex word(R"(\bmu\b)");
    return std::regex_replace(text, word, "(" + fmt(mu) + ")");
}

bool SystemFile::is_family() const {
    static const std::regex word(R"(\bmu\b)");
    for (const std::string* s : {&f, &x1[0], &x1[1], &x2[0], &x2[1]}) {
        if (std::regex_search(*s, word)) return true;
    }
    return false;
}

NonSmoothSystem SystemFile::instantiate(double value) const {
    const auto p = [&](const std::string& s) { return parse(substitute_mu(s, value)); };
    try {
        return NonSmoothSystem({p(x1[0]), p(x1[1])}, {p(x2[0]), p(x2[1])}, p(f), seed);
    } catch (const PreconditionError& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

NonSmoothSystem SystemFile::system() const {
    if (is_family() && !mu) throw ConfigError(source + ": system depends on mu; set mu in [system] or pass a value");
    return instantiate(mu.value_or(0.0));
}

std::optional<Vec2> regular_value_violation(const Expr& f, double a, double b, double gradient_min) {
    const Expr fx = f.derivative(Var::X);
    const Expr fy = f.derivative(Var::Y);
    const auto grad = [&](Vec2 q) { return Vec2{fx.eval(q.x, q.y), fy.eval(q.x, q.y)}; };
    const int lines = 41;
    const int intervals = 400;
    const double h = (b - a) / intervals;
    for (int k = 0; k < lines; ++k) {
        const double c = a + (b - a) * k / (lines - 1);
        for (const bool horizontal : {true, false}) {
            const auto at = [&](double t) { return horizontal ? Vec2{t, c} : Vec2{c, t}; };
            const Expr& along = horizontal ? fx : fy;
            const auto g = [&](double t) -> std::optional<double> {
                try {
                    const Vec2 q = at(t);
                    return f.eval(q.x, q.y);
                } catch (const DomainError&) {
                    return std::nullopt;
                }
            };
            // Exact zeros at the samples catch lines lying inside {f = 0}.
            for (int i = 0; i <= intervals; ++i) {
                const Vec2 q = at(a + (b - a) * i / intervals);
                const auto v = g(horizontal ? q.x : q.y);
                if (v && *v == 0.0 && norm(grad(q)) < gradient_min) return q;
            }
            detail::ScanOptions opt;
            opt.intervals = intervals;
            for (const auto& r : detail::scan_roots(g, a, b, opt)) {
                double t = r.s;
                if (r.double_root) {
                    // Polish a touching zero onto the critical point of f along the line.
                    const auto d = [&](double u) {
                        const Vec2 q = at(u);
                        return along.eval(q.x, q.y);
                    };
                    const double lo = std::max(a, t - h), hi = std::min(b, t + h);
                    const double dlo = d(lo), dhi = d(hi);
                    if (dlo * dhi < 0.0) t = detail::refine_root(d, lo, hi, dlo, dhi, 1e-16);
                }
                const Vec2 q = at(t);
                try {
                    if (norm(grad(q)) < gradient_min) return q;
                } catch (const DomainError&) {
                    return q;
                }
            }
        }
    }
    return std::nullopt;
}

SystemFile parse_system_file(const std::string& text, const std::string& source) {
    const Sections sections = tokenize(text);
    SystemFile out;
    out.source = source;
    const auto sys_it = sections.find("system");
    if (sys_it == sections.end()) throw ConfigError(source + ": missing [system] section");
    const auto& sys = sys_it->second;
    for (const auto& [key, e] : sys) {
        if (key == "f") {
            if (e.value.kind != Value::Kind::String) bad(e, "f must be a quoted expression");
            out.f = expression(e, e.value, "f");
        } else if (key == "X1") {
            out.x1 = field(e, "X1");
        } else if (key == "X2") {
            out.x2 = field(e, "X2");
        } else if (key == "seed") {
            const auto v = numbers(e, "seed");
            if (v.size() != 2) bad(e, "seed must have exactly 2 components");
            out.seed = Vec2{v[0], v[1]};
        } else if (key == "mu") {
            out.mu = number(e, "mu");
        } else {
            throw ConfigError("unknown key '" + key + "' in [system]", e.line, e.column);
        }
    }
    for (const char* key : {"X1", "X2"}) {
        if (!sys.count(key)) throw ConfigError(source + ": missing required key '" + key + "' in [system]");
    }

    if (const auto it = sections.find("analysis"); it != sections.end()) {
        for (const auto& [key, e] : it->second) {
            if (key == "sigma_window") {
                const auto v = numbers(e, key);
                if (v.size() != 2 || !(v[0] < v[1])) bad(e, "sigma_window must be [a, b] with a < b");
                out.analysis.sigma_a = v[0];
                out.analysis.sigma_b = v[1];
            } else if (key == "t_max") {
                out.analysis.t_max = number(e, key);
                if (!(out.analysis.t_max > 0.0)) bad(e, "t_max must be positive");
            } else if (key == "epsilon_list") {
                out.analysis.epsilon_list = numbers(e, key);
                if (out.analysis.epsilon_list.empty()) bad(e, "epsilon_list must not be empty");
                for (double eps : out.analysis.epsilon_list) {
                    if (!(eps > 0.0)) bad(e, "epsilon_list entries must be positive");
                }
            } else if (key == "mu_range") {
                const auto v = numbers(e, key);
                if (v.size() != 3 || v[2] < 2 || v[2] != std::floor(v[2]) || !(v[0] < v[1])) {
                    bad(e, "mu_range must be [a, b, n] with a < b and integer n >= 2");
                }
                out.analysis.mu_range = MuRange{v[0], v[1], static_cast<int>(v[2])};
            } else {
                throw ConfigError("unknown key '" + key + "' in [analysis]", e.line, e.column);
            }
        }
    }
    if (const auto it = sections.find("tolerances"); it != sections.end()) {
        const std::map<std::string, double Tolerances::*> slots{{"tangency_rel", &Tolerances::tangency_rel},
                                                                 {"on_manifold", &Tolerances::on_manifold},
                                                                 {"gradient_min", &Tolerances::gradient_min},
                                                                 {"slope_floor", &Tolerances::slope_floor}};
        for (const auto& [key, e] : it->second) {
            const auto slot = slots.find(key);
            if (slot == slots.end()) throw ConfigError("unknown key '" + key + "' in [tolerances]", e.line, e.column);
            const double v = number(e, key);
            if (!(v > 0.0)) bad(e, key + " must be positive");
            out.analysis.tol.*(slot->second) = v;
        }
    }

    const double mu_value = out.mu.value_or(0.0);
    const Expr f = parse(substitute_mu(out.f, mu_value));
    if (const auto w = regular_value_violation(f, out.analysis.sigma_a, out.analysis.sigma_b,
                                               out.analysis.tol.gradient_min)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: 0 is not a regular value of f: grad f vanishes at (%.9g, %.9g)",
                      source.c_str(), w->x, w->y);
        throw ConfigError(buf);
    }
    return out;
}

SystemFile load_system(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read system file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_system_file(ss.str(), path);
}

std::string emit_system(const SystemFile& file) {
    std::ostringstream out;
    const auto q = [](const std::string& s) { return "\"" + s + "\""; };
    out << "[system]\n";
    out << "f = " << q(file.f) << "\n";
    out << "X1 = [" << q(file.x1[0]) << ", " << q(file.x1[1]) << "]\n";
    out << "X2 = [" << q(file.x2[0]) << ", " << q(file.x2[1]) << "]\n";
    if (file.seed) out << "seed = [" << fmt(file.seed->x) << ", " << fmt(file.seed->y) << "]\n";
    if (file.mu) out << "mu = " << fmt(*file.mu) << "\n";
    const AnalysisSettings& a = file.analysis;
    out << "\n[analysis]\n";
    out << "sigma_window = [" << fmt(a.sigma_a) << ", " << fmt(a.sigma_b) << "]\n";
    out << "t_max = " << fmt(a.t_max) << "\n";
    out << "epsilon_list = [";
    for (std::size_t i = 0; i < a.epsilon_list.size(); ++i) out << (i ? ", " : "") << fmt(a.epsilon_list[i]);
    out << "]\n";
    if (a.mu_range) out << "mu_range = [" << fmt(a.mu_range->a) << ", " << fmt(a.mu_range->b) << ", " << a.mu_range->n << "]\n";
    out << "\n[tolerances]\n";
    out << "tangency_rel = " << fmt(a.tol.tangency_rel) << "\n";
    out << "on_manifold = " << fmt(a.tol.on_manifold) << "\n";
    out << "gradient_min = " << fmt(a.tol.gradient_min) << "\n";
    out << "slope_floor = " << fmt(a.tol.slope_floor) << "\n";
    return out.str();
}

namespace {

void dump(std::string& out, const Json& v, int indent, int depth) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump(out, it.value(), indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                dump(out, item, indent, depth + 1);
            }
            newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double d = v.get<double>();
            out += std::isfinite(d) ? fmt_e(d) : "null";
            return;
        }
        default: out += v.dump();
    }
}

std::string csv_cell(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return std::isfinite(*d) ? fmt_e(*d) : "nan";
    if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

Json points_json(const std::vector<Vec2>& pts) {
    Json a = Json::array();
    for (const Vec2& q : pts) a.push_back(to_json(q));
    return a;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string dump_json(const Json& value, int indent) {
    std::string out;
    dump(out, value, indent, 0);
    return out;
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << csv_cell(table.header[i]);
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
    if (!out) throw Error("failed to write CSV output");
}

std::string csv_string(const Table& table) {
    std::ostringstream ss;
    write_csv(ss, table);
    return ss.str();
}

Json to_json(Vec2 q) { return Json::array({q.x, q.y}); }

Json to_json(const SigmaClass& c) {
    Json j{{"region", to_string(c.region)}, {"label", c.label()}};
    if (c.region == Region::FoldVisible || c.region == Region::FoldInvisible) j["field"] = to_string(c.field);
    if (c.region == Region::PseudoEquilibrium) {
        j["pseudo"] = to_string(c.pseudo);
        j["side"] = to_string(c.side);
    }
    if (!c.reason.empty()) j["reason"] = c.reason;
    return j;
}

Json to_json(const PseudoEquilibrium& pe) {
    return {{"s", pe.s}, {"point", to_json(pe.point)}, {"side", to_string(pe.side)},
            {"kind", to_string(pe.kind)}, {"slope", pe.slope}};
}

Json to_json(const FoldPoint& fp) {
    return {{"s", fp.s}, {"point", to_json(fp.point)}, {"field", to_string(fp.field)}, {"visible", fp.visible}};
}

Json to_json(const Arc& arc) {
    Json pts = Json::array();
    for (const ArcPoint& p : arc.points) pts.push_back(Json::array({p.t, p.q.x, p.q.y}));
    Json j{{"regime", to_string(arc.regime)}, {"end", to_string(arc.end)}, {"escaping", arc.escaping},
           {"points", std::move(pts)}};
    if (arc.fold_field) j["fold_field"] = to_string(*arc.fold_field);
    return j;
}

Json to_json(const HybridOrbit& orbit) {
    Json arcs = Json::array();
    for (const Arc& a : orbit.arcs) arcs.push_back(to_json(a));
    Json tr = Json::array();
    for (const Junction& j : orbit.transitions) {
        tr.push_back({{"kind", to_string(j.kind)}, {"t", j.t}, {"point", to_json(j.point)}});
    }
    return {{"arcs", std::move(arcs)}, {"transitions", std::move(tr)}, {"diagnostic", orbit.diagnostic},
            {"hit_section", orbit.hit_section}};
}

Json to_json(const CanardReport& r) {
    const auto intervals = [](const std::vector<Interval>& v) {
        Json a = Json::array();
        for (const Interval& i : v) a.push_back(Json::array({i.a, i.b}));
        return a;
    };
    Json segments = Json::array();
    for (const CycleSegment& s : r.cycle.segments) {
        segments.push_back({{"regime", to_string(s.regime)}, {"points", points_json(s.points)}});
    }
    Json pes = Json::array();
    for (const PseudoEquilibrium& pe : r.pseudo_equilibria) pes.push_back(to_json(pe));
    Json j{{"found", r.found},
           {"kind", r.kind ? Json(to_string(*r.kind)) : Json(nullptr)},
           {"fold", r.fold ? to_json(*r.fold) : Json(nullptr)},
           {"a", to_json(r.a)},
           {"b", to_json(r.b)},
           {"s_a", r.s_a},
           {"s_b", r.s_b},
           {"sliding_intervals", intervals(r.sliding_intervals)},
           {"escaping_intervals", intervals(r.escaping_intervals)},
           {"hyperbolic", r.hyperbolic},
           {"certificate", r.certificate},
           {"conditions",
            {{"focal", r.focal},
             {"normals_opposite", r.normals_opposite},
             {"independent", r.independent},
             {"h_defined", r.h_defined},
             {"h_zero_free", r.h_zero_free},
             {"orientation_ok", r.orientation_ok},
             {"theorem_a", r.theorem_a},
             {"corollary", r.corollary}}},
           {"pseudo_equilibria", std::move(pes)},
           {"diagnostics", r.diagnostics},
           {"cycle", {{"segments", std::move(segments)}, {"closure_gap", r.cycle.segments.empty() ? 0.0 : r.cycle.closure_gap()}}}};
    return j;
}

Json to_json(const ScanResult& scan) {
    Json rows = Json::array();
    for (const ScanRow& r : scan.rows) {
        rows.push_back({{"mu", r.mu}, {"zeros", r.zeros}, {"sign_h_at_b", r.sign_h_at_b},
                        {"case", r.proposition_case}, {"verdict", r.verdict}, {"s_a", r.s_a}, {"s_b", r.s_b},
                        {"extreme_h", r.extreme_h}, {"margin", r.margin}, {"error", r.error}});
    }
    return {{"rows", std::move(rows)}, {"bifurcation_mu", optional_json(scan.bifurcation_mu)},
            {"bifurcation_s", optional_json(scan.bifurcation_s)}};
}

Json to_json(const CycleEstimate& c) {
    Json pts = Json::array();
    for (const ArcPoint& p : c.polyline) pts.push_back(Json::array({p.t, p.q.x, p.q.y}));
    return {{"period", c.period},
            {"multiplier", c.multiplier},
            {"multiplier_error", c.multiplier_error},
            {"hyperbolic", c.hyperbolic},
            {"section", {{"a", to_json(c.section.a)}, {"b", to_json(c.section.b)}}},
            {"u", c.u},
            {"closure_gap", c.closure_gap},
            {"iterations", c.iterations},
            {"polyline", std::move(pts)}};
}

Json to_json(const ConvergenceStudy& study) {
    Json rows = Json::array();
    for (const StudyRow& r : study.rows) {
        rows.push_back({{"epsilon", r.epsilon}, {"found", r.found}, {"hausdorff", r.hausdorff},
                        {"multiplier", r.multiplier}, {"multiplier_error", r.multiplier_error},
                        {"period", r.period}, {"error", r.error}});
    }
    return {{"rows", std::move(rows)}, {"strictly_decreasing", study.strictly_decreasing}};
}

Json to_json(const IndexReport& r) {
    Json jumps = Json::array();
    for (const JumpRecord& j : r.jumps) {
        jumps.push_back({{"point", to_json(j.point)}, {"from", to_string(j.from)}, {"to", to_string(j.to)},
                         {"before", to_json(j.before)}, {"after", to_json(j.after)}, {"angle", j.angle}});
    }
    Json interior = Json::array();
    for (const InteriorPoint& p : r.interior) {
        interior.push_back({{"point", to_json(p.point)}, {"kind", p.kind}, {"index", p.index}});
    }
    return {{"index", r.index}, {"total_angle", r.total_angle}, {"raw_winding", r.raw_winding},
            {"jumps", std::move(jumps)}, {"interior", std::move(interior)}};
}

Json to_json(const TheoremCReport& r) {
    return {{"winding", r.winding},
            {"interior_sum", r.interior_sum},
            {"saddles", r.saddles},
            {"non_saddles", r.non_saddles},
            {"holds", r.holds},
            {"corollary_split", r.corollary_split},
            {"verdict", r.verdict},
            {"path", to_json(r.path_report)}};
}

Json to_json(const SPProblem& spp) {
    return {{"switching", spp.normal_var == Var::X ? "x" : "y"},
            {"sigma_coordinate", spp.sigma_var == Var::X ? "x" : "y"},
            {"normal_mean", spp.normal_mean.str()},
            {"normal_half_diff", spp.normal_half_diff.str()},
            {"tangent_mean", spp.tangent_mean.str()},
            {"tangent_half_diff", spp.tangent_half_diff.str()},
            {"transition", spp.phi.name()},
            {"degenerate", spp.degenerate},
            {"fast", spp.fast_str()},
            {"reduced", spp.reduced_str()}};
}

Json to_json(const SlowTrace& trace) {
    Json branches = Json::array();
    for (const SlowBranch& b : trace.branches) {
        Json pts = Json::array();
        for (const SlowSample& s : b.points) {
            pts.push_back({{"theta", s.theta}, {"y", s.y}, {"residual", s.residual}, {"dy_reduced", s.dy_reduced},
                           {"dtheta_fast_above", s.dtheta_fast_above}, {"dtheta_fast_below", s.dtheta_fast_below}});
        }
        branches.push_back({{"start", b.start}, {"end", b.end}, {"points", std::move(pts)}});
    }
    Json tps = Json::array();
    for (const TurningPoint& t : trace.turning_points) tps.push_back({{"theta", t.theta}, {"y", t.y}});
    return {{"branches", std::move(branches)}, {"turning_points", std::move(tps)}, {"degenerate", trace.degenerate},
            {"notes", trace.notes}};
}

Table scan_table(const ScanResult& scan) {
    Table t{{"mu", "zeros", "sign_h_at_b", "case", "verdict", "s_a", "s_b", "extreme_h", "margin"}, {}};
    for (const ScanRow& r : scan.rows) {
        t.rows.push_back({r.mu, static_cast<long long>(r.zeros), static_cast<long long>(r.sign_h_at_b),
                          static_cast<long long>(r.proposition_case), r.error.empty() ? r.verdict : "error: " + r.error,
                          r.s_a, r.s_b, r.extreme_h, r.margin});
    }
    return t;
}

Table convergence_table(const ConvergenceStudy& study) {
    Table t{{"epsilon", "hausdorff", "multiplier", "period"}, {}};
    for (const StudyRow& r : study.rows) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        t.rows.push_back({r.epsilon, r.found ? r.hausdorff : nan, r.found ? r.multiplier : nan,
                          r.found ? r.period : nan});
    }
    return t;
}

Table slow_trace_table(const SlowTrace& trace) {
    Table t{{"theta", "y", "dy_reduced", "dtheta_fast_above", "dtheta_fast_below"}, {}};
    for (const SlowBranch& b : trace.branches) {
        for (const SlowSample& s : b.points) {
            t.rows.push_back({s.theta, s.y, s.dy_reduced, s.dtheta_fast_above, s.dtheta_fast_below});
        }
    }
    return t;
}

Table polyline_table(std::span<const Vec2> points) {
    Table t{{"x", "y"}, {}};
    for (const Vec2& q : points) t.rows.push_back({q.x, q.y});
    return t;
}

}  // namespace filippov
