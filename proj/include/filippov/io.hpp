#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "filippov/blowup.hpp"
#include "filippov/canard.hpp"
#include "filippov/flow.hpp"
#include "filippov/index.hpp"
#include "filippov/regularize.hpp"
#include "filippov/system.hpp"
#include "json.hpp"

namespace filippov {

struct MuRange {
    double a = 0.0;
    double b = 0.0;
    int n = 0;
};

struct AnalysisSettings {
    double sigma_a = -5.0;
    double sigma_b = 5.0;
    double t_max = 1e3;
    std::vector<double> epsilon_list{0.1, 0.05, 0.02, 0.01};
    std::optional<MuRange> mu_range;
    Tolerances tol{};
};

/// Parsed system file. Expression texts may contain the family parameter `mu`.
struct SystemFile {
    std::string f = "y";
    std::array<std::string, 2> x1;
    std::array<std::string, 2> x2;
    std::optional<Vec2> seed;
    std::optional<double> mu;  // default family member
    AnalysisSettings analysis;
    std::string source = "<memory>";

    [[nodiscard]] bool is_family() const;
    /// The system with `mu` replaced textually by the given value.
    [[nodiscard]] NonSmoothSystem instantiate(double mu) const;
    /// The system itself; families use the `mu` key and fail without it.
    [[nodiscard]] NonSmoothSystem system() const;
};

/// Throws ConfigError with line and column on malformed input, missing keys, wrong
/// arity, unparsable expressions and switching functions without 0 as a regular value.
[[nodiscard]] SystemFile parse_system_file(const std::string& text, const std::string& source = "<memory>");
[[nodiscard]] SystemFile load_system(const std::string& path);

/// Text form accepted by parse_system_file.
[[nodiscard]] std::string emit_system(const SystemFile& file);

/// Replace whole-word occurrences of `mu` by the value, parenthesized.
[[nodiscard]] std::string substitute_mu(const std::string& text, double mu);

/// Check that grad f does not vanish on {f = 0} inside the square window; returns a witness.
[[nodiscard]] std::optional<Vec2> regular_value_violation(const Expr& f, double a, double b,
                                                          double gradient_min = 1e-8);

using Json = nlohmann::json;

/// Deterministic JSON: keys sorted, floats as %.12e, non-finite floats as null.
[[nodiscard]] std::string dump_json(const Json& value, int indent = 2);

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

/// CSV with a header row; floats as %.12e.
void write_csv(std::ostream& out, const Table& table);
[[nodiscard]] std::string csv_string(const Table& table);

[[nodiscard]] Json to_json(Vec2 q);
[[nodiscard]] Json to_json(const SigmaClass& c);
[[nodiscard]] Json to_json(const PseudoEquilibrium& pe);
[[nodiscard]] Json to_json(const FoldPoint& fp);
[[nodiscard]] Json to_json(const Arc& arc);
[[nodiscard]] Json to_json(const HybridOrbit& orbit);
[[nodiscard]] Json to_json(const CanardReport& report);
[[nodiscard]] Json to_json(const ScanResult& scan);
[[nodiscard]] Json to_json(const CycleEstimate& cycle);
[[nodiscard]] Json to_json(const ConvergenceStudy& study);
[[nodiscard]] Json to_json(const IndexReport& report);
[[nodiscard]] Json to_json(const TheoremCReport& report);
[[nodiscard]] Json to_json(const SPProblem& spp);
[[nodiscard]] Json to_json(const SlowTrace& trace);

[[nodiscard]] Table scan_table(const ScanResult& scan);
[[nodiscard]] Table convergence_table(const ConvergenceStudy& study);
[[nodiscard]] Table slow_trace_table(const SlowTrace& trace);
[[nodiscard]] Table polyline_table(std::span<const Vec2> points);

}  // namespace filippov
