#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "filippov/blowup.hpp"
#include "filippov/canard.hpp"
#include "filippov/errors.hpp"
#include "filippov/index.hpp"
#include "filippov/io.hpp"
#include "filippov/regularize.hpp"

namespace py = pybind11;
using namespace filippov;

namespace {

// Structured results cross the boundary as compact JSON; the Python layer decodes them.
std::string js(const Json& j) { return dump_json(j, -1); }

Var var_of(const std::string& name) {
    if (name == "x") return Var::X;
    if (name == "y") return Var::Y;
    throw PreconditionError("variable must be 'x' or 'y'");
}

NonSmoothSystem make_system(std::array<std::string, 2> x1, std::array<std::string, 2> x2, const std::string& f,
                            std::optional<std::pair<double, double>> seed) {
    std::optional<Vec2> s;
    if (seed) s = Vec2{seed->first, seed->second};
    return {{parse(x1[0]), parse(x1[1])}, {parse(x2[0]), parse(x2[1])}, parse(f), s};
}

TransitionFunction phi_of(const std::string& name) {
    if (name == "quintic") return TransitionFunction::quintic();
    if (name == "cubic") return TransitionFunction::cubic();
    throw PreconditionError("phi must be 'quintic' or 'cubic'");
}

}  // namespace

PYBIND11_MODULE(_filippov, m) {
    m.doc() = "Planar Filippov systems: sliding dynamics, canard cycles, regularization, indices, blow-up";

    py::register_exception<Error>(m, "FilippovError");

    py::class_<Expr>(m, "Expr")
        .def(py::init([](const std::string& text) { return parse(text); }), py::arg("text"))
        .def("__call__", &Expr::eval, py::arg("x"), py::arg("y"))
        .def("derivative", [](const Expr& e, const std::string& v) { return e.derivative(var_of(v)); }, py::arg("var"))
        .def("__str__", &Expr::str)
        .def("__repr__", [](const Expr& e) { return "Expr('" + e.str() + "')"; });

    py::class_<NonSmoothSystem>(m, "System")
        .def(py::init(&make_system), py::arg("x1"), py::arg("x2"), py::arg("f") = "y", py::arg("seed") = py::none())
        .def_static("from_file", [](const std::string& path) { return load_system(path).system(); }, py::arg("path"))
        .def_static("from_text", [](const std::string& text) { return parse_system_file(text).system(); },
                    py::arg("text"))
        .def("f", [](const NonSmoothSystem& s, double x, double y) { return s.f({x, y}); })
        .def("field", [](const NonSmoothSystem& s, int which, double x, double y) {
            if (which != 1 && which != 2) throw PreconditionError("field must be 1 or 2");
            const Vec2 v = s.eval(which == 1 ? Field::X1 : Field::X2, {x, y});
            return std::make_pair(v.x, v.y);
        }, py::arg("which"), py::arg("x"), py::arg("y"))
        .def("sigma_point", [](const NonSmoothSystem& s, double t) {
            const Vec2 q = s.chart().point(t);
            return std::make_pair(q.x, q.y);
        });

    m.def("classify_point", [](const NonSmoothSystem& s, double x, double y) { return js(to_json(classify_point(s, {x, y}))); });
    m.def("direction_function", [](const NonSmoothSystem& s, double z) { return direction_function(s, z); });
    m.def("sliding_field", [](const NonSmoothSystem& s, double x, double y) {
        const Vec2 v = sliding_field(s, {x, y});
        return std::make_pair(v.x, v.y);
    });
    m.def("pseudo_equilibria", [](const NonSmoothSystem& s, double a, double b) {
        Json out = Json::array();
        for (const auto& pe : pseudo_equilibria(s, a, b)) out.push_back(to_json(pe));
        return js(out);
    });
    m.def("fold_census", [](const NonSmoothSystem& s, double a, double b) {
        Json out = Json::array();
        for (const auto& fp : fold_census(s, a, b)) out.push_back(to_json(fp));
        return js(out);
    });
    m.def("hybrid_orbit", [](const NonSmoothSystem& s, double x, double y, double t_max) {
        FlowSettings fs;
        fs.t_max = t_max;
        return js(to_json(hybrid_orbit(s, {x, y}, fs)));
    }, py::arg("system"), py::arg("x"), py::arg("y"), py::arg("t_max") = 50.0);
    m.def("detect_canard", [](const NonSmoothSystem& s) { return js(to_json(detect_canard_one_fold(s))); });
    m.def("sigma_loop_scan", [](const std::string& path, double a, double b, int n) {
        const SystemFile file = load_system(path);
        return js(to_json(sigma_loop_scan([&](double mu) { return file.instantiate(mu); }, a, b, n)));
    }, py::arg("path"), py::arg("mu_a"), py::arg("mu_b"), py::arg("n"));
    m.def("convergence_study", [](const NonSmoothSystem& s, const std::vector<double>& eps, const std::string& phi) {
        const CanardReport r = detect_canard_one_fold(s);
        if (!r.found) throw PreconditionError("no canard cycle to compare against");
        return js(to_json(convergence_study(s, r.cycle.polyline(), eps, phi_of(phi))));
    }, py::arg("system"), py::arg("epsilons"), py::arg("phi") = "quintic");
    m.def("winding", [](const NonSmoothSystem& s, const std::vector<std::pair<double, double>>& path) {
        std::vector<Vec2> p;
        for (const auto& [x, y] : path) p.push_back({x, y});
        return js(to_json(angle_winding(s, p)));
    });
    m.def("circle_winding", [](const NonSmoothSystem& s, double cx, double cy, double r) {
        return js(to_json(angle_winding(s, circle_path({cx, cy}, r))));
    });
    m.def("slow_manifold", [](const NonSmoothSystem& s, double theta, double a, double b, const std::string& phi) {
        return slow_manifold(sp_from_regularization(s, phi_of(phi)), theta, {a, b});
    }, py::arg("system"), py::arg("theta"), py::arg("a") = -5.0, py::arg("b") = 5.0, py::arg("phi") = "quintic");
    m.def("trace_slow_dynamics", [](const NonSmoothSystem& s, double a, double b, const std::string& phi) {
        TraceOptions opt;
        opt.window = {a, b};
        return js(to_json(trace_slow_dynamics(sp_from_regularization(s, phi_of(phi)), opt)));
    }, py::arg("system"), py::arg("a") = -5.0, py::arg("b") = 5.0, py::arg("phi") = "quintic");
}
