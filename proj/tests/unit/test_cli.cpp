#include <sstream>
#include <vector>

#include "doctest.h"
#include "filippov/cli.hpp"
#include "json.hpp"

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "filippov");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = filippov::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(FILIPPOV_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("classify emits one CSV row per sample") {
    const Result r = run({"classify", "--system", data("loop.sys"), "--window", "-3:3:601"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "s,x,y,region,label,H");
    int rows = 0, folds = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.find("FoldVisible(X1)") != std::string::npos) {
            ++folds;
            CHECK(line.rfind("-1.000000000000e+00", 0) == 0);
        }
    }
    CHECK(rows == 601);
    CHECK(folds == 1);
}

TEST_CASE("canard report and expectations") {
    const Result r = run({"canard", "--system", data("loop_canard.sys"), "--expect", "found"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["found"] == true);
    CHECK(j["kind"] == "III");
    CHECK(run({"canard", "--system", data("loop.sys"), "--expect", "found"}).code == 1);
    CHECK(run({"canard", "--system", data("loop.sys"), "--expect", "absent"}).code == 0);
    CHECK(run({"canard", "--system", data("loop_family.sys"), "--mu", "-0.25", "--expect", "absent"}).code == 0);
}

TEST_CASE("index on a circle") {
    const Result r = run({"index", "--system", data("circle.sys"), "--circle", "0,0,1.001", "--expect", "1"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["index"] == 1);
    CHECK(run({"index", "--system", data("circle.sys"), "--circle", "0,0,1.001", "--expect", "2"}).code == 1);
}

TEST_CASE("blowup row at pi / 4") {
    const Result r = run({"blowup", "--system", data("vertical.sys"), "--theta", "0.7853981634"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "theta,y,dy_reduced,dtheta_fast_above,dtheta_fast_below");
    CHECK(std::stod(row.substr(row.find(',') + 1)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("usage and numeric failures map to exit codes") {
    CHECK(run({}).code == 2);
    CHECK(run({"classify"}).code == 2);
    CHECK(run({"classify", "--system", data("loop.sys"), "--window", "3:1"}).code == 2);
    CHECK(run({"orbit", "--system", data("loop.sys"), "--from", "1"}).code == 2);
    CHECK(run({"classify", "--system", data("missing.sys")}).code == 2);
    CHECK(run({"scan", "--system", data("loop.sys")}).code == 2);
    CHECK(run({"canard", "--system", data("two_fold.sys")}).code == 3);
    const Result r = run({"canard", "--system", data("two_fold.sys")});
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("identical invocations give identical bytes") {
    const std::vector<std::string> args{"scan", "--system", data("loop_family.sys"), "--mu-range", "-0.5:0.5:11",
                                        "--format", "json"};
    const Result a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(std::fabs(j["bifurcation_mu"].get<double>()) < 1e-6);
}

TEST_CASE("orbit and converge outputs parse") {
    const Result o = run({"orbit", "--system", data("loop.sys"), "--from", "0.5,0", "--t-max", "20"});
    REQUIRE(o.code == 0);
    CHECK(nlohmann::json::parse(o.out)["arcs"].size() >= 2);
    const Result c = run({"converge", "--system", data("loop_canard.sys"), "--epsilons", "0.1,0.05",
                          "--expect", "decreasing"});
    CHECK(c.code == 0);
    CHECK(c.out.rfind("epsilon,hausdorff,multiplier,period\n", 0) == 0);
}
