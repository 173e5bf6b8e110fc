#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ecado/errors.hpp"
#include "ecado/experiment.hpp"

using namespace ecado;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("ecado_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("minimal spec gets defaults") {
    const auto s = parse_spec_text(R"({"problem":"quadratic_random","n":4,"m":3,"seed":1,"solver":"ecado"})");
    CHECK(s.n == 4);
    CHECK(s.m == 3);
    CHECK(s.seed == 1);
    CHECK(s.ec.dt_init == 1.0);
    CHECK(s.ec.eta == 0.5);
    CHECK(s.ec.delta == 1e-3);
    CHECK(s.x0 == "zero");
    CHECK_FALSE(s.analysis);
}

TEST_CASE("unknown keys are named") {
    try {
        parse_spec_text(R"({"problem":"quadratic_random","solver":"ecado","foo":1})");
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.key() == "foo");
    }
    try {
        parse_spec_text(R"({"problem":"quadratic_random","solver":"cgd","config":{"dt_init":1}})");
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.key() == "config.dt_init");
    }
}

TEST_CASE("malformed specs are rejected") {
    CHECK_THROWS_AS(parse_spec_text("{not json"), SchemaError);
    CHECK_THROWS_AS(parse_spec_text(R"({"problem":"cubic","solver":"ecado"})"), SchemaError);
    CHECK_THROWS_AS(parse_spec_text(R"({"problem":"quadratic_random"})"), SchemaError);
    CHECK_THROWS_AS(parse_spec_text(R"({"problem":"quadratic_random","solver":"ecado","n":"four"})"), SchemaError);
    CHECK_THROWS_AS(parse_spec_text(R"({"problem":"quadratic_random","solver":"ecado","n":0})"), SchemaError);
    CHECK_THROWS_AS(parse_spec_text(R"({"problem":"quadratic_random","solver":"ecado","config":{"eta":2}})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_spec_text(R"({"problem":"quadratic_file","solver":"ecado","file":"/nonexistent/q.json"})"),
                    ConfigError);
}

TEST_CASE("parse and serialize round trip") {
    const char* specs[] = {
        R"({"problem":"quadratic_random","n":5,"m":2,"seed":9,"solver":"ecado","config":{"L":3,"scaling":"hessian","window":2.5}})",
        R"({"problem":"logistic_synth","m":4,"l":50,"d":20,"lambda":0.01,"seed":3,"x0":"flat","solver":"admm","config":{"alpha":0.5,"admm_dual":"printed"}})",
        R"({"problem":"quadratic_random","solver":"one_shot","config":{"dt":0.25,"sub_integrator":"forward_euler"}})",
        R"({"problem":"quadratic_random","solver":"basic_gs","analysis":true,"workers":3,"output":"elsewhere"})",
    };
    for (const char* text : specs) {
        const auto a = parse_spec_text(text);
        const auto j = a.to_json();
        const auto b = parse_spec(j);
        CHECK(b.to_json() == j);
    }
}

TEST_CASE("quadratic random run writes artifacts") {
    const auto dir = scratch("run");
    const auto s = parse_spec_text(R"({"problem":"quadratic_random","n":4,"m":3,"seed":1,"solver":"ecado","analysis":true})");
    const auto oc = run_experiment(s, dir.string());
    CHECK(oc.exit_code == 0);
    CHECK(oc.converged);
    CHECK(fs::exists(dir / "trace.csv"));
    CHECK(fs::exists(dir / "trace.json"));
    CHECK(oc.summary["stationarity"].get<double>() <= 1e-8);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["converged"].get<bool>());
    CHECK(summary.contains("wall_ms"));
    CHECK(summary.contains("iterations"));

    std::istringstream csv(slurp(dir / "comparison.csv"));
    std::string line;
    std::getline(csv, line);
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        const double rho = std::stod(line.substr(line.find(',') + 1));
        CHECK(std::isfinite(rho));
    }
    CHECK(rows == 5);
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().string().find(".tmp") == std::string::npos);
}

TEST_CASE("repeated runs are byte identical") {
    const auto a = scratch("rep_a"), b = scratch("rep_b");
    const auto s = parse_spec_text(R"({"problem":"quadratic_random","n":4,"m":3,"seed":1,"solver":"ecado"})");
    run_experiment(s, a.string());
    run_experiment(s, b.string());
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
    CHECK(slurp(a / "trace.json") == slurp(b / "trace.json"));
}

TEST_CASE("failed runs flush the partial trace and exit nonzero") {
    const auto dir = scratch("fail");
    const auto s = parse_spec_text(
        R"({"problem":"quadratic_random","n":4,"m":3,"seed":1,"solver":"ecado","config":{"max_outer":2}})");
    const auto oc = run_experiment(s, dir.string());
    CHECK(oc.exit_code != 0);
    CHECK_FALSE(oc.converged);
    const std::string csv = slurp(dir / "trace.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(oc.summary.contains("error"));

    const auto b = parse_spec_text(
        R"({"problem":"quadratic_random","n":4,"m":3,"seed":1,"solver":"cgd","config":{"max_iters":5}})");
    CHECK(run_experiment(b, scratch("fail_cgd").string()).exit_code != 0);
}

TEST_CASE("every solver runs through the experiment layer") {
    for (const char* solver : {"basic_gs", "cgd", "dane", "admm", "one_shot"}) {
        nlohmann::json j = {{"problem", "quadratic_random"}, {"n", 3}, {"m", 2}, {"seed", 4}, {"solver", solver}};
        if (std::string(solver) == "cgd" || std::string(solver) == "admm") j["config"] = {{"alpha", 0.1}};
        if (std::string(solver) == "dane") j["config"] = {{"alpha", 0.5}};
        if (std::string(solver) == "one_shot") j["config"] = {{"zi", 1.0}, {"zc", 2.0}};
        const auto oc = run_experiment(parse_spec(j), scratch(std::string("solver_") + solver).string());
        CHECK_MESSAGE(oc.exit_code == 0, solver);
    }
}

TEST_CASE("quadratic file problems") {
    const auto dir = scratch("qfile");
    std::ofstream(dir / "q.json") << R"({"blocks":[{"A":[[2]],"B":[0],"C":0},{"A":[[4]],"B":[-4],"C":1}]})";
    std::ofstream(dir / "spec.json") << R"({"problem":"quadratic_file","file":"q.json","solver":"ecado"})";
    const auto s = parse_spec_file((dir / "spec.json").string());
    const auto p = build_problem(s);
    CHECK(p.m() == 2);
    const auto oc = run_experiment(s, (dir / "out").string());
    CHECK(oc.exit_code == 0);
    CHECK(std::abs(oc.summary["x_c"][0].get<double>() - 2.0 / 3.0) < 1e-8);
}

TEST_CASE("generated data round trips") {
    const auto dir = scratch("gen");
    const auto s = parse_spec_text(R"({"problem":"logistic_synth","m":2,"l":5,"d":3,"seed":8,"solver":"ecado"})");
    generate_data(s, (dir / "data.json").string());
    const auto j = nlohmann::json::parse(slurp(dir / "data.json"));
    REQUIRE(j["agents"].size() == 2);
    const auto d = dataset_from_json(j["agents"][1]);
    CHECK(d.features == synth_logistic_data(2, 5, 3, 8).at(1).features);
    const auto q = parse_spec_text(R"({"problem":"quadratic_random","n":2,"m":2,"seed":8,"solver":"ecado"})");
    generate_data(q, (dir / "q.json").string());
    CHECK(nlohmann::json::parse(slurp(dir / "q.json"))["blocks"].size() == 2);
}

TEST_CASE("analysis of a logistic problem is refused") {
    const auto s = parse_spec_text(R"({"problem":"logistic_synth","m":2,"l":5,"d":3,"solver":"ecado"})");
    CHECK_THROWS_AS(analyze_experiment(s), CapabilityError);
}

TEST_CASE("atomic writes replace whole files") {
    const auto dir = scratch("atomic");
    const auto f = (dir / "nested" / "x.txt").string();
    write_file_atomic(f, "first");
    write_file_atomic(f, "second");
    CHECK(slurp(f) == "second");
    int entries = 0;
    for (const auto& e : fs::directory_iterator(dir / "nested")) (void)e, ++entries;
    CHECK(entries == 1);
}
