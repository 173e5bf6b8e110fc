#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "ecado/baselines.hpp"
#include "ecado/ec_model.hpp"
#include "ecado/objectives.hpp"

namespace ecado {

enum class ProblemKind { quadratic_random, quadratic_file, logistic_synth };
enum class SolverKind { ecado, basic_gs, cgd, dane, admm, one_shot };

struct ExperimentSpec {
    ProblemKind problem = ProblemKind::quadratic_random;
    int n = 4;
    int m = 3;
    std::uint64_t seed = 0;
    int l = 50;
    int d = 20;
    double lambda = 1e-2;
    std::string file;  // quadratic_file only
    std::string x0 = "zero";  // "zero" or "flat" (all ones)

    SolverKind solver = SolverKind::ecado;
    EcadoConfig ec;
    BaselineConfig base;
    OneShotConfig one_shot;

    std::string output = "out";
    bool analysis = false;
    int workers = 1;

    nlohmann::json to_json() const;
};

// Validates against the schema, applies defaults, rejects unknown keys.
ExperimentSpec parse_spec(const nlohmann::json& j);
ExperimentSpec parse_spec_text(const std::string& text);
ExperimentSpec parse_spec_file(const std::string& path);

SeparableProblem build_problem(const ExperimentSpec& spec);
Vector initial_point(const ExperimentSpec& spec, int n);

struct ExperimentOutcome {
    int exit_code = 0;
    bool converged = false;
    std::string trace_csv_path;
    nlohmann::json summary;
};

// Runs the configured solver and writes trace.csv, trace.json, summary.json and,
// when analysis is on for a quadratic problem, comparison.csv/.txt into out_dir.
ExperimentOutcome run_experiment(const ExperimentSpec& spec, const std::string& out_dir);

// Comparison table for quadratic problems using the spec's configs.
std::string analyze_experiment(const ExperimentSpec& spec, std::string* csv = nullptr);

// Writes the generated problem data (logistic datasets or quadratic blocks) as JSON.
void generate_data(const ExperimentSpec& spec, const std::string& path);

// temp file + rename, so readers never see a truncated file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace ecado
