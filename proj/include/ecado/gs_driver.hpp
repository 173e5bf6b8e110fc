#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ecado/ec_model.hpp"
#include "ecado/errors.hpp"
#include "ecado/objectives.hpp"

namespace ecado {

struct TraceRecord {
    double t = 0.0;
    double f = 0.0;
    double stat_res = 0.0;
    double cons_res = 0.0;
    int inner_iters = 0;
    double dt = 0.0;
    double wall_ms = 0.0;
};

struct ConvergenceTrace {
    std::vector<TraceRecord> records;

    static const char* csv_header() { return "t,f,stat_res,cons_res,inner_iters,dt,wall_ms"; }
    std::string to_csv() const;
    nlohmann::json to_json() const;
    int total_inner() const;
};

struct RunResult {
    SystemState state;
    ConvergenceTrace trace;
    int windows = 0;
    int total_inner = 0;
    double wall_ms = 0.0;  // whole run, measured even when records omit timing
};

// Thrown when max_outer windows pass without meeting outer_tol.
class MaxIterationsError : public Error {
public:
    MaxIterationsError(const std::string& what, RunResult partial) : Error(what), partial_(std::move(partial)) {}
    const RunResult& partial() const { return partial_; }

private:
    RunResult partial_;
};

// Plain Gauss-Seidel: fixed step, unweighted implicit consensus.
RunResult run_basic_gs(const SeparableProblem& problem, const EcadoConfig& cfg, const Vector& x0);
RunResult run_basic_gs(const SeparableProblem& problem, const EcadoConfig& cfg, const SystemState& start);

// Sensitivity-weighted consensus with adaptive step selection.
RunResult run_ecado(const SeparableProblem& problem, const EcadoConfig& cfg, const Vector& x0);
RunResult run_ecado(const SeparableProblem& problem, const EcadoConfig& cfg, const SystemState& start);

// L actually used by run_ecado (beta rule applied when beta > 0).
double ecado_effective_L(const SeparableProblem& problem, const EcadoConfig& resolved_cfg, const Vector& x0);

}  // namespace ecado
