#pragma once

#include <string>

#include "ecado/ec_model.hpp"
#include "ecado/gs_driver.hpp"
#include "ecado/objectives.hpp"

namespace ecado {

enum class AdmmDual {
    printed,   // lambda+ = lambda/m + (x_i - x_c)
    standard,  // lambda+ = lambda + rho (x_i - x_c)
};

struct BaselineConfig {
    double alpha = 1e-4;
    double mu = 0.0;            // DANE regularizer
    double admm_penalty = 1.0;  // ADMM augmented-Lagrangian weight
    AdmmDual admm_dual = AdmmDual::standard;
    int max_iters = 100000;
    double tol = 1e-8;          // on ||sum grad f_i(x_c)||_inf
    int workers = 1;
    int trace_stride = 1;       // keep every k-th iteration (the last is always kept)

    void validate() const;
};

struct AdmmState {
    std::vector<Vector> x;
    Vector xc;
    std::vector<Vector> lambda;
};

// Baseline runs share the gs_driver trace schema: t is the iteration index,
// dt the step size, inner_iters is 1. `converged` reports whether tol was met.
struct BaselineResult {
    Vector xc;
    ConvergenceTrace trace;
    int iterations = 0;
    bool converged = false;
    double wall_ms = 0.0;
    std::string note;  // e.g. which ADMM dual update was active
};

BaselineResult cgd_run(const SeparableProblem& p, const BaselineConfig& cfg, const Vector& x0);
BaselineResult dane_run(const SeparableProblem& p, const BaselineConfig& cfg, const Vector& x0);
BaselineResult admm_run(const SeparableProblem& p, const BaselineConfig& cfg, const Vector& x0);
BaselineResult admm_run(const SeparableProblem& p, const BaselineConfig& cfg, AdmmState start);

struct OneShotConfig {
    EcadoConfig ec;  // Z_c, Z_i, L, dt_init are read; dt_init is the fixed step
    Integrator sub_integrator = Integrator::backward_euler;
    int max_iters = 100000;
    double tol = 1e-8;
    int trace_stride = 1;
};

// Explicit consensus sweep: sub-problem step with the old flows, explicit flow
// update from the old x_c, then x_c from the new flows. With Z_c = m and
// dt = L = 1 the x_c update is a plain average of the agent contributions.
BaselineResult one_shot_average_run(const SeparableProblem& p, const OneShotConfig& cfg, const Vector& x0);
BaselineResult one_shot_average_run(const SeparableProblem& p, const OneShotConfig& cfg, const SystemState& start);

// Per-iteration contraction estimated as the geometric mean of successive
// error ratios over the last `window` entries of `errors`.
double asymptotic_contraction(const std::vector<double>& errors, std::size_t window = 30);

}  // namespace ecado
