#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "ecado/ec_model.hpp"
#include "ecado/numerics.hpp"
#include "ecado/sensitivity.hpp"

namespace ecado {

// Implicit-Euler consensus system over the unknowns [I_1; ...; I_m; x_c].
// Flow block i occupies rows [i*n, (i+1)*n); x_c occupies the last n rows.
struct BeSystem {
    Matrix M;
    std::shared_ptr<const LuFactors> lu;
    std::vector<Matrix> Rbar;
    double dt = 0.0;
    double L = 1.0;
    std::size_t m = 0;
    Eigen::Index n = 0;
};

Matrix assemble_be_matrix(const EcadoConfig& cfg, const std::vector<Matrix>& Rbar, double dt);
BeSystem assemble_be_system(const EcadoConfig& cfg, const std::vector<Matrix>& Rbar, double dt);
BeSystem assemble_be_system(const EcadoConfig& cfg, const SensitivityModel& sens, double dt);

struct BeResult {
    Vector xc;
    std::vector<Vector> I;
};

// One forward/backward substitution. `x_new` are the fresh sub-problem states,
// `I_prev` the previous inner iterate of the flows at the step being solved.
BeResult be_step(const BeSystem& sys, const SystemState& state, const std::vector<Vector>& x_new,
                 const std::vector<Vector>& I_prev);

struct LteReport {
    Vector eps_cap;
    std::vector<Vector> eps_ind;
    double max_abs = 0.0;
};

// Step length is next.t - prev.t. next.x is not read; x_new carries the agent states.
LteReport lte_estimates(const SystemState& prev, const SystemState& next, const EcadoConfig& cfg,
                        const std::vector<Matrix>& Rbar, const std::vector<Vector>& x_new,
                        const std::vector<Vector>& I_prev);

// Compares the last three flow sums. Fewer than three entries pass. Differences
// at or below `noise_floor` are treated as settled.
bool gs_convergence_check(const std::vector<Vector>& sum_history, double noise_floor = 0.0);

struct StepCheck {
    bool gs_ok = true;
    double lte = 0.0;
};

// Backtracks dt <- max(eta*dt, dt_min) until attempt(dt) passes both checks.
// Throws FloorReachedError naming the failing condition if dt_min still fails.
double select_time_step(const EcadoConfig& cfg, const std::function<StepCheck(double)>& attempt, double dt);

// Memoized sensitivity + factorization per step size.
class BeCache {
public:
    BeCache(EcadoConfig cfg, std::vector<Matrix> Hbar, bool weighted);
    const BeSystem& get(double dt);
    std::size_t size() const { return systems_.size(); }

private:
    EcadoConfig cfg_;
    std::vector<Matrix> Hbar_;
    bool weighted_;
    std::map<double, BeSystem> systems_;
};

}  // namespace ecado
