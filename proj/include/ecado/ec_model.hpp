#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "ecado/numerics.hpp"
#include "ecado/objectives.hpp"

namespace ecado {

enum class ScalingMode { identity, hessian };
enum class Integrator { forward_euler, backward_euler };

struct SystemState {
    Vector xc;
    std::vector<Vector> x;  // per-agent states
    std::vector<Vector> I;  // per-agent flow variables
    double t = 0.0;

    // x_c = x_i = x0, I = 0.
    static SystemState flat(const Vector& x0, std::size_t m);

    std::size_t m() const { return x.size(); }
    Eigen::Index n() const { return xc.size(); }
    void validate() const;
    Vector flow_sum() const;  // fixed agent order
};

struct EcadoConfig {
    // Per-coordinate diagonals; when empty they are filled from the scalars.
    Vector Zc;
    std::vector<Vector> Zi;
    double zc_scalar = 1.0;
    double zi_scalar = 10.0;
    double L = 1.0;

    double dt_init = 1.0;
    double dt_min = 1e-6;
    double eta = 0.5;
    double delta = 1e-3;
    double outer_tol = 1e-8;
    double inner_tol = 1e-10;
    double window = 0.0;  // 0 means one accepted step per window
    int max_outer = 10000;
    int max_inner = 200;
    double beta = 0.0;  // > 0 sets L = beta * max eig(Rbar) at dt_init

    ScalingMode scaling = ScalingMode::identity;
    Integrator sub_integrator = Integrator::forward_euler;
    double sub_dt = 0.0;  // 0 means the central step
    bool adaptive = true;

    int hbar_samples = 8;
    std::uint64_t seed = 0;
    bool diagonal_sensitivity = false;

    int workers = 1;
    bool record_timing = false;

    // Copy with Zc/Zi sized for (n, m) and validated.
    EcadoConfig resolved(Eigen::Index n, std::size_t m) const;
    void validate(Eigen::Index n, std::size_t m) const;
};

struct Derivatives {
    Vector dxc;
    std::vector<Vector> dx;
    std::vector<Vector> dI;
    double max_abs() const;
};

// Right-hand side of the partitioned flow; cfg must already be resolved.
Derivatives ode_rhs(const SystemState& s, const SeparableProblem& p, const EcadoConfig& cfg);

struct Residuals {
    double stationarity = 0.0;  // ||sum grad f_i(x_c)||_inf
    double consensus = 0.0;     // max_i ||x_c - x_i||_inf
    double flow_balance = 0.0;  // ||sum I_i||_inf
};

Residuals steady_state_residual(const SystemState& s, const SeparableProblem& p);

// Explicit Euler march of ode_rhs up to t_end. Keeps every `stride`-th state
// plus the final one. Throws DivergenceError when a state norm passes 1e12.
std::vector<SystemState> reference_integrate(const SystemState& s0, const SeparableProblem& p, const EcadoConfig& cfg,
                                             double t_end, double dt_ref, std::size_t stride = 1);

nlohmann::json state_to_json(const SystemState& s);
SystemState state_from_json(const nlohmann::json& j);

inline constexpr double kDivergenceCap = 1e12;

}  // namespace ecado
