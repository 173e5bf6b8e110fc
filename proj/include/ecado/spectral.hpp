#pragma once

#include <string>
#include <vector>

#include "ecado/baselines.hpp"
#include "ecado/ec_model.hpp"
#include "ecado/numerics.hpp"

namespace ecado {

enum class Method { ecado, one_shot, cgd, dane, admm };

const char* method_name(Method m);

struct IterationMatrixReport {
    Method method = Method::ecado;
    Matrix G;
    double rho = 0.0;
    // ecado only
    double rho1 = 0.0;
    double rho2 = 0.0;     // 1/(1 + eig(L^-1 Rbar))
    double rho2_dt = 0.0;  // 1/(1 + dt eig(L^-1 Rbar))
    double rho3 = 0.0;
    double bound = 0.0;  // max(rho1, rho2, rho3) for ecado; printed bound for admm
    bool diagonally_dominant = false;
};

// State ordering for the EC matrices: [x_1..x_m, I_1..I_m, x_c], each block n wide.
struct EcBlocks {
    Matrix D, L, U;
};

// Block D/L/U split of the linearized flow on quadratic blocks A_i. cfg must be resolved.
EcBlocks ec_blocks(const std::vector<Matrix>& A, const EcadoConfig& cfg, const std::vector<Matrix>& Rbar);

// G_ec = (I - dt(D+L))^-1 (I + dt U) plus the rho1..rho3 components.
IterationMatrixReport build_G_ecado(const std::vector<Matrix>& A, const EcadoConfig& cfg,
                                    const std::vector<Matrix>& Rbar, double dt);

// Iteration matrix of one explicit-consensus sweep (see one_shot_average_run),
// obtained by pushing basis vectors through the homogeneous update.
IterationMatrixReport build_G_one_shot(const std::vector<Matrix>& A, const EcadoConfig& cfg, double dt,
                                       Integrator sub = Integrator::backward_euler);

// CGD/DANE: state [x_1..x_m, x_c]. ADMM: G_1^-1 G_2 over [x_1..x_m, x_c, lambda_1..lambda_m].
IterationMatrixReport build_G_baseline(Method method, const std::vector<Matrix>& A, const BaselineConfig& cfg);

struct DominanceReport {
    std::vector<double> margins;
    bool dominant = false;
    double gs_norm = 0.0;  // ||(D+L)^-1 U||_inf, +inf if D+L is singular
};

DominanceReport diagonal_dominance_report(const Matrix& M);

struct ComparisonRow {
    std::string method;
    double rho = 0.0;
    double rho1 = 0.0, rho2 = 0.0, rho2_dt = 0.0, rho3 = 0.0, bound = 0.0;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    bool ec_faster_than_one_shot = false;

    static const char* csv_header() { return "method,rho,rho1,rho2,rho2_dt,rho3,bound"; }
    std::string to_csv() const;
    std::string to_text() const;
};

ComparisonTable compare_methods(const std::vector<Matrix>& A, const EcadoConfig& cfg, const std::vector<Matrix>& Rbar,
                                double dt, const BaselineConfig& bcfg, Integrator one_shot_sub = Integrator::backward_euler);

}  // namespace ecado
