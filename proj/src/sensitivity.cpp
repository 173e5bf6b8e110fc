#include "ecado/sensitivity.hpp"

#include <random>
#include <string>

#include "ecado/errors.hpp"
#include "ecado/log.hpp"
#include "ecado/parallel.hpp"
#include "ecado/subproblem.hpp"

namespace ecado {

Matrix thevenin_resistance(const Vector& Zi, double dt, const Matrix& H) {
    if (!(dt > 0)) throw ConfigError("thevenin_resistance: dt must be positive");
    require_square(H, "thevenin_resistance");
    if (H.rows() != Zi.size()) throw DimensionError("thevenin_resistance: Z and H sizes differ");
    Matrix S = H;
    S.diagonal() += Zi / dt;
    return lu_factor(S).solve(Matrix(Matrix::Identity(S.rows(), S.cols())));
}

Matrix averaged_hessian(const SubObjective& f, const std::vector<Vector>& pts) {
    if (pts.empty()) throw ConfigError("averaged_hessian: need at least one sample point");
    if (!f.has_hessian()) throw CapabilityError("averaged_hessian: sub-objective has no Hessian");
    Matrix acc = Matrix::Zero(f.dim(), f.dim());
    for (const auto& x : pts) acc += f.hessian(x);
    return acc / static_cast<double>(pts.size());
}

std::vector<Vector> sensitivity_samples(const Vector& center, int p, std::uint64_t seed) {
    if (p < 1) throw ConfigError("sensitivity_samples: p must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> pts(p, center);
    for (auto& v : pts)
        for (Eigen::Index k = 0; k < v.size(); ++k) v[k] += normal(rng);
    return pts;
}

std::vector<Matrix> averaged_hessians(const SeparableProblem& problem, const std::vector<Vector>& samples,
                                      bool diagonal_only, int workers) {
    std::vector<Matrix> out(problem.m());
    parallel_for(workers, problem.m(), [&](std::size_t i) {
        Matrix H = averaged_hessian(problem[i], samples);
        out[i] = diagonal_only ? Matrix(H.diagonal().asDiagonal()) : H;
    });
    return out;
}

SensitivityModel build_sensitivity(const std::vector<Matrix>& Hbar, const std::vector<Vector>& Zi, double dt,
                                   ScalingMode mode) {
    if (Hbar.size() != Zi.size()) throw DimensionError("build_sensitivity: Hbar and Z_i counts differ");
    SensitivityModel sm;
    sm.Hbar = Hbar;
    sm.dt_used = dt;
    sm.Rbar.reserve(Hbar.size());
    for (std::size_t i = 0; i < Hbar.size(); ++i) {
        Matrix S = Hbar[i];
        if (mode == ScalingMode::hessian) {
            S += Hbar[i] / dt;
        } else {
            S.diagonal() += Zi[i] / dt;
        }
        Matrix R;
        try {
            R = lu_factor(S).solve(Matrix(Matrix::Identity(S.rows(), S.cols())));
        } catch (const SingularMatrixError&) {
            const double ridge = 1e-8 * std::max(std::abs(S.trace()) / static_cast<double>(S.rows()), 1.0);
            log::warn("sensitivity: singular Z/dt + Hbar for agent " + std::to_string(i) + ", adding ridge");
            S.diagonal().array() += ridge;
            R = lu_factor(S).solve(Matrix(Matrix::Identity(S.rows(), S.cols())));
        }
        sm.Rbar.push_back(0.5 * (R + R.transpose()));
    }
    return sm;
}

Matrix finite_diff_sensitivity(const SubObjective& f, const Vector& Zi, double dt, const Vector& x, const Vector& I,
                               double eps) {
    if (!(eps > 0)) throw ConfigError("finite_diff_sensitivity: eps must be positive");
    const Matrix Z = Zi.asDiagonal();
    const Vector base = backward_euler_substep(f, Z, x, I, dt);
    Matrix R(f.dim(), f.dim());
    for (int j = 0; j < f.dim(); ++j) {
        Vector Ip = I;
        Ip[j] += eps;
        R.col(j) = (backward_euler_substep(f, Z, x, Ip, dt) - base) / eps;
    }
    return R;
}

}  // namespace ecado
