#pragma once

#include <cstdint>
#include <vector>

#include "ecado/ec_model.hpp"
#include "ecado/numerics.hpp"
#include "ecado/objectives.hpp"

namespace ecado {

struct SensitivityModel {
    std::vector<Matrix> Hbar;  // averaged Hessian per agent
    std::vector<Matrix> Rbar;  // (Z_i/dt + Hbar_i)^-1 per agent
    double dt_used = 0.0;
};

// (Z_i/dt + H)^-1. Throws SingularMatrixError when the sum is singular.
Matrix thevenin_resistance(const Vector& Zi, double dt, const Matrix& H);

// (1/p) sum_j hess f(x_j).
Matrix averaged_hessian(const SubObjective& f, const std::vector<Vector>& sample_points);

// p points drawn from N(center, I), deterministic in seed.
std::vector<Vector> sensitivity_samples(const Vector& center, int p, std::uint64_t seed);

// Hbar_i for every agent over a shared sample set. `diagonal_only` keeps diag(Hbar).
std::vector<Matrix> averaged_hessians(const SeparableProblem& problem, const std::vector<Vector>& samples,
                                      bool diagonal_only = false, int workers = 1);

// Rbar_i at step dt. In hessian scaling mode Hbar_i stands in for Z_i.
// Singular sums get a small ridge and a warning.
SensitivityModel build_sensitivity(const std::vector<Matrix>& Hbar, const std::vector<Vector>& Zi, double dt,
                                   ScalingMode mode = ScalingMode::identity);

// Column j: (x+(I + eps e_j) - x+(I)) / eps after one implicit Euler step of the sub-problem.
Matrix finite_diff_sensitivity(const SubObjective& f, const Vector& Zi, double dt, const Vector& x, const Vector& I,
                               double eps);

}  // namespace ecado
