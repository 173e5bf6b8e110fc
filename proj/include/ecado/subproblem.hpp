#pragma once

#include "ecado/ec_model.hpp"
#include "ecado/numerics.hpp"
#include "ecado/objectives.hpp"

namespace ecado {

struct SubproblemResult {
    Vector x_end;
    int steps_taken = 0;
    bool diverged = false;
};

// Integrates Z_i x' = I - grad f_i(x) over [t1, t2] with I held constant.
// In hessian mode Z_i is replaced by the Hessian at the start of each step.
SubproblemResult solve_subproblem(const SubObjective& f, const Vector& Zi, const Vector& x0, const Vector& I, double t1,
                                  double t2, double dt, ScalingMode mode = ScalingMode::identity,
                                  Integrator integrator = Integrator::forward_euler);

// One implicit step: solves Z (y - x)/h + grad f(y) = I by Newton's method.
Vector backward_euler_substep(const SubObjective& f, const Matrix& Z, const Vector& x, const Vector& I, double h);

double subproblem_residual(const SubObjective& f, const Vector& x, const Vector& I);

}  // namespace ecado
