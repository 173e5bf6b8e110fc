#include "ecado/subproblem.hpp"

#include <cmath>

#include "ecado/errors.hpp"

namespace ecado {

Vector backward_euler_substep(const SubObjective& f, const Matrix& Z, const Vector& x, const Vector& I, double h) {
    if (!f.has_hessian()) throw CapabilityError("backward-Euler sub-step needs a Hessian");
    Vector y = x;
    const double scale = 1.0 + inf_norm(I) + inf_norm(f.gradient(x));
    for (int it = 0; it < 60; ++it) {
        const Vector r = Z * (y - x) / h + f.gradient(y) - I;
        if (inf_norm(r) <= 1e-14 * scale) return y;
        const Matrix J = Z / h + f.hessian(y);
        const Vector step = lu_factor(J).solve(Vector(-r));
        y += step;
        if (inf_norm(step) <= 1e-15 * (1.0 + inf_norm(y))) return y;
    }
    throw NonConvergenceError("backward-Euler sub-step: Newton iteration did not converge");
}

SubproblemResult solve_subproblem(const SubObjective& f, const Vector& Zi, const Vector& x0, const Vector& I, double t1,
                                  double t2, double dt, ScalingMode mode, Integrator integrator) {
    if (!(dt > 0)) throw ConfigError("solve_subproblem: dt must be positive");
    if (!(t2 > t1)) throw ConfigError("solve_subproblem: empty window");
    if (x0.size() != f.dim() || I.size() != f.dim() || Zi.size() != f.dim())
        throw DimensionError("solve_subproblem: dimension mismatch");
    if (mode == ScalingMode::hessian && !f.has_hessian())
        throw CapabilityError("solve_subproblem: hessian scaling needs a Hessian");

    const double span = t2 - t1;
    auto n = static_cast<long>(std::ceil(span / dt - 1e-9));
    if (n < 1) n = 1;
    // Use dt exactly when it tiles the window, so split windows reproduce bitwise.
    const bool exact = std::abs(static_cast<double>(n) * dt - span) <= 1e-12 * span;

    SubproblemResult res;
    res.x_end = x0;
    Vector& x = res.x_end;
    for (long k = 0; k < n; ++k) {
        const double h = exact ? dt : std::min(dt, span - static_cast<double>(k) * dt);
        if (integrator == Integrator::forward_euler) {
            const Vector drive = I - f.gradient(x);
            if (mode == ScalingMode::identity) {
                x += h * (drive.array() / Zi.array()).matrix();
            } else {
                x += h * lu_factor(f.hessian(x)).solve(drive);
            }
        } else {
            const Matrix Z = mode == ScalingMode::identity ? Matrix(Zi.asDiagonal()) : f.hessian(x);
            x = backward_euler_substep(f, Z, x, I, h);
        }
        ++res.steps_taken;
        if (!x.allFinite() || inf_norm(x) > kDivergenceCap) {
            res.diverged = true;
            break;
        }
    }
    return res;
}

double subproblem_residual(const SubObjective& f, const Vector& x, const Vector& I) {
    return inf_norm(f.gradient(x) - I);
}

}  // namespace ecado
