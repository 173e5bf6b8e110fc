#include "ecado/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "ecado/errors.hpp"

namespace ecado {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw Error(std::string(what) + ": non-finite entry");
}

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw DimensionError(std::string(what) + ": expected square matrix, got " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()));
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

LuFactors::LuFactors(const Matrix& m) : n_(m.rows()) {
    require_square(m, "lu_factor");
    require_finite(m, "lu_factor");
    if (n_ == 0) return;
    lu_.compute(m);
    const double scale = m.cwiseAbs().maxCoeff();
    const double tol = kPivotTol * scale;
    const Matrix& packed = lu_.matrixLU();
    for (Eigen::Index i = 0; i < n_; ++i) {
        if (!(std::abs(packed(i, i)) > tol) || scale == 0.0)
            throw SingularMatrixError("lu_factor: pivot " + std::to_string(i) + " below tolerance");
    }
}

Vector LuFactors::solve(const Vector& b) const {
    if (b.size() != n_) throw DimensionError("LuFactors::solve: rhs size mismatch");
    if (n_ == 0) return b;
    return lu_.solve(b);
}

Matrix LuFactors::solve(const Matrix& b) const {
    if (b.rows() != n_) throw DimensionError("LuFactors::solve: rhs rows mismatch");
    if (n_ == 0) return b;
    return lu_.solve(b);
}

LuFactors lu_factor(const Matrix& m) { return LuFactors(m); }

double spectral_radius(const Matrix& m) {
    require_square(m, "spectral_radius");
    require_finite(m, "spectral_radius");
    if (m.rows() == 0) return 0.0;
    // Hessenberg reduction + shifted QR; budget is Eigen's default per eigenvalue.
    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NonConvergenceError("spectral_radius: QR iteration did not converge");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
    if (!(h > 0)) throw Error("finite_diff_grad: h must be positive");
    Vector g(x.size());
    Vector xp = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double xj = x[j];
        xp[j] = xj + h;
        const double fp = f(xp);
        xp[j] = xj - h;
        const double fm = f(xp);
        xp[j] = xj;
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace ecado
