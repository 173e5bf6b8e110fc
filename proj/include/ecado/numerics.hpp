#pragma once

#include <Eigen/Dense>
#include <functional>

namespace ecado {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Relative pivot threshold below which a factorization is declared singular.
inline constexpr double kPivotTol = 1e-14;

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);
void require_finite(const Matrix& m, const char* what);
void require_square(const Matrix& m, const char* what);

double inf_norm(const Vector& v);

// Dense LU with partial pivoting. Immutable after construction.
class LuFactors {
public:
    explicit LuFactors(const Matrix& m);

    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& b) const;

    Eigen::Index dim() const { return n_; }
    const Matrix& packed() const { return lu_.matrixLU(); }
    Eigen::VectorXi permutation() const { return lu_.permutationP().indices(); }

private:
    Eigen::Index n_;
    Eigen::PartialPivLU<Matrix> lu_;
};

LuFactors lu_factor(const Matrix& m);

// max |lambda| over the eigenvalues of a square matrix.
double spectral_radius(const Matrix& m);

// Central differences with per-coordinate step h.
Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-5);

}  // namespace ecado
