#pragma once

// Independent reference computations for the unit and acceptance tests.
// Deliberately naive: no Eigen decompositions, only loops.

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "ecado/numerics.hpp"
#include "ecado/objectives.hpp"

namespace oracle {

using ecado::Matrix;
using ecado::Vector;

// Gaussian elimination with partial pivoting on copies of (A, b).
inline Vector gauss_solve(Matrix A, Vector b) {
    const Eigen::Index n = A.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index r = k + 1; r < n; ++r)
            if (std::abs(A(r, k)) > std::abs(A(piv, k))) piv = r;
        if (A(piv, k) == 0.0) throw std::runtime_error("gauss_solve: singular");
        if (piv != k) {
            A.row(k).swap(A.row(piv));
            std::swap(b[k], b[piv]);
        }
        for (Eigen::Index r = k + 1; r < n; ++r) {
            const double f = A(r, k) / A(k, k);
            for (Eigen::Index c = k; c < n; ++c) A(r, c) -= f * A(k, c);
            b[r] -= f * b[k];
        }
    }
    Vector x(n);
    for (Eigen::Index r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (Eigen::Index c = r + 1; c < n; ++c) s -= A(r, c) * x[c];
        x[r] = s / A(r, r);
    }
    return x;
}

// Characteristic polynomial coefficients c[0..n] (c[n] = 1) via Faddeev-LeVerrier.
inline std::vector<double> char_poly(const Matrix& A) {
    const Eigen::Index n = A.rows();
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[static_cast<std::size_t>(n)] = 1.0;
    Matrix Mk = Matrix::Zero(n, n);
    const Matrix I = Matrix::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        Mk = A * Mk + c[static_cast<std::size_t>(n - k + 1)] * I;
        c[static_cast<std::size_t>(n - k)] = -(A * Mk).trace() / static_cast<double>(k);
    }
    return c;
}

// All roots of a monic polynomial by Durand-Kerner iteration.
inline std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
    using C = std::complex<double>;
    const std::size_t n = c.size() - 1;
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[i]));
    radius += 1.0;
    std::vector<C> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = std::polar(radius, 0.4 + 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n));
    auto eval = [&](C x) {
        C acc = 1.0;
        for (std::size_t i = n; i-- > 0;) acc = acc * x + c[i];
        return acc;
    };
    for (int it = 0; it < 5000; ++it) {
        double move = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            C den = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            const C step = eval(z[i]) / den;
            z[i] -= step;
            move = std::max(move, std::abs(step));
        }
        if (move < 1e-15) break;
    }
    return z;
}

inline double spectral_radius(const Matrix& A) {
    double r = 0.0;
    for (const auto& z : poly_roots(char_poly(A))) r = std::max(r, std::abs(z));
    return r;
}

inline Matrix random_spd(Eigen::Index n, std::mt19937_64& rng, double shift = 0.5) {
    std::normal_distribution<double> N(0.0, 1.0);
    Matrix Q(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) Q(i, j) = N(rng);
    return Q.transpose() * Q / static_cast<double>(n) + shift * Matrix::Identity(n, n);
}

inline Vector random_vec(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> N(0.0, scale);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = N(rng);
    return v;
}

// x* of sum_i (1/2 x'A_i x + B_i'x) from the normal equations.
inline Vector quadratic_optimum(const std::vector<Matrix>& A, const std::vector<Vector>& B) {
    Matrix S = Matrix::Zero(A[0].rows(), A[0].cols());
    Vector r = Vector::Zero(B[0].size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        S += A[i];
        r -= B[i];
    }
    return gauss_solve(S, r);
}

// f = 0 everywhere; useful for equilibrium checks.
class ZeroObjective final : public ecado::SubObjective {
public:
    explicit ZeroObjective(int n) : n_(n) {}
    int dim() const override { return n_; }
    double value(const Vector&) const override { return 0.0; }
    Vector gradient(const Vector&) const override { return Vector::Zero(n_); }
    bool has_hessian() const override { return true; }
    Matrix hessian(const Vector&) const override { return Matrix::Zero(n_, n_); }

private:
    int n_;
};

inline ecado::SeparableProblem zero_problem(int n, std::size_t m) {
    std::vector<ecado::SubObjectivePtr> parts;
    for (std::size_t i = 0; i < m; ++i) parts.push_back(std::make_shared<ZeroObjective>(n));
    return ecado::SeparableProblem(std::move(parts));
}

// The running two-agent scalar example: A = (2, 4), B = (0, -4), optimum 2/3.
inline ecado::SeparableProblem two_agent_scalar() {
    std::vector<ecado::SubObjectivePtr> parts;
    parts.push_back(ecado::make_quadratic(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 0.0), 0.0));
    parts.push_back(ecado::make_quadratic(Matrix::Constant(1, 1, 4.0), Vector::Constant(1, -4.0), 0.0));
    return ecado::SeparableProblem(std::move(parts));
}

inline ecado::SeparableProblem scalar_problem(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<ecado::SubObjectivePtr> parts;
    for (std::size_t i = 0; i < a.size(); ++i)
        parts.push_back(ecado::make_quadratic(Matrix::Constant(1, 1, a[i]), Vector::Constant(1, b[i]), 0.0));
    return ecado::SeparableProblem(std::move(parts));
}

}  // namespace oracle
