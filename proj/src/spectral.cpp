#include "ecado/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ecado/errors.hpp"

namespace ecado {

const char* method_name(Method m) {
    switch (m) {
        case Method::ecado: return "ecado";
        case Method::one_shot: return "one_shot";
        case Method::cgd: return "cgd";
        case Method::dane: return "dane";
        case Method::admm: return "admm";
    }
    return "?";
}

namespace {

void check_blocks(const std::vector<Matrix>& A) {
    if (A.empty()) throw DimensionError("spectral: no agent blocks");
    for (const auto& a : A) {
        require_square(a, "spectral");
        if (a.rows() != A.front().rows()) throw DimensionError("spectral: agent blocks differ in size");
    }
}

// Smallest eigenvalue of a matrix similar to a symmetric one (Z^-1 A, L^-1 R).
double min_real_eig(const Matrix& M) {
    Eigen::EigenSolver<Matrix> es(M, false);
    if (es.info() != Eigen::Success) throw NonConvergenceError("spectral: eigen-solve failed");
    return es.eigenvalues().real().minCoeff();
}

double max_abs_eig_sym(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

EcBlocks ec_blocks(const std::vector<Matrix>& A, const EcadoConfig& cfg, const std::vector<Matrix>& Rbar) {
    check_blocks(A);
    const std::size_t m = A.size();
    const Eigen::Index n = A.front().rows();
    if (Rbar.size() != m) throw DimensionError("ec_blocks: one Rbar per agent required");
    if (cfg.Zc.size() != n || cfg.Zi.size() != m) throw DimensionError("ec_blocks: config not resolved");
    const auto N = static_cast<Eigen::Index>(2 * m + 1) * n;
    const Eigen::Index c = static_cast<Eigen::Index>(2 * m) * n;
    EcBlocks b{Matrix::Zero(N, N), Matrix::Zero(N, N), Matrix::Zero(N, N)};
    const Matrix eye = Matrix::Identity(n, n);
    for (std::size_t i = 0; i < m; ++i) {
        const Eigen::Index xi = static_cast<Eigen::Index>(i) * n;
        const Eigen::Index ii = static_cast<Eigen::Index>(m + i) * n;
        const Matrix zinv = cfg.Zi[i].cwiseInverse().asDiagonal();
        b.D.block(xi, xi, n, n) = -zinv * A[i];
        b.D.block(ii, ii, n, n) = -Rbar[i] / cfg.L;
        b.L.block(ii, xi, n, n) = -eye / cfg.L;
        b.L.block(c, ii, n, n) = -Matrix(cfg.Zc.cwiseInverse().asDiagonal());
        b.U.block(xi, ii, n, n) = zinv;
        b.U.block(ii, c, n, n) = eye / cfg.L;
    }
    return b;
}

IterationMatrixReport build_G_ecado(const std::vector<Matrix>& A, const EcadoConfig& cfg,
                                    const std::vector<Matrix>& Rbar, double dt) {
    if (!(dt > 0)) throw ConfigError("build_G_ecado: dt must be positive");
    const EcBlocks b = ec_blocks(A, cfg, Rbar);
    const Eigen::Index N = b.D.rows();
    const Matrix I = Matrix::Identity(N, N);
    IterationMatrixReport rep;
    rep.method = Method::ecado;
    rep.G = lu_factor(I - dt * (b.D + b.L)).solve(Matrix(I + dt * b.U));
    rep.rho = spectral_radius(rep.G);

    const Eigen::Index n = A.front().rows();
    for (std::size_t i = 0; i < A.size(); ++i) {
        const Matrix zA = cfg.Zi[i].cwiseInverse().asDiagonal() * A[i];
        rep.rho1 = std::max(rep.rho1, 1.0 / (1.0 + dt * min_real_eig(zA)));
        const double r = min_real_eig(Rbar[i] / cfg.L);
        rep.rho2 = std::max(rep.rho2, 1.0 / (1.0 + r));
        rep.rho2_dt = std::max(rep.rho2_dt, 1.0 / (1.0 + dt * r));
    }
    rep.rho3 = dt / cfg.Zc.minCoeff();
    (void)n;
    rep.bound = std::max({rep.rho1, rep.rho2, rep.rho3});
    rep.diagonally_dominant = diagonal_dominance_report(I - dt * (b.D + b.L + b.U)).dominant;
    return rep;
}

IterationMatrixReport build_G_one_shot(const std::vector<Matrix>& A, const EcadoConfig& cfg, double dt,
                                       Integrator sub) {
    check_blocks(A);
    if (!(dt > 0)) throw ConfigError("build_G_one_shot: dt must be positive");
    const std::size_t m = A.size();
    const Eigen::Index n = A.front().rows();
    if (cfg.Zc.size() != n || cfg.Zi.size() != m) throw DimensionError("build_G_one_shot: config not resolved");
    const auto N = static_cast<Eigen::Index>(2 * m + 1) * n;
    const Eigen::Index c = static_cast<Eigen::Index>(2 * m) * n;

    // Per-agent linear sub-problem maps x+ = Px x + Pi I.
    std::vector<Matrix> Px(m), Pi(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Matrix Z = cfg.Zi[i].asDiagonal();
        if (sub == Integrator::backward_euler) {
            const LuFactors lu(Matrix(Z / dt + A[i]));
            Px[i] = lu.solve(Matrix(Z / dt));
            Pi[i] = lu.solve(Matrix(Matrix::Identity(n, n)));
        } else {
            const Matrix zinv = cfg.Zi[i].cwiseInverse().asDiagonal();
            Px[i] = Matrix::Identity(n, n) - dt * zinv * A[i];
            Pi[i] = dt * zinv;
        }
    }

    IterationMatrixReport rep;
    rep.method = Method::one_shot;
    rep.G.resize(N, N);
    for (Eigen::Index col = 0; col < N; ++col) {
        Vector z = Vector::Zero(N);
        z[col] = 1.0;
        Vector out = Vector::Zero(N);
        const Vector xc = z.segment(c, n);
        Vector flow = Vector::Zero(n);
        for (std::size_t i = 0; i < m; ++i) {
            const Eigen::Index xi = static_cast<Eigen::Index>(i) * n;
            const Eigen::Index ii = static_cast<Eigen::Index>(m + i) * n;
            const Vector x_new = Px[i] * z.segment(xi, n) + Pi[i] * z.segment(ii, n);
            const Vector I_new = z.segment(ii, n) + (dt / cfg.L) * (xc - x_new);
            out.segment(xi, n) = x_new;
            out.segment(ii, n) = I_new;
            flow += I_new;
        }
        out.segment(c, n) = xc - dt * (flow.array() / cfg.Zc.array()).matrix();
        rep.G.col(col) = out;
    }
    rep.rho = spectral_radius(rep.G);
    return rep;
}

IterationMatrixReport build_G_baseline(Method method, const std::vector<Matrix>& A, const BaselineConfig& cfg) {
    check_blocks(A);
    cfg.validate();
    const std::size_t m = A.size();
    const Eigen::Index n = A.front().rows();
    const Matrix eye = Matrix::Identity(n, n);
    const double md = static_cast<double>(m);
    IterationMatrixReport rep;
    rep.method = method;

    if (method == Method::cgd || method == Method::dane) {
        const auto N = static_cast<Eigen::Index>(m + 1) * n;
        const Eigen::Index c = static_cast<Eigen::Index>(m) * n;
        rep.G = Matrix::Zero(N, N);
        Matrix mean = Matrix::Zero(n, n);
        Matrix Abar = Matrix::Zero(n, n);
        for (const auto& Ai : A) Abar += Ai / md;
        for (std::size_t i = 0; i < m; ++i) {
            Matrix Ti;
            if (method == Method::cgd) {
                Ti = eye - cfg.alpha * A[i];
            } else {
                Matrix H = A[i];
                H.diagonal().array() += cfg.mu;
                Ti = eye - cfg.alpha * lu_factor(H).solve(Abar);
            }
            rep.G.block(static_cast<Eigen::Index>(i) * n, c, n, n) = Ti;
            mean += Ti / md;
        }
        rep.G.block(c, c, n, n) = mean;
        rep.rho = spectral_radius(rep.G);
        return rep;
    }
    if (method != Method::admm) throw ConfigError("build_G_baseline: method must be cgd, dane or admm");

    const double a = cfg.alpha, eta = cfg.admm_penalty;
    const bool printed = cfg.admm_dual == AdmmDual::printed;
    const double cpl = printed ? 1.0 : eta;
    const double keep = printed ? 1.0 / md : 1.0;
    const auto N = static_cast<Eigen::Index>(2 * m + 1) * n;
    const Eigen::Index c = static_cast<Eigen::Index>(m) * n;
    Matrix G1 = Matrix::Identity(N, N), G2 = Matrix::Zero(N, N);
    for (std::size_t i = 0; i < m; ++i) {
        const Eigen::Index xi = static_cast<Eigen::Index>(i) * n;
        const Eigen::Index li = static_cast<Eigen::Index>(m + 1 + i) * n;
        G2.block(xi, xi, n, n) = eye - a * (A[i] + eta * eye);
        G2.block(xi, c, n, n) = a * eta * eye;
        G2.block(xi, li, n, n) = -a * eye;
        G1.block(c, xi, n, n) = -eye / md;
        G2.block(c, li, n, n) = eye / (md * eta);
        G1.block(li, xi, n, n) = -cpl * eye;
        G1.block(li, c, n, n) = cpl * eye;
        G2.block(li, li, n, n) = keep * eye;
        rep.bound = std::max(rep.bound, max_abs_eig_sym(eye - a * (A[i] + eta * eye)));
    }
    rep.G = lu_factor(G1).solve(G2);
    rep.rho = spectral_radius(rep.G);
    return rep;
}

DominanceReport diagonal_dominance_report(const Matrix& M) {
    require_square(M, "diagonal_dominance_report");
    DominanceReport r;
    const Eigen::Index N = M.rows();
    r.margins.resize(static_cast<std::size_t>(N));
    r.dominant = true;
    for (Eigen::Index i = 0; i < N; ++i) {
        const double off = M.row(i).cwiseAbs().sum() - std::abs(M(i, i));
        r.margins[static_cast<std::size_t>(i)] = std::abs(M(i, i)) - off;
        if (!(r.margins[static_cast<std::size_t>(i)] > 0)) r.dominant = false;
    }
    const Matrix DL = M.triangularView<Eigen::Lower>();
    const Matrix U = M.triangularView<Eigen::StrictlyUpper>();
    try {
        const Matrix T = lu_factor(DL).solve(U);
        r.gs_norm = N == 0 ? 0.0 : T.cwiseAbs().rowwise().sum().maxCoeff();
    } catch (const SingularMatrixError&) {
        r.gs_norm = std::numeric_limits<double>::infinity();
    }
    return r;
}

std::string ComparisonTable::to_csv() const {
    std::string out = csv_header();
    out += '\n';
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.method.c_str(), r.rho, r.rho1,
                      r.rho2, r.rho2_dt, r.rho3, r.bound);
        out += buf;
    }
    return out;
}

std::string ComparisonTable::to_text() const {
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-10s %12s %10s %10s %10s %10s %10s\n", "method", "rho", "rho1", "rho2", "rho2_dt",
                  "rho3", "bound");
    out += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-10s %12.6g %10.4g %10.4g %10.4g %10.4g %10.4g\n", r.method.c_str(), r.rho,
                      r.rho1, r.rho2, r.rho2_dt, r.rho3, r.bound);
        out += buf;
    }
    out += std::string("ecado faster than one-shot: ") + (ec_faster_than_one_shot ? "yes" : "no") + "\n";
    return out;
}

ComparisonTable compare_methods(const std::vector<Matrix>& A, const EcadoConfig& cfg, const std::vector<Matrix>& Rbar,
                                double dt, const BaselineConfig& bcfg, Integrator one_shot_sub) {
    ComparisonTable t;
    const auto ec = build_G_ecado(A, cfg, Rbar, dt);
    const auto os = build_G_one_shot(A, cfg, dt, one_shot_sub);
    t.rows.push_back({"ecado", ec.rho, ec.rho1, ec.rho2, ec.rho2_dt, ec.rho3, ec.bound});
    t.rows.push_back({"one_shot", os.rho, 0, 0, 0, 0, 0});
    for (Method m : {Method::cgd, Method::dane, Method::admm}) {
        const auto r = build_G_baseline(m, A, bcfg);
        t.rows.push_back({method_name(m), r.rho, 0, 0, 0, 0, r.bound});
    }
    t.ec_faster_than_one_shot = ec.rho < os.rho;
    return t;
}

}  // namespace ecado
