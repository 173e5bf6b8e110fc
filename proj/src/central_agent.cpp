#include "ecado/central_agent.hpp"

#include <string>

#include "ecado/errors.hpp"

namespace ecado {

Matrix assemble_be_matrix(const EcadoConfig& cfg, const std::vector<Matrix>& Rbar, double dt) {
    if (!(dt > 0)) throw ConfigError("assemble_be_system: dt must be positive");
    const std::size_t m = Rbar.size();
    if (m == 0) throw DimensionError("assemble_be_system: no agents");
    const Eigen::Index n = Rbar.front().rows();
    if (cfg.Zc.size() != n) throw DimensionError("assemble_be_system: Z_c size mismatch");
    const auto N = static_cast<Eigen::Index>(m + 1) * n;
    const Eigen::Index c = static_cast<Eigen::Index>(m) * n;
    const double g = dt / cfg.L;
    Matrix M = Matrix::Zero(N, N);
    const Matrix eye = Matrix::Identity(n, n);
    const Matrix zc_inv = (dt * cfg.Zc.cwiseInverse()).asDiagonal();
    for (std::size_t i = 0; i < m; ++i) {
        if (Rbar[i].rows() != n || Rbar[i].cols() != n) throw DimensionError("assemble_be_system: Rbar size mismatch");
        const Eigen::Index r = static_cast<Eigen::Index>(i) * n;
        M.block(r, r, n, n) = eye + g * Rbar[i];
        M.block(r, c, n, n) = -g * eye;
        M.block(c, r, n, n) = zc_inv;
    }
    M.block(c, c, n, n) = eye;
    return M;
}

BeSystem assemble_be_system(const EcadoConfig& cfg, const std::vector<Matrix>& Rbar, double dt) {
    BeSystem s;
    s.M = assemble_be_matrix(cfg, Rbar, dt);
    s.lu = std::make_shared<const LuFactors>(s.M);
    s.Rbar = Rbar;
    s.dt = dt;
    s.L = cfg.L;
    s.m = Rbar.size();
    s.n = Rbar.front().rows();
    return s;
}

BeSystem assemble_be_system(const EcadoConfig& cfg, const SensitivityModel& sens, double dt) {
    return assemble_be_system(cfg, sens.Rbar, dt);
}

BeResult be_step(const BeSystem& sys, const SystemState& state, const std::vector<Vector>& x_new,
                 const std::vector<Vector>& I_prev) {
    const std::size_t m = sys.m;
    const Eigen::Index n = sys.n;
    if (state.m() != m || x_new.size() != m || I_prev.size() != m || state.n() != n)
        throw DimensionError("be_step: input sizes do not match the assembled system");
    const double g = sys.dt / sys.L;
    Vector rhs(static_cast<Eigen::Index>(m + 1) * n);
    for (std::size_t i = 0; i < m; ++i) {
        const Eigen::Index r = static_cast<Eigen::Index>(i) * n;
        rhs.segment(r, n) = state.I[i] + g * (sys.Rbar[i] * I_prev[i] - x_new[i]);
    }
    rhs.tail(n) = state.xc;
    const Vector sol = sys.lu->solve(rhs);
    BeResult out;
    out.xc = sol.tail(n);
    out.I.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.I[i] = sol.segment(static_cast<Eigen::Index>(i) * n, n);
    return out;
}

LteReport lte_estimates(const SystemState& prev, const SystemState& next, const EcadoConfig& cfg,
                        const std::vector<Matrix>& Rbar, const std::vector<Vector>& x_new,
                        const std::vector<Vector>& I_prev) {
    const double dt = next.t - prev.t;
    const std::size_t m = prev.m();
    if (next.m() != m || Rbar.size() != m || x_new.size() != m || I_prev.size() != m)
        throw DimensionError("lte_estimates: agent count mismatch");
    LteReport rep;
    rep.eps_cap = ((dt / 2.0) * (prev.flow_sum() - next.flow_sum()).array() / cfg.Zc.array()).matrix();
    rep.max_abs = inf_norm(rep.eps_cap);
    rep.eps_ind.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Vector g_prev = prev.xc - prev.x[i];
        const Vector g_next = next.xc - Rbar[i] * next.I[i] - x_new[i] + Rbar[i] * I_prev[i];
        rep.eps_ind[i] = (dt / (2.0 * cfg.L)) * (g_prev - g_next);
        rep.max_abs = std::max(rep.max_abs, inf_norm(rep.eps_ind[i]));
    }
    return rep;
}

bool gs_convergence_check(const std::vector<Vector>& h, double noise_floor) {
    if (h.size() < 3) return true;
    const std::size_t k = h.size() - 1;
    const double now = inf_norm(h[k] - h[k - 1]);
    const double before = inf_norm(h[k - 1] - h[k - 2]);
    return now <= std::max(before, noise_floor);
}

double select_time_step(const EcadoConfig& cfg, const std::function<StepCheck(double)>& attempt, double dt) {
    if (dt < cfg.dt_min) throw ConfigError("select_time_step: dt below dt_min");
    for (;;) {
        const StepCheck chk = attempt(dt);
        if (chk.gs_ok && chk.lte <= cfg.delta) return dt;
        if (dt <= cfg.dt_min) {
            std::string why = !chk.gs_ok ? "gauss-seidel criterion" : "";
            if (chk.lte > cfg.delta) why += std::string(why.empty() ? "" : " and ") + "lte " + std::to_string(chk.lte);
            throw FloorReachedError(why, dt);
        }
        dt = std::max(cfg.eta * dt, cfg.dt_min);
    }
}

BeCache::BeCache(EcadoConfig cfg, std::vector<Matrix> Hbar, bool weighted)
    : cfg_(std::move(cfg)), Hbar_(std::move(Hbar)), weighted_(weighted) {}

const BeSystem& BeCache::get(double dt) {
    auto it = systems_.find(dt);
    if (it != systems_.end()) return it->second;
    std::vector<Matrix> R;
    if (weighted_) {
        R = build_sensitivity(Hbar_, cfg_.Zi, dt, cfg_.scaling).Rbar;
    } else {
        for (const auto& H : Hbar_) R.push_back(Matrix::Zero(H.rows(), H.cols()));
    }
    return systems_.emplace(dt, assemble_be_system(cfg_, R, dt)).first->second;
}

}  // namespace ecado
