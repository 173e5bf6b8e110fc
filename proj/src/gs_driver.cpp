#include "ecado/gs_driver.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "ecado/central_agent.hpp"
#include "ecado/log.hpp"
#include "ecado/parallel.hpp"
#include "ecado/sensitivity.hpp"
#include "ecado/subproblem.hpp"

namespace ecado {

std::string ConvergenceTrace::to_csv() const {
    std::string out = csv_header();
    out += '\n';
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.6f\n", r.t, r.f, r.stat_res, r.cons_res,
                      r.inner_iters, r.dt, r.wall_ms);
        out += buf;
    }
    return out;
}

nlohmann::json ConvergenceTrace::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : records)
        rows.push_back({{"t", r.t},
                        {"f", r.f},
                        {"stat_res", r.stat_res},
                        {"cons_res", r.cons_res},
                        {"inner_iters", r.inner_iters},
                        {"dt", r.dt},
                        {"wall_ms", r.wall_ms}});
    return {{"records", rows}};
}

int ConvergenceTrace::total_inner() const {
    int s = 0;
    for (const auto& r : records) s += r.inner_iters;
    return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct WindowOutcome {
    SystemState next;
    int inner = 0;
    bool gs_ok = true;
    bool converged = false;
    double lte = 0.0;
    double last_change = 0.0;
};

// One time window of K central steps, relaxed by Gauss-Seidel sweeps until x_c settles.
class WindowSolver {
public:
    WindowSolver(const SeparableProblem& p, const EcadoConfig& cfg, BeCache& cache, bool check_gs)
        : p_(p), cfg_(cfg), cache_(cache), check_gs_(check_gs) {}

    WindowOutcome attempt(const SystemState& start, double dt, bool want_lte) {
        const BeSystem& sys = cache_.get(dt);
        const std::size_t m = p_.m();
        const std::size_t K =
            cfg_.window > 0 ? static_cast<std::size_t>(std::max(1.0, std::ceil(cfg_.window / dt - 1e-9))) : 1;
        const double sub_h = cfg_.sub_dt > 0 ? std::min(cfg_.sub_dt, dt) : dt;

        std::vector<std::vector<Vector>> Iw(K, start.I), Iw_prev;
        std::vector<Vector> xcw(K, start.xc);
        std::vector<std::vector<Vector>> xw(K, std::vector<Vector>(m));
        std::vector<Vector> hist{start.flow_sum()};

        WindowOutcome out;
        for (int it = 1; it <= cfg_.max_inner; ++it) {
            parallel_for(cfg_.workers, m, [&](std::size_t i) {
                Vector x = start.x[i];
                for (std::size_t k = 0; k < K; ++k) {
                    const double t1 = start.t + static_cast<double>(k) * dt;
                    auto r = solve_subproblem(p_[i], cfg_.Zi[i], x, Iw[k][i], t1, t1 + dt, sub_h, cfg_.scaling,
                                              cfg_.sub_integrator);
                    if (r.diverged) throw DivergenceError("sub-problem " + std::to_string(i) + " diverged");
                    x = std::move(r.x_end);
                    xw[k][i] = x;
                }
            });

            SystemState s = start;
            double change = 0.0;
            Iw_prev = Iw;
            for (std::size_t k = 0; k < K; ++k) {
                BeResult r = be_step(sys, s, xw[k], Iw_prev[k]);
                change = std::max(change, inf_norm(r.xc - xcw[k]));
                s.xc = r.xc;
                s.I = r.I;
                xcw[k] = std::move(r.xc);
                Iw[k] = std::move(r.I);
            }
            Vector sum = Vector::Zero(start.n());
            for (const auto& v : Iw[K - 1]) sum += v;
            hist.push_back(std::move(sum));
            out.inner = it;
            out.last_change = change;
            if (check_gs_ && !gs_convergence_check(hist, cfg_.inner_tol)) {
                out.gs_ok = false;
                break;
            }
            if (change <= cfg_.inner_tol) {
                out.converged = true;
                break;
            }
        }

        out.next.t = start.t + static_cast<double>(K) * dt;
        out.next.xc = xcw[K - 1];
        out.next.I = Iw[K - 1];
        out.next.x = xw[K - 1];
        if (want_lte && out.gs_ok) {
            SystemState prev = start;
            for (std::size_t k = 0; k < K; ++k) {
                SystemState nxt;
                nxt.t = start.t + static_cast<double>(k + 1) * dt;
                nxt.xc = xcw[k];
                nxt.I = Iw[k];
                nxt.x = xw[k];
                prev.t = nxt.t - dt;
                out.lte = std::max(out.lte, lte_estimates(prev, nxt, cfg_, sys.Rbar, xw[k], Iw_prev[k]).max_abs);
                prev = std::move(nxt);
            }
        }
        return out;
    }

private:
    const SeparableProblem& p_;
    const EcadoConfig& cfg_;
    BeCache& cache_;
    bool check_gs_;
};

// Outer stop: the flow is at rest and the consensus point is stationary.
bool outer_converged(const SeparableProblem& p, const SystemState& s, const EcadoConfig& cfg) {
    if (ode_rhs(s, p, cfg).max_abs() > cfg.outer_tol) return false;
    return inf_norm(p.gradient(s.xc)) <= cfg.outer_tol;
}

TraceRecord make_record(const SeparableProblem& p, const SystemState& s, int inner, double dt, double wall_ms) {
    const Residuals r = steady_state_residual(s, p);
    return TraceRecord{s.t, p.value(s.xc), r.stationarity, r.consensus, inner, dt, wall_ms};
}

void check_start(const SeparableProblem& p, const SystemState& s) {
    s.validate();
    if (s.m() != p.m() || s.n() != p.n()) throw DimensionError("start state does not match problem");
}

std::vector<Matrix> zero_blocks(const SeparableProblem& p) {
    return std::vector<Matrix>(p.m(), Matrix::Zero(p.n(), p.n()));
}

double beta_rule_L(const std::vector<Matrix>& Hbar, const EcadoConfig& cfg) {
    const SensitivityModel sm = build_sensitivity(Hbar, cfg.Zi, cfg.dt_init, cfg.scaling);
    double lam = 0.0;
    for (const auto& R : sm.Rbar) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(R, Eigen::EigenvaluesOnly);
        lam = std::max(lam, es.eigenvalues().maxCoeff());
    }
    if (!(lam > 0)) throw ConfigError("beta rule: sensitivity has no positive eigenvalue");
    return cfg.beta * lam;
}

std::vector<Matrix> precompute_hbar(const SeparableProblem& p, const EcadoConfig& cfg, const Vector& center) {
    if (!p.has_hessian()) throw CapabilityError("run_ecado: every sub-objective needs a Hessian");
    return averaged_hessians(p, sensitivity_samples(center, cfg.hbar_samples, cfg.seed), cfg.diagonal_sensitivity,
                             cfg.workers);
}

RunResult drive(const SeparableProblem& p, const EcadoConfig& cfg_in, const SystemState& start, bool weighted) {
    const auto t_run = Clock::now();
    EcadoConfig cfg = cfg_in.resolved(p.n(), p.m());
    check_start(p, start);

    std::vector<Matrix> Hbar = weighted ? precompute_hbar(p, cfg, start.xc) : zero_blocks(p);
    if (weighted && cfg.beta > 0) cfg.L = beta_rule_L(Hbar, cfg);
    BeCache cache(cfg, Hbar, weighted);
    const bool adaptive = weighted && cfg.adaptive;
    WindowSolver solver(p, cfg, cache, adaptive);

    RunResult res;
    res.state = start;
    auto finish = [&] {
        res.total_inner = res.trace.total_inner();
        res.wall_ms = ms_since(t_run);
    };
    if (outer_converged(p, res.state, cfg)) {
        finish();
        return res;
    }
    int work = 0;
    for (int w = 0; w < cfg.max_outer; ++w) {
        const auto t_win = Clock::now();
        WindowOutcome acc;
        double dt = cfg.dt_init;
        if (adaptive) {
            dt = select_time_step(
                cfg,
                [&](double h) {
                    acc = solver.attempt(res.state, h, true);
                    work += acc.inner;
                    return StepCheck{acc.gs_ok && acc.converged, acc.lte};
                },
                cfg.dt_init);
        } else {
            acc = solver.attempt(res.state, dt, false);
            work += acc.inner;
            if (!acc.converged)
                log::warn("window " + std::to_string(w) + ": inner loop hit max_inner=" + std::to_string(cfg.max_inner) +
                          ", last x_c change " + std::to_string(acc.last_change));
        }
        res.state = std::move(acc.next);
        ++res.windows;
        res.trace.records.push_back(
            make_record(p, res.state, acc.inner, dt, cfg.record_timing ? ms_since(t_win) : 0.0));
        if (!res.state.xc.allFinite() || inf_norm(res.state.xc) > kDivergenceCap)
            throw DivergenceError("consensus state diverged at window " + std::to_string(w));
        if (outer_converged(p, res.state, cfg)) {
            finish();
            res.total_inner = work;
            return res;
        }
    }
    finish();
    res.total_inner = work;
    throw MaxIterationsError("outer loop hit max_outer=" + std::to_string(cfg.max_outer), res);
}

}  // namespace

RunResult run_basic_gs(const SeparableProblem& problem, const EcadoConfig& cfg, const Vector& x0) {
    return drive(problem, cfg, SystemState::flat(x0, problem.m()), false);
}

RunResult run_basic_gs(const SeparableProblem& problem, const EcadoConfig& cfg, const SystemState& start) {
    return drive(problem, cfg, start, false);
}

RunResult run_ecado(const SeparableProblem& problem, const EcadoConfig& cfg, const Vector& x0) {
    return drive(problem, cfg, SystemState::flat(x0, problem.m()), true);
}

RunResult run_ecado(const SeparableProblem& problem, const EcadoConfig& cfg, const SystemState& start) {
    return drive(problem, cfg, start, true);
}

double ecado_effective_L(const SeparableProblem& problem, const EcadoConfig& resolved_cfg, const Vector& x0) {
    if (!(resolved_cfg.beta > 0)) return resolved_cfg.L;
    return beta_rule_L(precompute_hbar(problem, resolved_cfg, x0), resolved_cfg);
}

}  // namespace ecado
