#include "ecado/baselines.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "ecado/errors.hpp"
#include "ecado/parallel.hpp"
#include "ecado/subproblem.hpp"

namespace ecado {

void BaselineConfig::validate() const {
    if (!(alpha > 0)) throw ConfigError("baseline: alpha must be positive");
    if (!(mu >= 0)) throw ConfigError("baseline: mu must be >= 0");
    if (!(admm_penalty > 0)) throw ConfigError("baseline: admm_penalty must be positive");
    if (max_iters < 1) throw ConfigError("baseline: max_iters must be >= 1");
    if (!(tol > 0)) throw ConfigError("baseline: tol must be positive");
    if (workers < 1 || trace_stride < 1) throw ConfigError("baseline: workers and trace_stride must be >= 1");
}

namespace {

using Clock = std::chrono::steady_clock;

void guard(const Vector& xc, int k, const char* who) {
    if (!xc.allFinite() || inf_norm(xc) > kDivergenceCap)
        throw DivergenceError(std::string(who) + ": iterate exceeded divergence cap at iteration " + std::to_string(k));
}

double consensus_of(const std::vector<Vector>& x, const Vector& xc) {
    double c = 0.0;
    for (const auto& v : x) c = std::max(c, inf_norm(xc - v));
    return c;
}

class Recorder {
public:
    Recorder(BaselineResult& res, const SeparableProblem& p, int stride, double step)
        : res(res), p(p), stride(stride), step(step) {}

    void add(int k, const Vector& xc, double stat, double cons) {
        TraceRecord r{static_cast<double>(k), p.value(xc), stat, cons, 1, step, 0.0};
        if (k % stride == 0) {
            res.trace.records.push_back(r);
            has_pending = false;
        } else {
            pending = r;
            has_pending = true;
        }
    }
    void flush() {
        if (has_pending) res.trace.records.push_back(pending);
        has_pending = false;
    }

private:
    BaselineResult& res;
    const SeparableProblem& p;
    int stride;
    double step;
    TraceRecord pending;
    bool has_pending = false;
};

// Shared loop for CGD/DANE: x_i = x_c - direction_i(x_c), x_c = mean(x_i).
template <class Direction>
BaselineResult consensus_descent(const SeparableProblem& p, const BaselineConfig& cfg, const Vector& x0,
                                 const char* who, Direction dir) {
    cfg.validate();
    if (x0.size() != p.n()) throw DimensionError(std::string(who) + ": x0 has wrong size");
    const auto t0 = Clock::now();
    const std::size_t m = p.m();
    BaselineResult res;
    Recorder rec{res, p, cfg.trace_stride, cfg.alpha};
    Vector xc = x0;
    std::vector<Vector> g(m), x(m);
    auto grads = [&] { parallel_for(cfg.workers, m, [&](std::size_t i) { g[i] = p[i].gradient(xc); }); };
    grads();
    for (int k = 0;; ++k) {
        Vector sum = Vector::Zero(p.n());
        for (const auto& v : g) sum += v;
        const double stat = inf_norm(sum);
        if (k > 0) rec.add(k, xc, stat, consensus_of(x, xc));
        if (stat <= cfg.tol) {
            res.converged = true;
            break;
        }
        if (k == cfg.max_iters) break;
        const Vector gbar = sum / static_cast<double>(m);
        parallel_for(cfg.workers, m, [&](std::size_t i) { x[i] = xc - dir(i, xc, g[i], gbar); });
        Vector next = Vector::Zero(p.n());
        for (const auto& v : x) next += v;
        xc = next / static_cast<double>(m);
        res.iterations = k + 1;
        guard(xc, k + 1, who);
        grads();
    }
    rec.flush();
    res.xc = xc;
    res.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return res;
}

}  // namespace

BaselineResult cgd_run(const SeparableProblem& p, const BaselineConfig& cfg, const Vector& x0) {
    return consensus_descent(p, cfg, x0, "cgd",
                             [&](std::size_t, const Vector&, const Vector& g, const Vector&) -> Vector { return cfg.alpha * g; });
}

BaselineResult dane_run(const SeparableProblem& p, const BaselineConfig& cfg, const Vector& x0) {
    if (!p.has_hessian()) throw CapabilityError("dane: every sub-objective needs a Hessian");
    // Local curvature preconditions the global (mean) gradient, so the fixed point is stationary.
    return consensus_descent(p, cfg, x0, "dane",
                             [&](std::size_t i, const Vector& xc, const Vector&, const Vector& gbar) -> Vector {
        Matrix H = p[i].hessian(xc);
        H.diagonal().array() += cfg.mu;
        return cfg.alpha * lu_factor(H).solve(gbar);
    });
}

BaselineResult admm_run(const SeparableProblem& p, const BaselineConfig& cfg, const Vector& x0) {
    AdmmState s;
    s.xc = x0;
    s.x.assign(p.m(), x0);
    s.lambda.assign(p.m(), Vector::Zero(x0.size()));
    return admm_run(p, cfg, std::move(s));
}

BaselineResult admm_run(const SeparableProblem& p, const BaselineConfig& cfg, AdmmState s) {
    cfg.validate();
    const std::size_t m = p.m();
    if (s.xc.size() != p.n() || s.x.size() != m || s.lambda.size() != m) throw DimensionError("admm: bad start state");
    const auto t0 = Clock::now();
    const double a = cfg.alpha, eta = cfg.admm_penalty;
    BaselineResult res;
    res.note = cfg.admm_dual == AdmmDual::printed ? "dual=printed" : "dual=standard";
    Recorder rec{res, p, cfg.trace_stride, a};
    double stat = inf_norm(p.gradient(s.xc));
    if (stat <= cfg.tol) res.converged = true;
    for (int k = 1; k <= cfg.max_iters && !res.converged; ++k) {
        parallel_for(cfg.workers, m, [&](std::size_t i) {
            s.x[i] -= a * (p[i].gradient(s.x[i]) + s.lambda[i] + eta * (s.x[i] - s.xc));
        });
        Vector acc = Vector::Zero(p.n());
        for (std::size_t i = 0; i < m; ++i) acc += s.x[i] + s.lambda[i] / eta;
        s.xc = acc / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            if (cfg.admm_dual == AdmmDual::printed)
                s.lambda[i] = s.lambda[i] / static_cast<double>(m) + (s.x[i] - s.xc);
            else
                s.lambda[i] += eta * (s.x[i] - s.xc);
        }
        guard(s.xc, k, "admm");
        res.iterations = k;
        stat = inf_norm(p.gradient(s.xc));
        rec.add(k, s.xc, stat, consensus_of(s.x, s.xc));
        if (stat <= cfg.tol) res.converged = true;
    }
    rec.flush();
    res.xc = s.xc;
    res.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return res;
}

BaselineResult one_shot_average_run(const SeparableProblem& p, const OneShotConfig& cfg, const Vector& x0) {
    return one_shot_average_run(p, cfg, SystemState::flat(x0, p.m()));
}

BaselineResult one_shot_average_run(const SeparableProblem& p, const OneShotConfig& cfg_in, const SystemState& start) {
    const EcadoConfig ec = cfg_in.ec.resolved(p.n(), p.m());
    if (cfg_in.max_iters < 1 || !(cfg_in.tol > 0) || cfg_in.trace_stride < 1)
        throw ConfigError("one_shot: bad iteration settings");
    start.validate();
    if (start.m() != p.m() || start.n() != p.n()) throw DimensionError("one_shot: start state does not match problem");
    const auto t0 = Clock::now();
    const std::size_t m = p.m();
    const double dt = ec.dt_init;
    BaselineResult res;
    Recorder rec{res, p, cfg_in.trace_stride, dt};
    SystemState s = start;
    double stat = inf_norm(p.gradient(s.xc));
    if (stat <= cfg_in.tol) res.converged = true;
    for (int k = 1; k <= cfg_in.max_iters && !res.converged; ++k) {
        parallel_for(ec.workers, m, [&](std::size_t i) {
            auto r = solve_subproblem(p[i], ec.Zi[i], s.x[i], s.I[i], s.t, s.t + dt, dt, ScalingMode::identity,
                                      cfg_in.sub_integrator);
            s.x[i] = std::move(r.x_end);
        });
        for (std::size_t i = 0; i < m; ++i) s.I[i] += (dt / ec.L) * (s.xc - s.x[i]);
        s.xc -= (dt * s.flow_sum().array() / ec.Zc.array()).matrix();
        s.t += dt;
        guard(s.xc, k, "one_shot");
        for (const auto& v : s.x) guard(v, k, "one_shot");
        res.iterations = k;
        stat = inf_norm(p.gradient(s.xc));
        rec.add(k, s.xc, stat, consensus_of(s.x, s.xc));
        if (stat <= cfg_in.tol) res.converged = true;
    }
    rec.flush();
    res.xc = s.xc;
    res.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return res;
}

double asymptotic_contraction(const std::vector<double>& e, std::size_t window) {
    if (e.size() < window + 1 || window == 0) throw ConfigError("asymptotic_contraction: not enough samples");
    const double last = e.back();
    const double first = e[e.size() - 1 - window];
    if (!(first > 0) || !(last > 0)) return 0.0;
    return std::pow(last / first, 1.0 / static_cast<double>(window));
}

}  // namespace ecado
