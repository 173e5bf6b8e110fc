#include "ecado/ec_model.hpp"

#include <cmath>
#include <string>

#include "ecado/errors.hpp"

namespace ecado {

namespace {

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector from_std(const nlohmann::json& j) {
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double state_norm(const SystemState& s) {
    double r = inf_norm(s.xc);
    for (std::size_t i = 0; i < s.m(); ++i) r = std::max({r, inf_norm(s.x[i]), inf_norm(s.I[i])});
    return r;
}

}  // namespace

SystemState SystemState::flat(const Vector& x0, std::size_t m) {
    SystemState s;
    s.xc = x0;
    s.x.assign(m, x0);
    s.I.assign(m, Vector::Zero(x0.size()));
    return s;
}

void SystemState::validate() const {
    if (x.size() != I.size()) throw DimensionError("state: x and I lists differ in length");
    if (!xc.allFinite()) throw Error("state: non-finite x_c");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != xc.size() || I[i].size() != xc.size()) throw DimensionError("state: vector size mismatch");
        if (!x[i].allFinite() || !I[i].allFinite()) throw Error("state: non-finite entry");
    }
}

Vector SystemState::flow_sum() const {
    Vector s = Vector::Zero(xc.size());
    for (const auto& v : I) s += v;
    return s;
}

EcadoConfig EcadoConfig::resolved(Eigen::Index n, std::size_t m) const {
    EcadoConfig c = *this;
    if (c.Zc.size() == 0) c.Zc = Vector::Constant(n, zc_scalar);
    if (c.Zi.empty()) c.Zi.assign(m, Vector::Constant(n, zi_scalar));
    c.validate(n, m);
    return c;
}

void EcadoConfig::validate(Eigen::Index n, std::size_t m) const {
    auto positive_diag = [](const Vector& v) { return v.allFinite() && (v.array() > 0.0).all(); };
    if (Zc.size() != n) throw DimensionError("config: Z_c has wrong size");
    if (!positive_diag(Zc)) throw ConfigError("config: Z_c entries must be positive");
    if (Zi.size() != m) throw DimensionError("config: expected one Z_i per agent");
    for (const auto& z : Zi) {
        if (z.size() != n) throw DimensionError("config: Z_i has wrong size");
        if (!positive_diag(z)) throw ConfigError("config: Z_i entries must be positive");
    }
    if (!(L > 0)) throw ConfigError("config: L must be positive");
    if (!(dt_init > 0) || !(dt_min > 0) || dt_min > dt_init) throw ConfigError("config: need 0 < dt_min <= dt_init");
    if (!(eta > 0 && eta < 1)) throw ConfigError("config: eta must lie in (0,1)");
    if (!(delta > 0)) throw ConfigError("config: delta must be positive");
    if (!(outer_tol > 0) || !(inner_tol > 0)) throw ConfigError("config: tolerances must be positive");
    if (window < 0 || sub_dt < 0) throw ConfigError("config: window and sub_dt must be >= 0");
    if (max_outer < 1 || max_inner < 1) throw ConfigError("config: iteration caps must be >= 1");
    if (beta < 0) throw ConfigError("config: beta must be >= 0");
    if (hbar_samples < 1) throw ConfigError("config: hbar_samples must be >= 1");
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
}

double Derivatives::max_abs() const {
    double r = inf_norm(dxc);
    for (const auto& v : dx) r = std::max(r, inf_norm(v));
    for (const auto& v : dI) r = std::max(r, inf_norm(v));
    return r;
}

Derivatives ode_rhs(const SystemState& s, const SeparableProblem& p, const EcadoConfig& cfg) {
    const std::size_t m = p.m();
    if (s.m() != m || s.n() != p.n()) throw DimensionError("ode_rhs: state does not match problem");
    if (cfg.Zc.size() != s.n() || cfg.Zi.size() != m) throw DimensionError("ode_rhs: config not resolved for problem");
    Derivatives d;
    d.dxc = -(s.flow_sum().array() / cfg.Zc.array()).matrix();
    d.dx.resize(m);
    d.dI.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        d.dI[i] = (s.xc - s.x[i]) / cfg.L;
        d.dx[i] = ((s.I[i] - p[i].gradient(s.x[i])).array() / cfg.Zi[i].array()).matrix();
    }
    return d;
}

Residuals steady_state_residual(const SystemState& s, const SeparableProblem& p) {
    Residuals r;
    r.stationarity = inf_norm(p.gradient(s.xc));
    for (std::size_t i = 0; i < s.m(); ++i) r.consensus = std::max(r.consensus, inf_norm(s.xc - s.x[i]));
    r.flow_balance = inf_norm(s.flow_sum());
    return r;
}

std::vector<SystemState> reference_integrate(const SystemState& s0, const SeparableProblem& p, const EcadoConfig& cfg,
                                             double t_end, double dt_ref, std::size_t stride) {
    if (!(dt_ref > 0)) throw ConfigError("reference_integrate: dt_ref must be positive");
    if (stride == 0) stride = 1;
    s0.validate();
    std::vector<SystemState> traj{s0};
    SystemState s = s0;
    const double t0 = s0.t;
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - t0) / dt_ref - 1e-9));
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_next = std::min(t0 + static_cast<double>(k) * dt_ref, t_end);
        const double h = t_next - s.t;
        const Derivatives d = ode_rhs(s, p, cfg);
        s.xc += h * d.dxc;
        for (std::size_t i = 0; i < s.m(); ++i) {
            s.x[i] += h * d.dx[i];
            s.I[i] += h * d.dI[i];
        }
        s.t = t_next;
        const double nrm = state_norm(s);
        if (!(nrm <= kDivergenceCap))
            throw DivergenceError("reference_integrate: state norm exceeded cap at t=" + std::to_string(s.t));
        if (k % stride == 0 || k == steps) traj.push_back(s);
    }
    return traj;
}

nlohmann::json state_to_json(const SystemState& s) {
    nlohmann::json xs = nlohmann::json::array(), is = nlohmann::json::array();
    for (const auto& v : s.x) xs.push_back(to_std(v));
    for (const auto& v : s.I) is.push_back(to_std(v));
    return {{"t", s.t}, {"x_c", to_std(s.xc)}, {"x", xs}, {"I", is}};
}

SystemState state_from_json(const nlohmann::json& j) {
    SystemState s;
    s.t = j.at("t").get<double>();
    s.xc = from_std(j.at("x_c"));
    for (const auto& v : j.at("x")) s.x.push_back(from_std(v));
    for (const auto& v : j.at("I")) s.I.push_back(from_std(v));
    s.validate();
    return s;
}

}  // namespace ecado
