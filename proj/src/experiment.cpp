#include "ecado/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "ecado/errors.hpp"
#include "ecado/gs_driver.hpp"
#include "ecado/log.hpp"
#include "ecado/sensitivity.hpp"
#include "ecado/spectral.hpp"

namespace ecado {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kTopKeys = {"problem", "n",      "m",      "seed",     "l",        "d",      "lambda",
                                        "file",    "x0",     "solver", "config",   "output",   "analysis", "workers"};
const std::set<std::string> kEcKeys = {"zc",         "zi",         "L",           "dt_init",        "dt_min",
                                       "eta",        "delta",      "outer_tol",   "inner_tol",      "window",
                                       "max_outer",  "max_inner",  "beta",        "scaling",        "sub_integrator",
                                       "sub_dt",     "adaptive",   "hbar_samples", "sensitivity_seed",
                                       "diagonal_sensitivity",     "record_timing"};
const std::set<std::string> kBaseKeys = {"alpha", "mu", "admm_penalty", "admm_dual", "max_iters", "tol", "trace_stride"};
const std::set<std::string> kOneShotKeys = {"zc", "zi", "L", "dt", "sub_integrator", "max_iters", "tol", "trace_stride"};

template <class E>
struct EnumName {
    E value;
    const char* name;
};

const EnumName<ProblemKind> kProblems[] = {{ProblemKind::quadratic_random, "quadratic_random"},
                                           {ProblemKind::quadratic_file, "quadratic_file"},
                                           {ProblemKind::logistic_synth, "logistic_synth"}};
const EnumName<SolverKind> kSolvers[] = {{SolverKind::ecado, "ecado"}, {SolverKind::basic_gs, "basic_gs"},
                                         {SolverKind::cgd, "cgd"},     {SolverKind::dane, "dane"},
                                         {SolverKind::admm, "admm"},   {SolverKind::one_shot, "one_shot"}};
const EnumName<ScalingMode> kScalings[] = {{ScalingMode::identity, "identity"}, {ScalingMode::hessian, "hessian"}};
const EnumName<Integrator> kIntegrators[] = {{Integrator::forward_euler, "forward_euler"},
                                             {Integrator::backward_euler, "backward_euler"}};
const EnumName<AdmmDual> kDuals[] = {{AdmmDual::standard, "standard"}, {AdmmDual::printed, "printed"}};

template <class E, std::size_t N>
const char* name_of(const EnumName<E> (&table)[N], E v) {
    for (const auto& e : table)
        if (e.value == v) return e.name;
    return "?";
}

template <class E, std::size_t N>
E parse_enum(const EnumName<E> (&table)[N], const json& j, const std::string& key) {
    if (!j.is_string()) throw SchemaError(key, "expected a string");
    const auto s = j.get<std::string>();
    for (const auto& e : table)
        if (s == e.name) return e.value;
    throw SchemaError(key, "unknown value '" + s + "'");
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw SchemaError(prefix + it.key(), "unknown key");
}

double get_num(const json& obj, const std::string& key, double def, const std::string& prefix) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_number()) throw SchemaError(prefix + key, "expected a number");
    return obj[key].get<double>();
}

template <class Int>
Int get_int(const json& obj, const std::string& key, Int def, const std::string& prefix) {
    if (!obj.contains(key)) return def;
    const auto& v = obj[key];
    if (!v.is_number_integer()) throw SchemaError(prefix + key, "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
        if (v.is_number_unsigned()) return v.get<Int>();
        if (v.get<long long>() < 0) throw SchemaError(prefix + key, "expected a non-negative integer");
    }
    return v.get<Int>();
}

bool get_bool(const json& obj, const std::string& key, bool def, const std::string& prefix) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_boolean()) throw SchemaError(prefix + key, "expected a boolean");
    return obj[key].get<bool>();
}

std::string get_str(const json& obj, const std::string& key, const std::string& def, const std::string& prefix) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_string()) throw SchemaError(prefix + key, "expected a string");
    return obj[key].get<std::string>();
}

void parse_ec(const json& c, EcadoConfig& ec) {
    const std::string p = "config.";
    reject_unknown(c, kEcKeys, p);
    ec.zc_scalar = get_num(c, "zc", ec.zc_scalar, p);
    ec.zi_scalar = get_num(c, "zi", ec.zi_scalar, p);
    ec.L = get_num(c, "L", ec.L, p);
    ec.dt_init = get_num(c, "dt_init", ec.dt_init, p);
    ec.dt_min = get_num(c, "dt_min", ec.dt_min, p);
    ec.eta = get_num(c, "eta", ec.eta, p);
    ec.delta = get_num(c, "delta", ec.delta, p);
    ec.outer_tol = get_num(c, "outer_tol", ec.outer_tol, p);
    ec.inner_tol = get_num(c, "inner_tol", ec.inner_tol, p);
    ec.window = get_num(c, "window", ec.window, p);
    ec.max_outer = get_int(c, "max_outer", ec.max_outer, p);
    ec.max_inner = get_int(c, "max_inner", ec.max_inner, p);
    ec.beta = get_num(c, "beta", ec.beta, p);
    if (c.contains("scaling")) ec.scaling = parse_enum(kScalings, c["scaling"], p + "scaling");
    if (c.contains("sub_integrator"))
        ec.sub_integrator = parse_enum(kIntegrators, c["sub_integrator"], p + "sub_integrator");
    ec.sub_dt = get_num(c, "sub_dt", ec.sub_dt, p);
    ec.adaptive = get_bool(c, "adaptive", ec.adaptive, p);
    ec.hbar_samples = get_int(c, "hbar_samples", ec.hbar_samples, p);
    ec.seed = get_int(c, "sensitivity_seed", ec.seed, p);
    ec.diagonal_sensitivity = get_bool(c, "diagonal_sensitivity", ec.diagonal_sensitivity, p);
    ec.record_timing = get_bool(c, "record_timing", ec.record_timing, p);
}

void parse_base(const json& c, BaselineConfig& b) {
    const std::string p = "config.";
    reject_unknown(c, kBaseKeys, p);
    b.alpha = get_num(c, "alpha", b.alpha, p);
    b.mu = get_num(c, "mu", b.mu, p);
    b.admm_penalty = get_num(c, "admm_penalty", b.admm_penalty, p);
    if (c.contains("admm_dual")) b.admm_dual = parse_enum(kDuals, c["admm_dual"], p + "admm_dual");
    b.max_iters = get_int(c, "max_iters", b.max_iters, p);
    b.tol = get_num(c, "tol", b.tol, p);
    b.trace_stride = get_int(c, "trace_stride", b.trace_stride, p);
}

void parse_one_shot(const json& c, OneShotConfig& o) {
    const std::string p = "config.";
    reject_unknown(c, kOneShotKeys, p);
    o.ec.zc_scalar = get_num(c, "zc", o.ec.zc_scalar, p);
    o.ec.zi_scalar = get_num(c, "zi", o.ec.zi_scalar, p);
    o.ec.L = get_num(c, "L", o.ec.L, p);
    o.ec.dt_init = get_num(c, "dt", o.ec.dt_init, p);
    o.ec.dt_min = std::min(o.ec.dt_min, o.ec.dt_init);
    if (c.contains("sub_integrator"))
        o.sub_integrator = parse_enum(kIntegrators, c["sub_integrator"], p + "sub_integrator");
    o.max_iters = get_int(c, "max_iters", o.max_iters, p);
    o.tol = get_num(c, "tol", o.tol, p);
    o.trace_stride = get_int(c, "trace_stride", o.trace_stride, p);
}

json ec_to_json(const EcadoConfig& ec) {
    return {{"zc", ec.zc_scalar},
            {"zi", ec.zi_scalar},
            {"L", ec.L},
            {"dt_init", ec.dt_init},
            {"dt_min", ec.dt_min},
            {"eta", ec.eta},
            {"delta", ec.delta},
            {"outer_tol", ec.outer_tol},
            {"inner_tol", ec.inner_tol},
            {"window", ec.window},
            {"max_outer", ec.max_outer},
            {"max_inner", ec.max_inner},
            {"beta", ec.beta},
            {"scaling", name_of(kScalings, ec.scaling)},
            {"sub_integrator", name_of(kIntegrators, ec.sub_integrator)},
            {"sub_dt", ec.sub_dt},
            {"adaptive", ec.adaptive},
            {"hbar_samples", ec.hbar_samples},
            {"sensitivity_seed", ec.seed},
            {"diagonal_sensitivity", ec.diagonal_sensitivity},
            {"record_timing", ec.record_timing}};
}

json base_to_json(const BaselineConfig& b) {
    return {{"alpha", b.alpha},
            {"mu", b.mu},
            {"admm_penalty", b.admm_penalty},
            {"admm_dual", name_of(kDuals, b.admm_dual)},
            {"max_iters", b.max_iters},
            {"tol", b.tol},
            {"trace_stride", b.trace_stride}};
}

json one_shot_to_json(const OneShotConfig& o) {
    return {{"zc", o.ec.zc_scalar},
            {"zi", o.ec.zi_scalar},
            {"L", o.ec.L},
            {"dt", o.ec.dt_init},
            {"sub_integrator", name_of(kIntegrators, o.sub_integrator)},
            {"max_iters", o.max_iters},
            {"tol", o.tol},
            {"trace_stride", o.trace_stride}};
}

bool is_ec_solver(SolverKind s) { return s == SolverKind::ecado || s == SolverKind::basic_gs; }
bool is_baseline(SolverKind s) { return s == SolverKind::cgd || s == SolverKind::dane || s == SolverKind::admm; }

ExperimentSpec parse_impl(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw SchemaError("<root>", "expected a JSON object");
    reject_unknown(j, kTopKeys, "");
    ExperimentSpec s;
    if (!j.contains("problem")) throw SchemaError("problem", "required key missing");
    if (!j.contains("solver")) throw SchemaError("solver", "required key missing");
    s.problem = parse_enum(kProblems, j["problem"], "problem");
    s.solver = parse_enum(kSolvers, j["solver"], "solver");
    s.n = get_int(j, "n", s.n, "");
    s.m = get_int(j, "m", s.m, "");
    s.seed = get_int(j, "seed", s.seed, "");
    s.l = get_int(j, "l", s.l, "");
    s.d = get_int(j, "d", s.d, "");
    s.lambda = get_num(j, "lambda", s.lambda, "");
    s.file = get_str(j, "file", s.file, "");
    s.x0 = get_str(j, "x0", s.x0, "");
    s.output = get_str(j, "output", s.output, "");
    s.analysis = get_bool(j, "analysis", s.analysis, "");
    s.workers = get_int(j, "workers", s.workers, "");

    if (s.n < 1) throw SchemaError("n", "must be >= 1");
    if (s.m < 1) throw SchemaError("m", "must be >= 1");
    if (s.l < 1) throw SchemaError("l", "must be >= 1");
    if (s.d < 1) throw SchemaError("d", "must be >= 1");
    if (!(s.lambda >= 0)) throw SchemaError("lambda", "must be >= 0");
    if (s.workers < 1) throw SchemaError("workers", "must be >= 1");
    if (s.x0 != "zero" && s.x0 != "flat") throw SchemaError("x0", "expected 'zero' or 'flat'");
    if (s.problem == ProblemKind::quadratic_file) {
        if (s.file.empty()) throw SchemaError("file", "required for quadratic_file");
        fs::path f(s.file);
        if (f.is_relative() && !fs::exists(f) && !base_dir.empty()) f = base_dir / f;
        if (!fs::exists(f)) throw ConfigError("missing file: " + s.file);
        s.file = f.string();
    }

    const json cfg = j.contains("config") ? j["config"] : json::object();
    if (!cfg.is_object()) throw SchemaError("config", "expected an object");
    if (is_ec_solver(s.solver)) parse_ec(cfg, s.ec);
    else if (is_baseline(s.solver)) parse_base(cfg, s.base);
    else parse_one_shot(cfg, s.one_shot);

    // Surface config range errors at parse time.
    try {
        if (is_ec_solver(s.solver)) s.ec.resolved(1, 1);
        else if (is_baseline(s.solver)) s.base.validate();
        else {
            s.one_shot.ec.resolved(1, 1);
            if (s.one_shot.max_iters < 1 || !(s.one_shot.tol > 0) || s.one_shot.trace_stride < 1)
                throw ConfigError("one_shot: bad iteration settings");
        }
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError("config", e.what());
    }
    return s;
}

SeparableProblem load_quadratic_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing file: " + path);
    const json j = json::parse(in);
    std::vector<SubObjectivePtr> parts;
    for (const auto& b : j.at("blocks")) {
        const auto rows = b.at("A").get<std::vector<std::vector<double>>>();
        const auto B = b.at("B").get<std::vector<double>>();
        Matrix A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(B.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != B.size()) throw DimensionError("quadratic file: A row length differs from B");
            for (std::size_t c = 0; c < B.size(); ++c) A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
        Vector Bv = Eigen::Map<const Vector>(B.data(), static_cast<Eigen::Index>(B.size()));
        parts.push_back(make_quadratic(A, Bv, b.value("C", 0.0)));
    }
    return SeparableProblem(std::move(parts));
}

json quadratic_to_json(const SeparableProblem& p) {
    json blocks = json::array();
    for (const auto& part : p.parts()) {
        auto q = std::dynamic_pointer_cast<const QuadraticObjective>(part);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(q->A().rows()));
        for (Eigen::Index r = 0; r < q->A().rows(); ++r)
            for (Eigen::Index c = 0; c < q->A().cols(); ++c) rows[static_cast<std::size_t>(r)].push_back(q->A()(r, c));
        std::vector<double> B(q->B().data(), q->B().data() + q->B().size());
        blocks.push_back({{"A", rows}, {"B", B}, {"C", q->C()}});
    }
    return {{"blocks", blocks}};
}

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

bool is_quadratic(ProblemKind k) { return k != ProblemKind::logistic_synth; }

}  // namespace

json ExperimentSpec::to_json() const {
    json j = {{"problem", name_of(kProblems, problem)},
              {"n", n},
              {"m", m},
              {"seed", seed},
              {"l", l},
              {"d", d},
              {"lambda", lambda},
              {"file", file},
              {"x0", x0},
              {"solver", name_of(kSolvers, solver)},
              {"output", output},
              {"analysis", analysis},
              {"workers", workers}};
    if (is_ec_solver(solver)) j["config"] = ec_to_json(ec);
    else if (is_baseline(solver)) j["config"] = base_to_json(base);
    else j["config"] = one_shot_to_json(one_shot);
    return j;
}

ExperimentSpec parse_spec(const json& j) { return parse_impl(j, {}); }

ExperimentSpec parse_spec_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return parse_impl(j, {});
}

ExperimentSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw SchemaError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return parse_impl(j, fs::path(path).parent_path());
}

SeparableProblem build_problem(const ExperimentSpec& s) {
    switch (s.problem) {
        case ProblemKind::quadratic_random: return random_quadratic_problem(s.n, s.m, s.seed);
        case ProblemKind::quadratic_file: return load_quadratic_file(s.file);
        case ProblemKind::logistic_synth: {
            std::vector<SubObjectivePtr> parts;
            for (const auto& d : synth_logistic_data(s.m, s.l, s.d, s.seed, s.lambda)) parts.push_back(make_logistic(d));
            return SeparableProblem(std::move(parts));
        }
    }
    throw ConfigError("unknown problem kind");
}

Vector initial_point(const ExperimentSpec& s, int n) {
    return s.x0 == "flat" ? Vector::Ones(n) : Vector::Zero(n);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string analyze_experiment(const ExperimentSpec& s, std::string* csv) {
    if (!is_quadratic(s.problem)) throw CapabilityError("analysis needs a quadratic problem");
    const SeparableProblem p = build_problem(s);
    const auto A = quadratic_blocks(p);
    const EcadoConfig& src = s.solver == SolverKind::one_shot ? s.one_shot.ec : s.ec;
    const EcadoConfig rc = src.resolved(p.n(), p.m());
    std::vector<Matrix> R;
    for (std::size_t i = 0; i < p.m(); ++i) R.push_back(thevenin_resistance(rc.Zi[i], rc.dt_init, A[i]));
    const ComparisonTable t = compare_methods(A, rc, R, rc.dt_init, s.base);
    if (csv) *csv = t.to_csv();
    return t.to_text();
}

void generate_data(const ExperimentSpec& s, const std::string& path) {
    json out;
    if (s.problem == ProblemKind::logistic_synth) {
        json agents = json::array();
        for (const auto& d : synth_logistic_data(s.m, s.l, s.d, s.seed, s.lambda)) agents.push_back(dataset_to_json(d));
        out = {{"kind", "logistic"}, {"seed", s.seed}, {"agents", agents}};
    } else {
        out = quadratic_to_json(build_problem(s));
        out["kind"] = "quadratic";
    }
    write_file_atomic(path, out.dump(1) + "\n");
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
    ExperimentOutcome oc;
    const SeparableProblem p = build_problem(spec);
    const Vector x0 = initial_point(spec, p.n());
    ConvergenceTrace trace;
    Vector xc = x0;
    json summary = {{"solver", name_of(kSolvers, spec.solver)}, {"problem", name_of(kProblems, spec.problem)}};
    std::string error;
    try {
        if (is_ec_solver(spec.solver)) {
            EcadoConfig cfg = spec.ec;
            cfg.workers = spec.workers;
            RunResult r;
            try {
                r = spec.solver == SolverKind::ecado ? run_ecado(p, cfg, x0) : run_basic_gs(p, cfg, x0);
                oc.converged = true;
            } catch (const MaxIterationsError& e) {
                r = e.partial();
                error = e.what();
            }
            trace = r.trace;
            xc = r.state.xc;
            const Residuals res = steady_state_residual(r.state, p);
            summary["iterations"] = r.windows;
            summary["total_inner"] = r.total_inner;
            summary["consensus"] = res.consensus;
            summary["flow_balance"] = res.flow_balance;
            summary["wall_ms"] = r.wall_ms;
        } else {
            BaselineResult r;
            if (spec.solver == SolverKind::one_shot) {
                OneShotConfig cfg = spec.one_shot;
                cfg.ec.workers = spec.workers;
                r = one_shot_average_run(p, cfg, x0);
            } else {
                BaselineConfig cfg = spec.base;
                cfg.workers = spec.workers;
                r = spec.solver == SolverKind::cgd ? cgd_run(p, cfg, x0)
                    : spec.solver == SolverKind::dane ? dane_run(p, cfg, x0)
                                                      : admm_run(p, cfg, x0);
            }
            oc.converged = r.converged;
            if (!r.converged) error = "iteration cap reached before tolerance";
            trace = r.trace;
            xc = r.xc;
            summary["iterations"] = r.iterations;
            summary["wall_ms"] = r.wall_ms;
            if (!r.note.empty()) summary["note"] = r.note;
        }
    } catch (const Error& e) {
        error = e.what();
        oc.converged = false;
    }
    summary["converged"] = oc.converged;
    summary["stationarity"] = inf_norm(p.gradient(xc));
    summary["objective"] = p.value(xc);
    summary["x_c"] = to_std(xc);
    if (!error.empty()) summary["error"] = error;

    const fs::path dir(out_dir);
    oc.trace_csv_path = (dir / "trace.csv").string();
    write_file_atomic(oc.trace_csv_path, trace.to_csv());
    write_file_atomic((dir / "trace.json").string(), trace.to_json().dump(1) + "\n");

    if (spec.analysis) {
        if (is_quadratic(spec.problem)) {
            std::string csv;
            const std::string text = analyze_experiment(spec, &csv);
            write_file_atomic((dir / "comparison.csv").string(), csv);
            write_file_atomic((dir / "comparison.txt").string(), text);
        } else {
            summary["analysis"] = "skipped: spectral analysis covers quadratic problems only";
        }
    }
    write_file_atomic((dir / "summary.json").string(), summary.dump(1) + "\n");
    oc.summary = summary;
    oc.exit_code = oc.converged ? 0 : 1;
    if (!error.empty()) log::error(error);
    return oc;
}

}  // namespace ecado
