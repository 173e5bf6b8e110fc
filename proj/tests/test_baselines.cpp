#include <random>

#include "doctest.h"
#include "ecado/baselines.hpp"
#include "ecado/errors.hpp"
#include "ecado/gs_driver.hpp"
#include "ecado/spectral.hpp"
#include "oracles.hpp"

using namespace ecado;

namespace {

std::vector<double> stat_series(const BaselineResult& r) {
    std::vector<double> out;
    for (const auto& rec : r.trace.records) out.push_back(rec.stat_res);
    return out;
}

BaselineConfig fixed(double alpha, int iters) {
    BaselineConfig c;
    c.alpha = alpha;
    c.max_iters = iters;
    c.tol = 1e-300;
    return c;
}

}  // namespace

TEST_CASE("gradient descent contracts by one minus the step") {
    const auto p = oracle::scalar_problem({1.0}, {0.0});
    const auto r = cgd_run(p, fixed(0.1, 50), Vector::Ones(1));
    CHECK(asymptotic_contraction(stat_series(r), 49) == doctest::Approx(0.9).epsilon(0.01));
}

TEST_CASE("gradient descent leaves a flat objective alone") {
    const auto r = cgd_run(oracle::zero_problem(2, 2), fixed(0.1, 5), Vector::Constant(2, 3.0));
    CHECK(r.xc == Vector::Constant(2, 3.0));
}

TEST_CASE("two-agent optimum for gradient descent and dane") {
    const auto p = oracle::two_agent_scalar();
    BaselineConfig c;
    c.alpha = 0.1;
    const auto g = cgd_run(p, c, Vector::Zero(1));
    CHECK(g.converged);
    CHECK(std::abs(g.xc[0] - 2.0 / 3.0) < 1e-8);
    c.alpha = 0.5;
    const auto d = dane_run(p, c, Vector::Zero(1));
    CHECK(d.converged);
    CHECK(std::abs(d.xc[0] - 2.0 / 3.0) < 1e-8);
}

TEST_CASE("dane contraction with regularizer") {
    const auto p = oracle::scalar_problem({1.0}, {0.0});
    BaselineConfig c = fixed(1.0, 50);
    c.mu = 1.0;
    const auto r = dane_run(p, c, Vector::Ones(1));
    CHECK(asymptotic_contraction(stat_series(r), 49) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("huge regularizer nearly freezes dane") {
    const auto p = random_quadratic_problem(3, 2, 1);
    BaselineConfig c = fixed(1.0, 1);
    c.mu = 1e8;
    const Vector x0 = Vector::Ones(3);
    const auto r = dane_run(p, c, x0);
    CHECK(inf_norm(r.xc - x0) <= c.alpha / c.mu * inf_norm(p.gradient(x0)));
}

TEST_CASE("dane needs hessians") {
    class NoHess final : public SubObjective {
    public:
        int dim() const override { return 1; }
        double value(const Vector& x) const override { return x.squaredNorm(); }
        Vector gradient(const Vector& x) const override { return 2 * x; }
    };
    const SeparableProblem p({std::make_shared<NoHess>()});
    CHECK_THROWS_AS(dane_run(p, BaselineConfig{}, Vector::Zero(1)), CapabilityError);
}

TEST_CASE("admm stays at zero on a zero objective") {
    const auto r = admm_run(oracle::zero_problem(2, 3), fixed(0.1, 10), Vector::Zero(2));
    CHECK(r.xc.isZero());
    CHECK(r.note == "dual=standard");
}

TEST_CASE("admm reaches the two-agent optimum") {
    BaselineConfig c;
    c.alpha = 0.05;
    c.admm_penalty = 1.0;
    c.tol = 1e-6;
    const auto r = admm_run(oracle::two_agent_scalar(), c, Vector::Zero(1));
    CHECK(r.converged);
    CHECK(inf_norm(oracle::two_agent_scalar().gradient(r.xc)) <= 1e-6);
}

TEST_CASE("printed admm dual reports itself") {
    BaselineConfig c = fixed(0.1, 3);
    c.admm_dual = AdmmDual::printed;
    CHECK(admm_run(oracle::two_agent_scalar(), c, Vector::Zero(1)).note == "dual=printed");
}

TEST_CASE("one-shot step with unit settings averages agent contributions") {
    const auto p = oracle::scalar_problem({1.5, 1.5}, {0.2, 0.2});
    OneShotConfig c;
    c.ec.zc_scalar = 2.0;
    c.ec.zi_scalar = 1.0;
    c.ec.L = 1.0;
    c.ec.dt_init = 1.0;
    c.max_iters = 1;
    c.tol = 1e-300;
    SystemState s = SystemState::flat(Vector::Constant(1, 0.9), 2);
    s.x = {Vector::Constant(1, 0.4), Vector::Constant(1, 0.4)};
    s.I = {Vector::Constant(1, 0.3), Vector::Constant(1, 0.3)};
    const auto r = one_shot_average_run(p, c, s);
    // backward sub-step: x+ = (x + I - B) / (1 + a)
    const double xp = (0.4 + 0.3 - 0.2) / (1.0 + 1.5);
    const double Ip = 0.3 + (0.9 - xp);
    const double mean = 0.5 * ((0.9 - Ip) + (0.9 - Ip));
    CHECK(r.xc[0] == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("one-shot sweep on flat and quadratic problems") {
    OneShotConfig c;
    c.ec.zc_scalar = 2.0;
    c.ec.zi_scalar = 1.0;
    c.max_iters = 20;
    c.tol = 1e-300;
    const auto z = one_shot_average_run(oracle::zero_problem(1, 2), c, Vector::Constant(1, 0.5));
    for (const auto& rec : z.trace.records) CHECK(rec.f == 0.0);
    CHECK(z.xc[0] == 0.5);
    c.ec.dt_init = 0.2;
    c.max_iters = 100000;
    c.tol = 1e-9;
    const auto q = one_shot_average_run(oracle::two_agent_scalar(), c, Vector::Zero(1));
    CHECK(q.converged);
    CHECK(std::abs(q.xc[0] - 2.0 / 3.0) < 1e-8);
}

TEST_CASE("every baseline agrees with ecado on random quadratics") {
    for (std::uint64_t seed = 40; seed < 43; ++seed) {
        const auto p = random_quadratic_problem(3, 3, seed);
        const Vector xe = run_ecado(p, EcadoConfig{}, Vector::Zero(3)).state.xc;
        BaselineConfig c;
        c.alpha = 0.2;
        c.max_iters = 1000000;
        CHECK(inf_norm(cgd_run(p, c, Vector::Zero(3)).xc - xe) <= 1e-5);
        c.alpha = 0.5;
        CHECK(inf_norm(dane_run(p, c, Vector::Zero(3)).xc - xe) <= 1e-5);
        c.alpha = 0.1;
        CHECK(inf_norm(admm_run(p, c, Vector::Zero(3)).xc - xe) <= 1e-5);
        OneShotConfig o;
        o.ec.zi_scalar = 1.0;
        o.ec.zc_scalar = 3.0;
        CHECK(inf_norm(one_shot_average_run(p, o, Vector::Zero(3)).xc - xe) <= 1e-5);
    }
}

TEST_CASE("empirical contraction matches the iteration matrix") {
    const std::vector<Matrix> A{Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 4.0)};
    const auto p = oracle::two_agent_scalar();
    BaselineConfig c = fixed(0.05, 100);
    auto check = [&](Method m, const BaselineResult& r) {
        const double rho = build_G_baseline(m, A, c).rho;
        CHECK_MESSAGE(asymptotic_contraction(stat_series(r), 30) == doctest::Approx(rho).epsilon(0.05), std::string(method_name(m)));
    };
    check(Method::cgd, cgd_run(p, c, Vector::Zero(1)));
    c.mu = 0.5;
    check(Method::dane, dane_run(p, c, Vector::Zero(1)));
    c.admm_penalty = 1.0;
    check(Method::admm, admm_run(p, c, Vector::Zero(1)));
    // the printed dual has a biased fixed point unless B = 0
    c.admm_dual = AdmmDual::printed;
    check(Method::admm, admm_run(oracle::scalar_problem({2.0, 4.0}, {0.0, 0.0}), c, Vector::Ones(1)));

    OneShotConfig o;
    o.ec.zc_scalar = 2.0;
    o.ec.zi_scalar = 1.0;
    o.max_iters = 60;  // faster contraction; stay above the rounding floor
    o.tol = 1e-300;
    const auto r = one_shot_average_run(p, o, Vector::Zero(1));
    const double rho = build_G_one_shot(A, o.ec.resolved(1, 2), 1.0).rho;
    CHECK(asymptotic_contraction(stat_series(r), 30) == doctest::Approx(rho).epsilon(0.05));
}

TEST_CASE("baseline config validation") {
    BaselineConfig c;
    c.alpha = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = BaselineConfig{};
    c.mu = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = BaselineConfig{};
    c.admm_penalty = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("divergent gradient descent is caught") {
    CHECK_THROWS_AS(cgd_run(oracle::two_agent_scalar(), fixed(5.0, 10000), Vector::Ones(1)), DivergenceError);
}

TEST_CASE("trace stride keeps the last iteration") {
    BaselineConfig c = fixed(0.1, 25);
    c.trace_stride = 10;
    const auto r = cgd_run(oracle::two_agent_scalar(), c, Vector::Zero(1));
    REQUIRE(r.trace.records.size() == 3);
    CHECK(r.trace.records.back().t == 25.0);
}
