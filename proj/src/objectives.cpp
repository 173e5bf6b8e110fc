#include "ecado/objectives.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "ecado/errors.hpp"

namespace ecado {

Matrix SubObjective::hessian(const Vector&) const {
    throw CapabilityError("sub-objective has no Hessian");
}

QuadraticObjective::QuadraticObjective(Matrix A, Vector B, double C) : A_(std::move(A)), B_(std::move(B)), C_(C) {
    require_square(A_, "make_quadratic");
    if (A_.rows() != B_.size()) throw DimensionError("make_quadratic: A and B sizes differ");
    require_finite(A_, "make_quadratic");
    if (!B_.allFinite() || !std::isfinite(C_)) throw Error("make_quadratic: non-finite B or C");
    const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
    if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw NotSpdError("make_quadratic: A not symmetric");
    Eigen::LLT<Matrix> llt(A_);
    if (llt.info() != Eigen::Success) throw NotSpdError("make_quadratic: A not positive definite");
}

double QuadraticObjective::value(const Vector& x) const {
    if (x.size() != B_.size()) throw DimensionError("quadratic value: dimension mismatch");
    return 0.5 * x.dot(A_ * x) + B_.dot(x) + C_;
}

Vector QuadraticObjective::gradient(const Vector& x) const {
    if (x.size() != B_.size()) throw DimensionError("quadratic gradient: dimension mismatch");
    return A_ * x + B_;
}

void LogisticDataset::validate() const {
    if (features.rows() < 1) throw DimensionError("logistic dataset: need at least one sample");
    if (features.rows() != labels.size()) throw DimensionError("logistic dataset: label count differs from samples");
    if (!(lambda >= 0)) throw ConfigError("logistic dataset: lambda must be >= 0");
    require_finite(features, "logistic dataset");
    for (Eigen::Index j = 0; j < labels.size(); ++j)
        if (labels[j] != 0.0 && labels[j] != 1.0) throw ConfigError("logistic dataset: labels must be 0 or 1");
}

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

LogisticObjective::LogisticObjective(LogisticDataset data) : data_(std::move(data)) { data_.validate(); }

double LogisticObjective::value(const Vector& x) const {
    if (x.size() != data_.features.cols()) throw DimensionError("logistic value: dimension mismatch");
    const Vector z = data_.features * x;
    double s = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) s += softplus(z[j]) - data_.labels[j] * z[j];
    return s / static_cast<double>(z.size()) + 0.5 * data_.lambda * x.squaredNorm();
}

Vector LogisticObjective::gradient(const Vector& x) const {
    if (x.size() != data_.features.cols()) throw DimensionError("logistic gradient: dimension mismatch");
    Vector r = data_.features * x;
    for (Eigen::Index j = 0; j < r.size(); ++j) r[j] = sigmoid(r[j]) - data_.labels[j];
    return data_.features.transpose() * r / static_cast<double>(r.size()) + data_.lambda * x;
}

Matrix LogisticObjective::hessian(const Vector& x) const {
    if (x.size() != data_.features.cols()) throw DimensionError("logistic hessian: dimension mismatch");
    Vector w = data_.features * x;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        const double s = sigmoid(w[j]);
        w[j] = s * (1.0 - s);
    }
    const auto& a = data_.features;
    Matrix H = a.transpose() * w.asDiagonal() * a / static_cast<double>(a.rows());
    H = 0.5 * (H + H.transpose());
    H.diagonal().array() += data_.lambda;
    return H;
}

SeparableProblem::SeparableProblem(std::vector<SubObjectivePtr> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw DimensionError("separable problem: need at least one sub-objective");
    n_ = parts_.front()->dim();
    for (const auto& p : parts_) {
        if (!p) throw Error("separable problem: null sub-objective");
        if (p->dim() != n_) throw DimensionError("separable problem: sub-objective dimensions differ");
    }
}

bool SeparableProblem::has_hessian() const {
    for (const auto& p : parts_)
        if (!p->has_hessian()) return false;
    return true;
}

double SeparableProblem::value(const Vector& x) const {
    double s = 0.0;
    for (const auto& p : parts_) s += p->value(x);
    return s;
}

Vector SeparableProblem::gradient(const Vector& x) const {
    Vector g = Vector::Zero(n_);
    for (const auto& p : parts_) g += p->gradient(x);
    return g;
}

SubObjectivePtr make_quadratic(const Matrix& A, const Vector& B, double C) {
    return std::make_shared<QuadraticObjective>(A, B, C);
}

SubObjectivePtr make_logistic(const LogisticDataset& data) { return std::make_shared<LogisticObjective>(data); }

std::vector<LogisticDataset> synth_logistic_data(int m, int l, int d, std::uint64_t seed, double lambda) {
    if (m < 1 || l < 1 || d < 1) throw ConfigError("synth_logistic_data: m, l, d must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector w(d);
    for (int k = 0; k < d; ++k) w[k] = normal(rng);
    std::vector<LogisticDataset> out(m);
    for (int i = 0; i < m; ++i) {
        LogisticDataset& ds = out[i];
        ds.features.resize(l, d);
        ds.labels.resize(l);
        ds.lambda = lambda;
        ds.seed = seed;
        for (int j = 0; j < l; ++j) {
            for (int k = 0; k < d; ++k) ds.features(j, k) = normal(rng);
            double label = ds.features.row(j).dot(w) > 0.0 ? 1.0 : 0.0;
            if (unif(rng) < 0.05) label = 1.0 - label;
            ds.labels[j] = label;
        }
    }
    return out;
}

SeparableProblem random_quadratic_problem(int n, int m, std::uint64_t seed) {
    if (n < 1 || m < 1) throw ConfigError("random_quadratic_problem: n, m must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<SubObjectivePtr> parts;
    for (int i = 0; i < m; ++i) {
        Matrix Q(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) Q(r, c) = normal(rng);
        Matrix A = Q.transpose() * Q / static_cast<double>(n);
        A = 0.5 * (A + A.transpose());
        A.diagonal().array() += 0.5;
        Vector B(n);
        for (int r = 0; r < n; ++r) B[r] = normal(rng);
        parts.push_back(make_quadratic(A, B, 0.0));
    }
    return SeparableProblem(std::move(parts));
}

std::vector<Matrix> quadratic_blocks(const SeparableProblem& p) {
    std::vector<Matrix> out;
    for (const auto& part : p.parts()) {
        auto q = std::dynamic_pointer_cast<const QuadraticObjective>(part);
        if (!q) throw CapabilityError("quadratic_blocks: sub-objective is not quadratic");
        out.push_back(q->A());
    }
    return out;
}

Vector quadratic_minimizer(const SeparableProblem& p) {
    Matrix A = Matrix::Zero(p.n(), p.n());
    Vector B = Vector::Zero(p.n());
    for (const auto& part : p.parts()) {
        auto q = std::dynamic_pointer_cast<const QuadraticObjective>(part);
        if (!q) throw CapabilityError("quadratic_minimizer: sub-objective is not quadratic");
        A += q->A();
        B += q->B();
    }
    return lu_factor(A).solve(Vector(-B));
}

nlohmann::json dataset_to_json(const LogisticDataset& d) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index j = 0; j < d.features.rows(); ++j) {
        std::vector<double> r(d.features.cols());
        for (Eigen::Index k = 0; k < d.features.cols(); ++k) r[k] = d.features(j, k);
        rows.push_back(r);
    }
    std::vector<int> labels(d.labels.size());
    for (Eigen::Index j = 0; j < d.labels.size(); ++j) labels[j] = static_cast<int>(d.labels[j]);
    return {{"features", rows}, {"labels", labels}, {"lambda", d.lambda}, {"seed", d.seed}};
}

LogisticDataset dataset_from_json(const nlohmann::json& j) {
    LogisticDataset d;
    const auto& rows = j.at("features");
    const auto& labels = j.at("labels");
    const auto l = static_cast<Eigen::Index>(rows.size());
    const auto dim = l > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    d.features.resize(l, dim);
    for (Eigen::Index r = 0; r < l; ++r) {
        if (static_cast<Eigen::Index>(rows.at(r).size()) != dim) throw DimensionError("dataset json: ragged feature rows");
        for (Eigen::Index c = 0; c < dim; ++c) d.features(r, c) = rows.at(r).at(c).get<double>();
    }
    d.labels.resize(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t r = 0; r < labels.size(); ++r) d.labels[static_cast<Eigen::Index>(r)] = labels.at(r).get<double>();
    d.lambda = j.at("lambda").get<double>();
    d.seed = j.value("seed", std::uint64_t{0});
    d.validate();
    return d;
}

}  // namespace ecado
