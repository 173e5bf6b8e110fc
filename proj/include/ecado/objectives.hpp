#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "json.hpp"

#include "ecado/numerics.hpp"

namespace ecado {

// One term f_i of a separable objective. Implementations are pure/reentrant.
class SubObjective {
public:
    virtual ~SubObjective() = default;
    virtual int dim() const = 0;
    virtual double value(const Vector& x) const = 0;
    virtual Vector gradient(const Vector& x) const = 0;
    virtual bool has_hessian() const { return false; }
    virtual Matrix hessian(const Vector& x) const;
};

using SubObjectivePtr = std::shared_ptr<const SubObjective>;

// f(x) = 1/2 x'Ax + B'x + C with A SPD.
class QuadraticObjective final : public SubObjective {
public:
    QuadraticObjective(Matrix A, Vector B, double C);
    int dim() const override { return static_cast<int>(B_.size()); }
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    bool has_hessian() const override { return true; }
    Matrix hessian(const Vector&) const override { return A_; }

    const Matrix& A() const { return A_; }
    const Vector& B() const { return B_; }
    double C() const { return C_; }

private:
    Matrix A_;
    Vector B_;
    double C_;
};

struct LogisticDataset {
    Matrix features;  // l x d, one sample per row
    Vector labels;    // l entries in {0,1}
    double lambda = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Mean binary cross-entropy over the samples plus lambda/2 ||x||^2.
class LogisticObjective final : public SubObjective {
public:
    explicit LogisticObjective(LogisticDataset data);
    int dim() const override { return static_cast<int>(data_.features.cols()); }
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    bool has_hessian() const override { return true; }
    Matrix hessian(const Vector& x) const override;

    const LogisticDataset& data() const { return data_; }

private:
    LogisticDataset data_;
};

// Ordered collection of m sub-objectives sharing dimension n.
class SeparableProblem {
public:
    SeparableProblem() = default;
    explicit SeparableProblem(std::vector<SubObjectivePtr> parts);

    std::size_t m() const { return parts_.size(); }
    int n() const { return n_; }
    const SubObjective& operator[](std::size_t i) const { return *parts_[i]; }
    const std::vector<SubObjectivePtr>& parts() const { return parts_; }
    bool has_hessian() const;

    // Sums evaluated in fixed agent order.
    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;

private:
    std::vector<SubObjectivePtr> parts_;
    int n_ = 0;
};

SubObjectivePtr make_quadratic(const Matrix& A, const Vector& B, double C);
SubObjectivePtr make_logistic(const LogisticDataset& data);

// Planted-separator Gaussian data with 5% label flips; deterministic per seed.
std::vector<LogisticDataset> synth_logistic_data(int m, int l, int d, std::uint64_t seed, double lambda = 1e-2);

// Random SPD quadratic blocks: A_i = Q'Q/n + shift*I, B_i ~ N(0,1).
SeparableProblem random_quadratic_problem(int n, int m, std::uint64_t seed);

// Solves (sum A_i) x = -sum B_i; requires every part to be quadratic.
Vector quadratic_minimizer(const SeparableProblem& p);

// Returns the A_i blocks, or throws CapabilityError for non-quadratic parts.
std::vector<Matrix> quadratic_blocks(const SeparableProblem& p);

nlohmann::json dataset_to_json(const LogisticDataset& d);
LogisticDataset dataset_from_json(const nlohmann::json& j);

}  // namespace ecado
