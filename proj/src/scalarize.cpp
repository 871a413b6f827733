#include "mtbandit/scalarize.hpp"

namespace mtbandit {

namespace {

constexpr double kMinUniform = 1e-12;
constexpr int kMaxWeightAttempts = 100;

void check_dims(const Scalarization& spec, const Eigen::VectorXd& lambda, Index n) {
    if (lambda.size() != n) throw InvalidInput("scalarize: weight and output dimensions differ");
    if (spec.kind == ScalarizationKind::Chebyshev && spec.reference.size() != 0 && spec.reference.size() != n) {
        throw InvalidInput("scalarize: reference point has the wrong dimension");
    }
}

}  // namespace

std::string to_string(ScalarizationKind kind) { return kind == ScalarizationKind::Linear ? "linear" : "chebyshev"; }

ScalarizationKind scalarization_from_string(const std::string& name) {
    if (name == "linear") return ScalarizationKind::Linear;
    if (name == "chebyshev") return ScalarizationKind::Chebyshev;
    throw InvalidInput("unknown scalarization '" + name + "'");
}

double scalarize(const Scalarization& spec, const Eigen::VectorXd& lambda, const Eigen::VectorXd& y) {
    check_dims(spec, lambda, y.size());
    if (spec.kind == ScalarizationKind::Linear) return lambda.dot(y);
    if (spec.reference.size() == 0) return lambda.cwiseProduct(y).minCoeff();
    return lambda.cwiseProduct(y - spec.reference).minCoeff();
}

Eigen::VectorXd scalarize_columns(const Scalarization& spec, const Eigen::VectorXd& lambda, const Eigen::MatrixXd& ys) {
    check_dims(spec, lambda, ys.rows());
    if (spec.kind == ScalarizationKind::Linear) return ys.transpose() * lambda;
    Eigen::MatrixXd shifted = ys;
    if (spec.reference.size() != 0) shifted.colwise() -= spec.reference;
    return (lambda.asDiagonal() * shifted).colwise().minCoeff().transpose();
}

double lipschitz_constant(const Scalarization& spec, const Eigen::VectorXd& lambda) {
    return spec.kind == ScalarizationKind::Linear ? lambda.norm() : lambda.maxCoeff();
}

std::string to_string(WeightDistributionKind kind) {
    return kind == WeightDistributionKind::UniformSimplex ? "uniform_simplex" : "inverse_weighted";
}

WeightDistributionKind weight_distribution_from_string(const std::string& name) {
    if (name == "uniform_simplex" || name == "uniform") return WeightDistributionKind::UniformSimplex;
    if (name == "inverse_weighted" || name == "inverse") return WeightDistributionKind::InverseWeighted;
    throw InvalidInput("unknown weight distribution '" + name + "'");
}

Eigen::VectorXd weight_from_uniform(WeightDistributionKind kind, const Eigen::VectorXd& u) {
    if (kind == WeightDistributionKind::UniformSimplex) return u / u.sum();
    const Eigen::VectorXd alpha = u.sum() * u.cwiseInverse();
    return alpha / alpha.sum();
}

Eigen::VectorXd sample_weight(const WeightDistribution& dist, Rng& rng) {
    if (dist.tasks < 1) throw InvalidInput("sample_weight: need at least one task");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd u(dist.tasks);
    for (int attempt = 0; attempt < kMaxWeightAttempts; ++attempt) {
        for (Index i = 0; i < dist.tasks; ++i) u(i) = unif(rng);
        if (u.minCoeff() >= kMinUniform) return weight_from_uniform(dist.kind, u);
    }
    return Eigen::VectorXd::Constant(dist.tasks, 1.0 / static_cast<double>(dist.tasks));
}

}  // namespace mtbandit
