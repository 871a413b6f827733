#include "mtbandit/theory.hpp"

#include <cmath>

namespace mtbandit {

double realized_gain(const ExactPosterior& state) { return 0.5 * state.logdet_sum(); }

double dense_gain(const MultiTaskKernel& kernel, const PointList& points, double eta) {
    if (points.empty()) return 0.0;
    Eigen::MatrixXd g = block_kernel_matrix(kernel, points) / eta;
    g.diagonal().array() += 1.0;
    return 0.5 * logdet_spd(g);
}

double scalar_realized_gain(const ScalarKernel& k, const PointList& points, double noise) {
    if (points.empty()) return 0.0;
    if (!(noise > 0.0)) throw InvalidInput("scalar_realized_gain: noise must be positive");
    Eigen::MatrixXd g = gram(k, points) / noise;
    g.diagonal().array() += 1.0;
    return 0.5 * logdet_spd(g);
}

Eigen::VectorXd icm_gain_split(const PointList& points, const CouplingMatrix& coupling, const ScalarKernel& k,
                               double eta) {
    const CouplingSpectrum spec = coupling_spectrum(coupling);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.eigenvalues.size());
    for (Index i = 0; i < out.size(); ++i) {
        const double xi = spec.eigenvalues(i);
        if (xi > 0.0) out(i) = scalar_realized_gain(k, points, eta / xi);
    }
    return out;
}

double regret_bound_value(const BoundInputs& in, double gain, std::size_t horizon, double variance_sum) {
    if (horizon == 0) return 0.0;
    const double radius = in.b + in.sigma / std::sqrt(in.eta) * std::sqrt(2.0 * std::log(1.0 / in.delta) + gain);
    return 2.0 * in.lipschitz * radius *
           std::sqrt((1.0 + in.kappa / in.eta) * static_cast<double>(horizon) * std::max(variance_sum, 0.0));
}

double budgeted_regret_bound_value(const BoundInputs& in, double epsilon, double gain, std::size_t horizon,
                                   double variance_sum) {
    if (horizon == 0) return 0.0;
    const double rho = (1.0 + epsilon) / (1.0 - epsilon);
    const double c = 1.0 + 1.0 / std::sqrt(1.0 - epsilon);
    const double radius =
        c * in.b + in.sigma / std::sqrt(in.eta) * std::sqrt(2.0 * (std::log(1.0 / in.delta) + rho * rho * gain));
    return 2.0 * in.lipschitz * radius *
           std::sqrt(rho * (1.0 + in.kappa / in.eta) * static_cast<double>(horizon) * std::max(variance_sum, 0.0));
}

double variance_sum_bound(double kappa, double eta, double scalar_gain) {
    return 2.0 * eta * std::max(kappa, 1.0) * scalar_gain;
}

}  // namespace mtbandit
