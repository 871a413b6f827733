#pragma once

#include <string>

#include "mtbandit/errors.hpp"
#include "mtbandit/types.hpp"

namespace mtbandit {

enum class ScalarizationKind { Linear, Chebyshev };

/// s_lambda(y): linear lambda^T y, or Chebyshev min_i lambda_i (y_i - z_i).
struct Scalarization {
    ScalarizationKind kind = ScalarizationKind::Linear;
    /// Chebyshev reference point; empty means the zero vector.
    Eigen::VectorXd reference;

    static Scalarization linear() { return {ScalarizationKind::Linear, {}}; }
    static Scalarization chebyshev(Eigen::VectorXd z = {}) { return {ScalarizationKind::Chebyshev, std::move(z)}; }

    /// Bound on L_lambda over the whole simplex; 1 for both kinds.
    static constexpr double global_lipschitz() { return 1.0; }
};

std::string to_string(ScalarizationKind kind);
ScalarizationKind scalarization_from_string(const std::string& name);

double scalarize(const Scalarization& spec, const Eigen::VectorXd& lambda, const Eigen::VectorXd& y);

/// Row of s_lambda values for every column of a n x N matrix.
Eigen::VectorXd scalarize_columns(const Scalarization& spec, const Eigen::VectorXd& lambda, const Eigen::MatrixXd& ys);

/// L_lambda: ||lambda||_2 for linear, max_i lambda_i for Chebyshev.
double lipschitz_constant(const Scalarization& spec, const Eigen::VectorXd& lambda);

enum class WeightDistributionKind { UniformSimplex, InverseWeighted };

std::string to_string(WeightDistributionKind kind);
WeightDistributionKind weight_distribution_from_string(const std::string& name);

struct WeightDistribution {
    WeightDistributionKind kind = WeightDistributionKind::InverseWeighted;
    Index tasks = 1;
};

/// Maps u in (0, 1]^n to a weight: u / ||u||_1, or alpha / ||alpha||_1 with alpha_i = ||u||_1 / u_i.
Eigen::VectorXd weight_from_uniform(WeightDistributionKind kind, const Eigen::VectorXd& u);

/// Draws lambda from the simplex. Coordinates of u below 1e-12 cause a redraw;
/// after 100 rejected draws the uniform weight 1/n is returned.
Eigen::VectorXd sample_weight(const WeightDistribution& dist, Rng& rng);

}  // namespace mtbandit
