#include "mtbandit/benchmarks.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mtbandit {

RkhsObjective rkhs_objective_from(const MultiTaskKernel& kernel, PointList anchors, Eigen::MatrixXd coefficients,
                                  PointList grid, double noise_sigma) {
    const Index n = kernel.tasks();
    if (coefficients.rows() != n || coefficients.cols() != static_cast<Index>(anchors.size())) {
        throw InvalidInput("rkhs objective: coefficient matrix must be n x anchors");
    }
    RkhsObjective out;
    out.anchors = std::move(anchors);
    out.coefficients = std::move(coefficients);

    Eigen::VectorXd c(out.coefficients.size());
    for (Index i = 0; i < out.coefficients.cols(); ++i) c.segment(i * n, n) = out.coefficients.col(i);
    const double norm2 = out.anchors.empty() ? 0.0 : c.dot(block_kernel_matrix(kernel, out.anchors) * c);
    out.rkhs_norm = std::sqrt(std::max(norm2, 0.0));

    Objective f = [kernel, anchors = out.anchors, coef = out.coefficients](const Point& x) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(kernel.tasks());
        for (std::size_t i = 0; i < anchors.size(); ++i) v.noalias() += kernel(x, anchors[i]) * coef.col(static_cast<Index>(i));
        return v;
    };
    out.env = Environment::tabulate("rkhs", std::move(f), std::move(grid), noise_sigma, Eigen::VectorXd::Zero(1),
                                    Eigen::VectorXd::Ones(1));
    out.b = out.env.values.colwise().norm().maxCoeff() / kernel.kappa();
    return out;
}

RkhsObjective make_rkhs_objective(const MultiTaskKernel& kernel, Rng& rng, std::size_t anchors, double noise_sigma) {
    PointList grid = interval_grid(0.0, 1.0, 101);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    PointList chosen;
    chosen.reserve(anchors);
    for (std::size_t i = 0; i < anchors; ++i) chosen.push_back(grid[pick(rng)]);
    Eigen::MatrixXd c(kernel.tasks(), static_cast<Index>(anchors));
    for (Index j = 0; j < c.cols(); ++j) {
        for (Index i = 0; i < c.rows(); ++i) c(i, j) = coef(rng);
    }
    return rkhs_objective_from(kernel, std::move(chosen), std::move(c), std::move(grid), noise_sigma);
}

Eigen::MatrixXd default_sine_weights() {
    Eigen::MatrixXd w(4, 3);
    w << 1.0, 0.0, 0.0,
         0.0, 1.0, 0.0,
         0.0, 0.0, 1.0,
         0.5, 0.5, 0.5;
    return w;
}

Environment make_perturbed_sine(const Eigen::MatrixXd& weights, double noise_sigma) {
    if (weights.cols() != 3 || weights.rows() < 1) throw InvalidInput("perturbed sine: weights must be n x 3");
    Objective f = [weights](const Point& x) {
        static constexpr double centres[3] = {0.05, 0.4, 0.7};
        constexpr double width = 0.1;
        Eigen::Vector3d bumps;
        for (int j = 0; j < 3; ++j) {
            const double d = x(0) - centres[j];
            bumps(j) = std::exp(-d * d / (2.0 * width * width));
        }
        const double common = std::sin(2.0 * std::numbers::pi * x(0));
        return Eigen::VectorXd((common + 0.6 * (weights * bumps).array()).matrix());
    };
    return Environment::tabulate("perturbed_sine", std::move(f), interval_grid(0.0, 1.0, 101), noise_sigma,
                                 Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
}

double branin(double x1, double x2) {
    constexpr double pi = std::numbers::pi;
    constexpr double a = 1.0;
    constexpr double b = 5.1 / (4.0 * pi * pi);
    constexpr double c = 5.0 / pi;
    constexpr double r = 6.0;
    constexpr double s = 10.0;
    constexpr double t = 1.0 / (8.0 * pi);
    const double inner = x2 - b * x1 * x1 + c * x1 - r;
    return a * inner * inner + s * (1.0 - t) * std::cos(x1) + s;
}

Environment make_shifted_branin(Index tasks, std::size_t per_axis, double noise_sigma) {
    if (tasks < 1) throw InvalidInput("shifted branin: need at least one task");
    const Eigen::Vector2d lo(-5.0, 0.0);
    const Eigen::Vector2d hi(10.0, 15.0);
    Objective f = [tasks, lo, hi](const Point& x) {
        const Eigen::Vector2d range = hi - lo;
        Eigen::VectorXd out(tasks);
        for (Index i = 0; i < tasks; ++i) {
            const Eigen::Vector2d shifted =
                (x.head<2>() + 0.01 * static_cast<double>(i) * range).cwiseMax(lo).cwiseMin(hi);
            out(i) = -branin(shifted(0), shifted(1)) / 100.0;
        }
        return out;
    };
    return Environment::tabulate("shifted_branin", std::move(f), rectangle_grid(lo, hi, per_axis), noise_sigma, lo, hi);
}

std::vector<std::size_t> pareto_front(const Eigen::MatrixXd& values) {
    const Index count = values.cols();
    std::vector<std::size_t> front;
    for (Index i = 0; i < count; ++i) {
        bool dominated = false;
        for (Index j = 0; j < count && !dominated; ++j) {
            if (j == i) continue;
            dominated = (values.col(j).array() >= values.col(i).array()).all() &&
                        (values.col(j).array() > values.col(i).array()).any();
        }
        if (!dominated) front.push_back(static_cast<std::size_t>(i));
    }
    return front;
}

ScalarizedOptimum scalarized_optimum(const Eigen::MatrixXd& values, const Scalarization& spec,
                                     const Eigen::VectorXd& lambda) {
    if (values.cols() == 0) throw InvalidInput("scalarized_optimum: empty grid");
    const Eigen::VectorXd s = scalarize_columns(spec, lambda, values);
    ScalarizedOptimum best{s(0), 0};
    double best_sum = values.col(0).sum();
    for (Index j = 1; j < s.size(); ++j) {
        const double sum = values.col(j).sum();
        if (s(j) > best.value || (s(j) == best.value && sum > best_sum)) {
            best = {s(j), static_cast<std::size_t>(j)};
            best_sum = sum;
        }
    }
    return best;
}

Eigen::VectorXd cumulative_regret(const Eigen::VectorXd& instantaneous) {
    Eigen::VectorXd out(instantaneous.size());
    double acc = 0.0;
    for (Index i = 0; i < instantaneous.size(); ++i) out(i) = (acc += instantaneous(i));
    return out;
}

Eigen::MatrixXd draw_weights(const WeightDistribution& dist, std::size_t count, Rng& rng) {
    Eigen::MatrixXd out(dist.tasks, static_cast<Index>(count));
    for (Index j = 0; j < out.cols(); ++j) out.col(j) = sample_weight(dist, rng);
    return out;
}

Eigen::VectorXd bayes_regret(const std::vector<std::size_t>& played, const Eigen::MatrixXd& values,
                             const Scalarization& spec, const Eigen::MatrixXd& lambdas,
                             const std::vector<std::size_t>& checkpoints) {
    const Index draws = lambdas.cols();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Index>(checkpoints.size()));
    if (draws == 0) return out;
    // scores(j, k): s_{lambda_k}(f(grid_j))
    Eigen::MatrixXd scores(values.cols(), draws);
    Eigen::VectorXd optimum(draws);
    for (Index k = 0; k < draws; ++k) {
        scores.col(k) = scalarize_columns(spec, lambdas.col(k), values);
        optimum(k) = scores.col(k).maxCoeff();
    }
    Eigen::VectorXd best = Eigen::VectorXd::Constant(draws, -std::numeric_limits<double>::infinity());
    std::size_t consumed = 0;
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const std::size_t upto = std::min(checkpoints[c], played.size());
        for (; consumed < upto; ++consumed) {
            if (played[consumed] >= static_cast<std::size_t>(values.cols())) {
                throw InvalidInput("bayes_regret: played index outside the grid");
            }
            best = best.cwiseMax(scores.row(static_cast<Index>(played[consumed])).transpose());
        }
        if (upto == 0) {
            out(static_cast<Index>(c)) = std::numeric_limits<double>::quiet_NaN();
        } else {
            out(static_cast<Index>(c)) = (optimum - best).mean();
        }
    }
    return out;
}

}  // namespace mtbandit
