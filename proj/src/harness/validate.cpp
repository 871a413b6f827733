#include "mtbandit/harness/validate.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "mtbandit/linalg.hpp"
#include "mtbandit/nystrom.hpp"

namespace mtbandit::harness {

namespace {

struct Instance {
    MultiTaskKernel kernel;
    PointList points;
    std::vector<Eigen::VectorXd> outputs;
};

Point uniform_point(Rng& rng, Index dim) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point p(dim);
    for (Index i = 0; i < dim; ++i) p(i) = u(rng);
    return p;
}

PointList uniform_points(Rng& rng, std::size_t count, Index dim) {
    PointList out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(uniform_point(rng, dim));
    return out;
}

// Even instances are ICM, odd ones a two-term sum of separable kernels.
Instance random_instance(Rng& rng, std::size_t k, Index tasks, std::size_t steps, bool force_icm = false) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> ell(0.15, 0.5);
    const ScalarKernel a{KernelFamily::SquaredExponential, ell(rng)};
    std::optional<MultiTaskKernel> kernel;
    if (force_icm || k % 2 == 0) {
        kernel = MultiTaskKernel::icm(a, CouplingMatrix::random_gram(tasks, rng));
    } else {
        const ScalarKernel b{KernelFamily::Matern52, ell(rng)};
        kernel = MultiTaskKernel::sum_separable(
            {{a, CouplingMatrix::random_gram(tasks, rng)}, {b, CouplingMatrix::random_gram(tasks, rng)}});
    }
    Instance inst{*kernel, uniform_points(rng, steps, 1), {}};
    for (std::size_t s = 0; s < steps; ++s) {
        Eigen::VectorXd y(tasks);
        for (Index i = 0; i < tasks; ++i) y(i) = normal(rng);
        inst.outputs.push_back(y);
    }
    return inst;
}

Index tasks_for(std::size_t k) { return static_cast<Index>(1 + k % 4); }

double dense_logdet(const MultiTaskKernel& kernel, const PointList& points, double eta) {
    Eigen::MatrixXd g = block_kernel_matrix(kernel, points) / eta;
    g.diagonal().array() += 1.0;
    return logdet_spd(g);
}

SuiteResult finish(std::string name, double max_error, double tolerance, std::size_t checks) {
    return {std::move(name), max_error <= tolerance, max_error, tolerance, checks};
}

CovarianceFn covariance_or_default(const ValidateOptions& o) {
    if (o.covariance) return o.covariance;
    return [](const ExactPosterior& s, const Point& x) { return s.cov(x); };
}

}  // namespace

Eigen::MatrixXd dense_posterior_cov(const MultiTaskKernel& kernel, const PointList& points, double eta,
                                    const Point& x, double sign) {
    Eigen::MatrixXd prior = kernel(x, x);
    if (points.empty()) return prior;
    Eigen::MatrixXd g = block_kernel_matrix(kernel, points);
    g.diagonal().array() += eta;
    const Eigen::MatrixXd c = cross_block(kernel, points, x);
    return symmetrized(prior - sign * c.transpose() * g.llt().solve(c));
}

SuiteResult schur_telescoping(const ValidateOptions& o) {
    Rng rng(o.seed);
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t k = 0; k < o.instances; ++k) {
        const std::size_t steps = 10 + (k * 7) % 21;  // 10..30
        const Instance inst = random_instance(rng, k, tasks_for(k), steps);
        ExactPosterior state(inst.kernel, o.eta, false);
        for (std::size_t s = 0; s < steps; ++s) state.update(inst.points[s], inst.outputs[s]);
        const double dense = dense_logdet(inst.kernel, inst.points, o.eta);
        worst = std::max(worst, std::abs(state.logdet_sum() - dense) / (1.0 + std::abs(dense)));
        ++checks;
    }
    return finish("schur_telescoping", worst, 1e-6, checks);
}

SuiteResult trace_inequality(const ValidateOptions& o) {
    Rng rng(o.seed);
    const CovarianceFn cov = covariance_or_default(o);
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t k = 0; k < o.instances; ++k) {
        const std::size_t steps = 10 + (k * 7) % 21;
        const Instance inst = random_instance(rng, k, tasks_for(k), steps);
        ExactPosterior state(inst.kernel, o.eta, false);
        double lhs = 0.0;
        for (std::size_t s = 0; s < steps; ++s) {
            state.update(inst.points[s], inst.outputs[s]);
            lhs += cov(state, inst.points[s]).trace() / o.eta;
        }
        worst = std::max(worst, lhs - dense_logdet(inst.kernel, inst.points, o.eta));
        ++checks;
    }
    return finish("trace_inequality", std::max(worst, 0.0), 1e-8, checks);
}

SuiteResult variance_geometry(const ValidateOptions& o) {
    Rng rng(o.seed);
    const CovarianceFn cov = covariance_or_default(o);
    constexpr std::size_t kSteps = 30, kQueries = 20;
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t k = 0; k < o.instances; ++k) {
        const Instance inst = random_instance(rng, k, tasks_for(k), kSteps);
        const PointList queries = uniform_points(rng, kQueries, 1);
        const double factor = 1.0 + inst.kernel.kappa() / o.eta;
        ExactPosterior state(inst.kernel, o.eta, false);
        std::vector<Eigen::MatrixXd> before;
        for (const auto& q : queries) before.push_back(cov(state, q));
        for (std::size_t s = 0; s < kSteps; ++s) {
            state.update(inst.points[s], inst.outputs[s]);
            for (std::size_t j = 0; j < kQueries; ++j) {
                Eigen::MatrixXd now = cov(state, queries[j]);
                worst = std::max(worst, -min_eigenvalue(before[j] - now));
                worst = std::max(worst, -min_eigenvalue(factor * now - before[j]));
                before[j] = std::move(now);
                checks += 2;
            }
        }
    }
    return finish("variance_geometry", worst, 1e-9, checks);
}

SuiteResult icm_equivalence(const ValidateOptions& o) {
    Rng rng(o.seed);
    constexpr std::size_t kSteps = 25, kQueries = 200;
    const std::size_t instances = std::max<std::size_t>(1, o.instances / 4);
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t k = 0; k < instances; ++k) {
        const Instance inst = random_instance(rng, k, 3, kSteps, true);
        ExactPosterior state(inst.kernel, o.eta, true);
        for (std::size_t s = 0; s < kSteps; ++s) state.update(inst.points[s], inst.outputs[s]);
        const PointList queries = uniform_points(rng, kQueries, 1);
        const Prediction fast = state.predict(queries);
        const Prediction slow = state.predict_general(queries);
        for (std::size_t j = 0; j < kQueries; ++j) {
            const auto c = static_cast<Index>(j);
            worst = std::max(worst, (fast.mean.col(c) - slow.mean.col(c)).norm());
            worst = std::max(worst, std::abs(fast.cov_norm(c) - slow.cov_norm(c)));
            ++checks;
        }
    }
    return finish("icm_equivalence", worst, 1e-8, checks);
}

SuiteResult full_dictionary_exactness(const ValidateOptions& o) {
    Rng rng(o.seed);
    constexpr std::size_t kSteps = 25, kQueries = 100;
    const std::size_t instances = std::max<std::size_t>(1, o.instances / 4);
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t k = 0; k < instances; ++k) {
        const Instance inst = random_instance(rng, k, tasks_for(k + 1), kSteps);
        ExactPosterior exact(inst.kernel, o.eta, false);
        std::vector<NystromPosterior> approx;
        approx.emplace_back(inst.kernel, o.eta, 1.0, o.seed, NystromMode::General);
        if (inst.kernel.is_icm()) approx.emplace_back(inst.kernel, o.eta, 1.0, o.seed, NystromMode::IcmFast);
        for (std::size_t s = 0; s < kSteps; ++s) {
            exact.update(inst.points[s], inst.outputs[s]);
            for (auto& m : approx) m.update(inst.points[s], inst.outputs[s], Dictionary::full(s + 1));
        }
        for (const auto& q : uniform_points(rng, kQueries, 1)) {
            const Eigen::VectorXd mu = exact.mean(q);
            const Eigen::MatrixXd gamma = exact.cov(q);
            for (const auto& m : approx) {
                worst = std::max(worst, (m.mean(q) - mu).norm());
                worst = std::max(worst, (m.cov(q) - gamma).norm());
                ++checks;
            }
        }
    }
    return finish("full_dictionary_exactness", worst, 1e-6, checks);
}

std::vector<SuiteResult> run_all_suites(const ValidateOptions& o) {
    return {schur_telescoping(o), trace_inequality(o), variance_geometry(o), icm_equivalence(o),
            full_dictionary_exactness(o)};
}

std::string format_report(const std::vector<SuiteResult>& results) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %-6s %12s %12s %8s\n", "suite", "result", "max_error", "tolerance",
                  "checks");
    out += line;
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "%-28s %-6s %12.3e %12.3e %8zu\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                      r.max_error, r.tolerance, r.checks);
        out += line;
    }
    return out;
}

}  // namespace mtbandit::harness
