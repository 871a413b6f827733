#include "mtbandit/environment.hpp"

namespace mtbandit {

Eigen::VectorXd Environment::observe(std::size_t index, Rng& rng) const {
    if (index >= grid.size()) throw InvalidInput("observe: grid index out of range");
    Eigen::VectorXd y = values.col(static_cast<Index>(index));
    if (noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_sigma);
        for (Index i = 0; i < y.size(); ++i) y(i) += noise(rng);
    }
    return y;
}

Environment Environment::tabulate(std::string name, Objective f, PointList grid, double noise_sigma,
                                  Eigen::VectorXd lower, Eigen::VectorXd upper) {
    if (grid.empty()) throw InvalidInput("environment: empty candidate grid");
    if (!(noise_sigma >= 0.0)) throw InvalidInput("environment: noise sigma must be nonnegative");
    Environment env;
    env.name = std::move(name);
    const Eigen::VectorXd first = f(grid.front());
    env.values.resize(first.size(), static_cast<Index>(grid.size()));
    env.values.col(0) = first;
    for (std::size_t j = 1; j < grid.size(); ++j) {
        const Eigen::VectorXd v = f(grid[j]);
        if (v.size() != first.size()) throw InvalidInput("environment: objective changed output dimension");
        env.values.col(static_cast<Index>(j)) = v;
    }
    if (!env.values.allFinite()) throw InvalidInput("environment: objective is not finite on the grid");
    env.objective = std::move(f);
    env.grid = std::move(grid);
    env.noise_sigma = noise_sigma;
    env.lower = std::move(lower);
    env.upper = std::move(upper);
    return env;
}

PointList interval_grid(double lo, double hi, std::size_t count) {
    if (count < 2) throw InvalidInput("interval_grid: need at least two points");
    PointList out;
    out.reserve(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        // The last point is pinned so that hi is hit exactly.
        const double v = i + 1 == count ? hi : lo + step * static_cast<double>(i);
        out.push_back(Eigen::VectorXd::Constant(1, v));
    }
    return out;
}

PointList rectangle_grid(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, std::size_t per_axis) {
    const PointList xs = interval_grid(lo(0), hi(0), per_axis);
    const PointList ys = interval_grid(lo(1), hi(1), per_axis);
    PointList out;
    out.reserve(per_axis * per_axis);
    for (const auto& a : xs) {
        for (const auto& b : ys) out.push_back(Eigen::Vector2d(a(0), b(0)));
    }
    return out;
}

}  // namespace mtbandit
