#pragma once

#include <functional>
#include <string>

#include "mtbandit/errors.hpp"
#include "mtbandit/types.hpp"

namespace mtbandit {

using Objective = std::function<Eigen::VectorXd(const Point&)>;

/// A noisy vector-valued objective tabulated on a finite candidate grid.
struct Environment {
    std::string name;
    Objective objective;
    PointList grid;
    /// Noiseless f on the grid, n x |grid|.
    Eigen::MatrixXd values;
    double noise_sigma = 0.0;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Index tasks() const { return values.rows(); }
    std::size_t size() const { return grid.size(); }

    /// f(grid[index]) + N(0, sigma^2 I_n) drawn from rng.
    Eigen::VectorXd observe(std::size_t index, Rng& rng) const;

    /// Evaluates the objective on every grid point; throws InvalidInput for an empty grid or non-finite values.
    static Environment tabulate(std::string name, Objective f, PointList grid, double noise_sigma,
                                Eigen::VectorXd lower, Eigen::VectorXd upper);
};

/// `count` evenly spaced points from lo to hi inclusive (count = 101 on [0, 1] gives the 0.01-net).
PointList interval_grid(double lo, double hi, std::size_t count);

/// Cartesian grid over a rectangle, first coordinate varying slowest.
PointList rectangle_grid(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, std::size_t per_axis);

}  // namespace mtbandit
