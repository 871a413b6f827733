#pragma once

#include <gtest/gtest.h>

#include "mtbandit/kernels.hpp"

namespace mtbandit::testing {

inline Point pt(double v) { return Point::Constant(1, v); }

inline PointList pts(std::initializer_list<double> vs) {
    PointList out;
    for (double v : vs) out.push_back(pt(v));
    return out;
}

inline Eigen::VectorXd vec(std::initializer_list<double> vs) {
    Eigen::VectorXd out(static_cast<Index>(vs.size()));
    Index i = 0;
    for (double v : vs) out(i++) = v;
    return out;
}

inline Eigen::MatrixXd mat2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

// Shared small problem: 2 tasks, three observations.
inline MultiTaskKernel small_icm() {
    return MultiTaskKernel::icm({KernelFamily::SquaredExponential, 0.2}, CouplingMatrix(mat2(1, 0.5, 0.5, 1)));
}

inline MultiTaskKernel small_sum() {
    return MultiTaskKernel::sum_separable({{{KernelFamily::SquaredExponential, 0.2}, CouplingMatrix(mat2(1, 0.5, 0.5, 1))},
                                           {{KernelFamily::Matern52, 0.3}, CouplingMatrix(mat2(0.5, 0, 0, 2))}});
}

inline PointList small_points() { return pts({0.1, 0.4, 0.75}); }

inline std::vector<Eigen::VectorXd> small_outputs() {
    return {vec({0.3, -0.2}), vec({1.0, 0.5}), vec({-0.4, 0.8})};
}

}  // namespace mtbandit::testing
