#pragma once

#include <Eigen/Dense>

namespace mindiv {

// Parameters are at most two-dimensional, so storage stays on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;
using Parameter = Vec;

inline Parameter param(double a) {
    Parameter p(1);
    p << a;
    return p;
}

inline Parameter param(double a, double b) {
    Parameter p(2);
    p << a, b;
    return p;
}

}  // namespace mindiv
