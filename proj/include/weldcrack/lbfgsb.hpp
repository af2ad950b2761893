#pragma once

#include <functional>
#include <vector>

namespace weldcrack {

using ScalarObjective = std::function<double(const std::vector<double>&)>;

struct LbfgsbConfig {
    int max_iterations = 5000;
    double grad_tol = 1e-8;   // infinity norm of the projected gradient
    int memory = 10;          // stored curvature pairs
    double fd_step = 1e-6;    // central finite-difference step
};

struct LbfgsbResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;   // stopped on the gradient criterion
};

/// Central finite-difference gradient of f at x, clipped to the box.
std::vector<double> fd_gradient(const ScalarObjective& f, const std::vector<double>& x,
                                const std::vector<double>& lo, const std::vector<double>& hi,
                                double step);

/// Box-constrained limited-memory quasi-Newton descent: L-BFGS directions
/// with projection onto the box and an Armijo backtracking line search.
/// Every point handed to the objective lies inside [lo, hi].
LbfgsbResult lbfgsb_minimize(const ScalarObjective& f, const std::vector<double>& x0,
                             const std::vector<double>& lo, const std::vector<double>& hi,
                             const LbfgsbConfig& cfg = {});

}  // namespace weldcrack
