// Derivative-free Nelder-Mead simplex minimizer with deterministic restarts.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace scorebench {

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    double tolerance = 1e-8;     // spread of simplex values at termination
    int max_iterations = 2000;   // per start
    double initial_step = 0.1;   // simplex edge relative to parameter scale
};

// Minimizes f starting from x0; the initial simplex perturbs each coordinate
// by initial_step * max(|x0_i|, 1). f may return +inf to encode a constraint
// penalty.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const NelderMeadOptions& options = {});

// Runs nelder_mead from each start and keeps the best final value.
NelderMeadResult nelder_mead_multistart(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const std::vector<Eigen::VectorXd>& starts,
                                        const NelderMeadOptions& options = {});

}  // namespace scorebench
