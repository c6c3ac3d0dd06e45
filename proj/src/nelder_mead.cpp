#include "scorebench/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scorebench {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const NelderMeadOptions& options) {
    const int n = static_cast<int>(x0.size());
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    for (int i = 0; i < n; ++i)
        pts[i + 1](i) += options.initial_step * std::max(std::abs(x0(i)), 1.0);

    std::vector<double> vals(n + 1);
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<int> order(n + 1);
    std::iota(order.begin(), order.end(), 0);

    NelderMeadResult result;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        int best = order[0], worst = order[n], second = order[n - 1];

        if (std::isfinite(vals[best]) && std::isfinite(vals[second]) &&
            std::abs(vals[second] - vals[best]) <=
                options.tolerance * (1.0 + std::abs(vals[best]))) {
            double spread = std::abs(vals[worst] - vals[best]);
            if (spread <= options.tolerance * (1.0 + std::abs(vals[best]))) {
                result.converged = true;
                break;
            }
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += pts[i];
        centroid /= static_cast<double>(n);

        Eigen::VectorXd reflected = centroid + alpha * (centroid - pts[worst]);
        double fr = eval(reflected);
        if (fr < vals[order[0]]) {
            Eigen::VectorXd expanded = centroid + gamma * (reflected - centroid);
            double fe = eval(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
        } else if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
        } else {
            Eigen::VectorXd contracted = centroid + rho * (pts[worst] - centroid);
            double fc = eval(contracted);
            if (fc < vals[worst]) {
                pts[worst] = contracted;
                vals[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    pts[i] = pts[best] + sigma * (pts[i] - pts[best]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }

    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    result.x = pts[order[0]];
    result.value = vals[order[0]];
    result.evaluations = evals;
    return result;
}

NelderMeadResult nelder_mead_multistart(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const std::vector<Eigen::VectorXd>& starts,
                                        const NelderMeadOptions& options) {
    NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto& start : starts) {
        NelderMeadResult r = nelder_mead(f, start, options);
        if (r.value < best.value || best.x.size() == 0) {
            bool keep_converged = best.converged && !(r.value < best.value);
            best = r;
            best.converged = r.converged || keep_converged;
        }
    }
    return best;
}

}  // namespace scorebench
