#include "scorebench/synthetic.hpp"

#include <cmath>

#include "scorebench/errors.hpp"
#include "scorebench/linalg.hpp"
#include "scorebench/rng.hpp"

namespace scorebench {

GeneratorKind generator_kind_from_name(const std::string& name) {
    if (name == "gaussian") return GeneratorKind::Gaussian;
    if (name == "t-copula-garch") return GeneratorKind::TCopulaGarch;
    if (name == "regime") return GeneratorKind::Regime;
    fail(Err::ConfigError, "unknown generator '" + name + "'");
}

const char* generator_kind_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::Gaussian: return "gaussian";
        case GeneratorKind::TCopulaGarch: return "t-copula-garch";
        case GeneratorKind::Regime: return "regime";
    }
    return "unknown";
}

SeriesPanel generate_synthetic_panel(const GeneratorSpec& spec, int T, int d,
                                     std::uint64_t seed) {
    if (T < 1) fail(Err::ConfigError, "generate_synthetic_panel: T must be >= 1");
    if (d < 2) fail(Err::ConfigError, "generate_synthetic_panel: d must be >= 2");
    if (spec.vol <= 0.0) fail(Err::ConfigError, "generate_synthetic_panel: vol must be > 0");
    if (spec.rho <= -1.0 / (d - 1) || spec.rho >= 1.0)
        fail(Err::ConfigError, "generate_synthetic_panel: rho outside valid equicorrelation range");

    SeriesPanel panel;
    panel.kind = PanelKind::LogReturns;
    panel.values.resize(T, d);
    panel.dates.reserve(static_cast<std::size_t>(T));
    Date date = spec.start_date;
    if (date.weekday() >= 5) date = next_weekday(date);
    for (int t = 0; t < T; ++t) {
        panel.dates.push_back(date);
        date = next_weekday(date);
    }
    for (int c = 0; c < d; ++c) panel.labels.push_back("X" + std::to_string(c + 1));

    Eigen::MatrixXd chol = safe_cholesky(equicorrelation(d, spec.rho));
    Rng rng(seed_combine(seed, generator_kind_name(spec.kind)));
    Eigen::VectorXd raw(d);

    switch (spec.kind) {
        case GeneratorKind::Gaussian: {
            for (int t = 0; t < T; ++t) {
                for (int c = 0; c < d; ++c) raw(c) = rng.normal();
                panel.values.row(t) = (spec.vol * (chol * raw)).transpose();
            }
            break;
        }
        case GeneratorKind::TCopulaGarch: {
            double alpha = spec.garch_alpha;
            double beta = spec.garch_beta;
            if (alpha < 0.0 || beta < 0.0 || alpha + beta >= 1.0)
                fail(Err::ConfigError, "t-copula-garch: need alpha, beta >= 0 and alpha+beta < 1");
            double nu = spec.t_df;
            if (nu <= 2.0) fail(Err::ConfigError, "t-copula-garch: t_df must exceed 2");
            double target_var = spec.vol * spec.vol;
            double omega = target_var * (1.0 - alpha - beta);
            // Multivariate-t innovations with unit marginal variances: a
            // common chi-square mixes a correlated Gaussian vector.
            Eigen::VectorXd sigma2 = Eigen::VectorXd::Constant(d, target_var);
            Eigen::VectorXd z(d);
            for (int t = 0; t < T; ++t) {
                for (int c = 0; c < d; ++c) raw(c) = rng.normal();
                double chi2 = 2.0 * rng.gamma(0.5 * nu);
                double mix = std::sqrt(nu / chi2) * std::sqrt((nu - 2.0) / nu);
                z = mix * (chol * raw);
                for (int c = 0; c < d; ++c) {
                    double eps = std::sqrt(sigma2(c)) * z(c);
                    panel.values(t, c) = eps;
                    sigma2(c) = omega + alpha * eps * eps + beta * sigma2(c);
                }
            }
            break;
        }
        case GeneratorKind::Regime: {
            if (spec.high_vol_factor <= 0.0 || spec.switch_prob < 0.0 || spec.switch_prob > 1.0)
                fail(Err::ConfigError, "regime: invalid high_vol_factor or switch_prob");
            int state = 0;
            for (int t = 0; t < T; ++t) {
                if (rng.uniform() < spec.switch_prob) state = 1 - state;
                double vol = state == 0 ? spec.vol : spec.vol * spec.high_vol_factor;
                for (int c = 0; c < d; ++c) raw(c) = rng.normal();
                panel.values.row(t) = (vol * (chol * raw)).transpose();
            }
            break;
        }
    }
    return panel;
}

}  // namespace scorebench
