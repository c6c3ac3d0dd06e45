// Synthetic panel generators used in place of proprietary market data.
#pragma once

#include <cstdint>
#include <string>

#include "scorebench/panel.hpp"

namespace scorebench {

enum class GeneratorKind { Gaussian, TCopulaGarch, Regime };

GeneratorKind generator_kind_from_name(const std::string& name);
const char* generator_kind_name(GeneratorKind kind);

// All generators produce zero-mean daily return/change panels (weekday dates)
// and are pure functions of (spec, T, d, seed).
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::Gaussian;
    double vol = 0.01;   // per-column unconditional standard deviation
    double rho = 0.3;    // equicorrelation of innovations

    // t-copula-garch: vanilla GARCH(1,1) variance recursion with correlated
    // multivariate-t innovations; omega is derived so the unconditional
    // variance equals vol^2.
    double garch_alpha = 0.08;
    double garch_beta = 0.90;
    double t_df = 7.0;

    // regime: two-state volatility switching with Gaussian innovations.
    double high_vol_factor = 3.0;
    double switch_prob = 0.02;

    Date start_date{1999, 1, 4};
};

SeriesPanel generate_synthetic_panel(const GeneratorSpec& spec, int T, int d, std::uint64_t seed);

}  // namespace scorebench
