#include <cmath>

#include "scorebench/errors.hpp"
#include "scorebench/models.hpp"

namespace scorebench {

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "edf") return ModelKind::EdfCopula;
    if (name == "fq-al") return ModelKind::FqAL;
    if (name == "fq-ab") return ModelKind::FqAB;
    if (name == "ccc-garch") return ModelKind::CccGarch;
    if (name == "dcc-garch") return ModelKind::DccGarch;
    fail(Err::ConfigError, "unknown model kind '" + name + "'");
}

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::EdfCopula: return "edf";
        case ModelKind::FqAL: return "fq-al";
        case ModelKind::FqAB: return "fq-ab";
        case ModelKind::CccGarch: return "ccc-garch";
        case ModelKind::DccGarch: return "dcc-garch";
    }
    return "unknown";
}

std::vector<ModelSpec> default_roster() {
    std::vector<ModelSpec> roster;
    auto add = [&](ModelKind kind, const std::string& name, int window, int factors, int bags) {
        ModelSpec spec;
        spec.kind = kind;
        spec.name = name;
        spec.window = window;
        spec.factors = factors;
        spec.bags = bags;
        roster.push_back(spec);
    };
    add(ModelKind::EdfCopula, "EDF-C-250", 250, 0, 0);
    add(ModelKind::EdfCopula, "EDF-C-2000", 2000, 0, 0);
    add(ModelKind::FqAL, "FQ-AL-250", 250, 1, 0);
    add(ModelKind::FqAL, "FQ-AL-2000", 2000, 1, 0);
    add(ModelKind::FqAB, "FQ-AB-250", 250, 2, 50);
    add(ModelKind::FqAB, "FQ-AB-2000", 2000, 2, 50);
    add(ModelKind::CccGarch, "CCC-GARCH", 2000, 0, 0);
    add(ModelKind::DccGarch, "DCC-GARCH", 2000, 0, 0);
    return roster;
}

CalibratedModel fit_model(const ModelSpec& spec, const CalibrationWindow& window,
                          std::uint64_t fit_seed) {
    if (window.values.rows() != spec.window)
        fail(Err::InsufficientWindow, "model '" + spec.name + "' expects a " +
                                          std::to_string(spec.window) + "-row window, got " +
                                          std::to_string(window.values.rows()));
    CalibratedModel model;
    model.model_id = spec.name;
    model.window_end = window.end_date;
    model.fit_seed = fit_seed;
    switch (spec.kind) {
        case ModelKind::EdfCopula:
            model.impl = fit_edf_copula(window);
            break;
        case ModelKind::FqAL:
        case ModelKind::FqAB: {
            FqOptions options;
            options.variant = spec.kind == ModelKind::FqAL ? FqVariant::AL : FqVariant::AB;
            options.factor_count = spec.factors;
            options.quantiles = spec.quantiles;
            options.bags = spec.bags;
            model.impl = fit_fq(window, options, fit_seed);
            break;
        }
        case ModelKind::CccGarch:
            model.impl = fit_mv_garch(window, MvGarchKind::CCC);
            break;
        case ModelKind::DccGarch:
            model.impl = fit_mv_garch(window, MvGarchKind::DCC);
            break;
    }
    return model;
}

Eigen::MatrixXd sample_model(const CalibratedModel& model, int n_draws, std::uint64_t rng_seed) {
    return std::visit(
        [&](const auto& impl) -> Eigen::MatrixXd {
            using T = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<T, EdfCopulaModel>)
                return sample_edf_copula(impl, n_draws, rng_seed);
            else if constexpr (std::is_same_v<T, FqModel>)
                return sample_fq(impl, n_draws, rng_seed);
            else
                return sample_mv_garch(impl, n_draws, rng_seed);
        },
        model.impl);
}

// ---------------------------------------------------------------------------
// JSON round trip

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty()) fail(Err::ConfigError, "expected matrix rows");
    Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
    Eigen::Index nc = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd m(nr, nc);
    for (Eigen::Index r = 0; r < nr; ++r)
        for (Eigen::Index c = 0; c < nc; ++c)
            m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

json egarch_to_json(const EgarchTParams& p) {
    return json{{"omega", p.omega},       {"alpha", p.alpha},
                {"gamma", p.gamma},       {"beta", p.beta},
                {"nu", p.nu},             {"mean", p.mean},
                {"last_logvar", p.last_logvar}, {"last_z", p.last_z},
                {"next_logvar", p.next_logvar}, {"loglik", p.loglik}};
}

EgarchTParams egarch_from_json(const json& j) {
    EgarchTParams p;
    p.omega = j.at("omega").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.beta = j.at("beta").get<double>();
    p.nu = j.at("nu").get<double>();
    p.mean = j.at("mean").get<double>();
    p.last_logvar = j.at("last_logvar").get<double>();
    p.last_z = j.at("last_z").get<double>();
    p.next_logvar = j.at("next_logvar").get<double>();
    p.loglik = j.at("loglik").get<double>();
    return p;
}

}  // namespace

nlohmann::ordered_json calibrated_model_to_json(const CalibratedModel& model) {
    json doc;
    doc["schema_version"] = 1;
    doc["model_id"] = model.model_id;
    doc["window_end"] = model.window_end.iso();
    doc["fit_seed"] = model.fit_seed;

    std::visit(
        [&](const auto& impl) {
            using T = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<T, EdfCopulaModel>) {
                doc["family"] = "edf-copula";
                doc["support"] = impl.support;
                doc["correlation"] = matrix_to_json(impl.correlation);
            } else if constexpr (std::is_same_v<T, FqModel>) {
                doc["family"] = "factor-quantile";
                doc["variant"] = impl.variant == FqVariant::AL ? "AL" : "AB";
                doc["factor_count"] = impl.factor_count;
                doc["quantiles"] = impl.quantiles;
                doc["bags"] = impl.bags;
                json coef = json::array();
                for (const auto& var : impl.coef) {
                    json per_tau = json::array();
                    for (const auto& b : var) per_tau.push_back(vector_to_json(b));
                    coef.push_back(std::move(per_tau));
                }
                doc["coef"] = std::move(coef);
                json bag_coef = json::array();
                for (const auto& bag : impl.bag_coef) {
                    json per_var = json::array();
                    for (const auto& var : bag) {
                        json per_tau = json::array();
                        for (const auto& b : var) per_tau.push_back(vector_to_json(b));
                        per_var.push_back(std::move(per_tau));
                    }
                    bag_coef.push_back(std::move(per_var));
                }
                doc["bag_coef"] = std::move(bag_coef);
                json knots = json::array();
                for (const auto& curve : impl.curves)
                    knots.push_back(json{{"tau", curve.knots_tau()}, {"q", curve.knots_q()}});
                doc["curves"] = std::move(knots);
                doc["correlation"] = matrix_to_json(impl.correlation);
            } else {
                doc["family"] = "mv-garch";
                doc["variance_model"] =
                    "egarch-t: ln s2_t = omega + alpha(|z|-E|z|) + gamma z + beta ln s2_{t-1}";
                doc["innovations"] =
                    "coordinatewise standardized Student-t mixed by the Cholesky factor of C";
                doc["kind"] = impl.kind == MvGarchKind::CCC ? "CCC" : "DCC";
                json uni = json::array();
                for (const auto& p : impl.univariate) uni.push_back(egarch_to_json(p));
                doc["univariate"] = std::move(uni);
                doc["means"] = vector_to_json(impl.means);
                doc["constant_correlation"] = matrix_to_json(impl.constant_correlation);
                doc["next_sigma"] = vector_to_json(impl.next_sigma);
                doc["next_correlation"] = matrix_to_json(impl.next_correlation);
                if (impl.kind == MvGarchKind::DCC) {
                    doc["dcc_alpha"] = impl.dcc_alpha;
                    doc["dcc_beta"] = impl.dcc_beta;
                    doc["q_bar"] = matrix_to_json(impl.q_bar);
                    doc["q_last"] = matrix_to_json(impl.q_last);
                    doc["z_last"] = vector_to_json(impl.z_last);
                }
            }
        },
        model.impl);
    return doc;
}

CalibratedModel calibrated_model_from_json(const nlohmann::ordered_json& doc) {
    if (doc.at("schema_version").get<int>() != 1)
        fail(Err::ConfigError, "unsupported model schema version");
    CalibratedModel model;
    model.model_id = doc.at("model_id").get<std::string>();
    model.window_end = parse_date(doc.at("window_end").get<std::string>());
    model.fit_seed = doc.at("fit_seed").get<std::uint64_t>();

    std::string family = doc.at("family").get<std::string>();
    if (family == "edf-copula") {
        EdfCopulaModel impl;
        impl.support = doc.at("support").get<std::vector<std::vector<double>>>();
        impl.correlation = matrix_from_json(doc.at("correlation"));
        model.impl = std::move(impl);
    } else if (family == "factor-quantile") {
        FqModel impl;
        impl.variant = doc.at("variant").get<std::string>() == "AL" ? FqVariant::AL : FqVariant::AB;
        impl.factor_count = doc.at("factor_count").get<int>();
        impl.quantiles = doc.at("quantiles").get<std::vector<double>>();
        impl.bags = doc.at("bags").get<int>();
        for (const auto& var : doc.at("coef")) {
            std::vector<Eigen::VectorXd> per_tau;
            for (const auto& b : var) per_tau.push_back(vector_from_json(b));
            impl.coef.push_back(std::move(per_tau));
        }
        for (const auto& bag : doc.at("bag_coef")) {
            std::vector<std::vector<Eigen::VectorXd>> per_var;
            for (const auto& var : bag) {
                std::vector<Eigen::VectorXd> per_tau;
                for (const auto& b : var) per_tau.push_back(vector_from_json(b));
                per_var.push_back(std::move(per_tau));
            }
            impl.bag_coef.push_back(std::move(per_var));
        }
        for (const auto& curve : doc.at("curves"))
            impl.curves.emplace_back(curve.at("tau").get<std::vector<double>>(),
                                     curve.at("q").get<std::vector<double>>());
        impl.correlation = matrix_from_json(doc.at("correlation"));
        model.impl = std::move(impl);
    } else if (family == "mv-garch") {
        MvGarchModel impl;
        impl.kind = doc.at("kind").get<std::string>() == "CCC" ? MvGarchKind::CCC : MvGarchKind::DCC;
        for (const auto& p : doc.at("univariate")) impl.univariate.push_back(egarch_from_json(p));
        impl.means = vector_from_json(doc.at("means"));
        impl.constant_correlation = matrix_from_json(doc.at("constant_correlation"));
        impl.next_sigma = vector_from_json(doc.at("next_sigma"));
        impl.next_correlation = matrix_from_json(doc.at("next_correlation"));
        if (impl.kind == MvGarchKind::DCC) {
            impl.dcc_alpha = doc.at("dcc_alpha").get<double>();
            impl.dcc_beta = doc.at("dcc_beta").get<double>();
            impl.q_bar = matrix_from_json(doc.at("q_bar"));
            impl.q_last = matrix_from_json(doc.at("q_last"));
            impl.z_last = vector_from_json(doc.at("z_last"));
        }
        model.impl = std::move(impl);
    } else {
        fail(Err::ConfigError, "unknown model family '" + family + "'");
    }
    return model;
}

}  // namespace scorebench
