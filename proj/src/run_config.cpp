#include "scorebench/run_config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "scorebench/errors.hpp"

namespace scorebench {

namespace {

using json = nlohmann::ordered_json;

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
    if (!obj.is_object()) fail(Err::ConfigError, where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key))
            fail(Err::ConfigError, where + ": unknown key '" + key + "'");
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) fail(Err::ConfigError, where + ": missing key '" + key + "'");
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(Err::ConfigError, where + ": missing key '" + key + "'");
        return fallback;
    }
    if (!obj.at(key).is_number())
        fail(Err::ConfigError, where + ": '" + key + "' must be a number");
    return obj.at(key).get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key, int fallback,
            bool required = false) {
    double v = get_number(obj, where, key, fallback, required);
    if (v != static_cast<double>(static_cast<long long>(v)))
        fail(Err::ConfigError, where + ": '" + key + "' must be an integer");
    return static_cast<int>(v);
}

std::string get_string(const json& obj, const std::string& where, const std::string& key,
                       const std::string& fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(Err::ConfigError, where + ": missing key '" + key + "'");
        return fallback;
    }
    if (!obj.at(key).is_string())
        fail(Err::ConfigError, where + ": '" + key + "' must be a string");
    return obj.at(key).get<std::string>();
}

PanelSource parse_source(const json& obj, const std::string& where) {
    PanelSource source;
    std::string type = get_string(obj, where, "type", "", true);
    if (type == "csv") {
        require_keys(obj, where, {"type", "path", "transform"}, {"type", "path"});
        source.type = PanelSource::Type::Csv;
        source.path = get_string(obj, where, "path", "", true);
        source.transform = get_string(obj, where, "transform", "log-return");
        if (source.transform != "log-return" && source.transform != "difference" &&
            source.transform != "none")
            fail(Err::ConfigError, where + ": transform must be log-return, difference or none");
    } else if (type == "synthetic") {
        require_keys(obj, where,
                     {"type", "generator", "T", "d", "seed", "vol", "rho", "garch_alpha",
                      "garch_beta", "t_df", "high_vol_factor", "switch_prob", "start_date"},
                     {"type", "generator", "T", "d", "seed"});
        source.type = PanelSource::Type::Synthetic;
        source.generator.kind =
            generator_kind_from_name(get_string(obj, where, "generator", "", true));
        source.T = get_int(obj, where, "T", 0, true);
        source.d = get_int(obj, where, "d", 0, true);
        source.seed = static_cast<std::uint64_t>(get_number(obj, where, "seed", 0, true));
        source.generator.vol = get_number(obj, where, "vol", source.generator.vol);
        source.generator.rho = get_number(obj, where, "rho", source.generator.rho);
        source.generator.garch_alpha =
            get_number(obj, where, "garch_alpha", source.generator.garch_alpha);
        source.generator.garch_beta =
            get_number(obj, where, "garch_beta", source.generator.garch_beta);
        source.generator.t_df = get_number(obj, where, "t_df", source.generator.t_df);
        source.generator.high_vol_factor =
            get_number(obj, where, "high_vol_factor", source.generator.high_vol_factor);
        source.generator.switch_prob =
            get_number(obj, where, "switch_prob", source.generator.switch_prob);
        if (obj.contains("start_date"))
            source.generator.start_date =
                parse_date(get_string(obj, where, "start_date", "", true));
    } else {
        fail(Err::ConfigError, where + ": source type must be 'csv' or 'synthetic'");
    }
    return source;
}

ModelSpec parse_model(const json& obj, const std::string& where) {
    require_keys(obj, where, {"type", "name", "window", "factors", "quantiles", "bags"}, {"type"});
    ModelSpec spec;
    spec.kind = model_kind_from_name(get_string(obj, where, "type", "", true));
    spec.window = get_int(obj, where, "window", 250);
    switch (spec.kind) {
        case ModelKind::EdfCopula: spec.factors = 0; spec.bags = 0; break;
        case ModelKind::FqAL: spec.factors = 1; spec.bags = 0; break;
        case ModelKind::FqAB: spec.factors = 2; spec.bags = 50; break;
        case ModelKind::CccGarch:
        case ModelKind::DccGarch: spec.factors = 0; spec.bags = 0; spec.window = 2000; break;
    }
    spec.window = get_int(obj, where, "window", spec.window);
    spec.factors = get_int(obj, where, "factors", spec.factors);
    spec.bags = get_int(obj, where, "bags", spec.bags);
    if (obj.contains("quantiles")) {
        if (!obj.at("quantiles").is_array())
            fail(Err::ConfigError, where + ": 'quantiles' must be an array");
        for (const auto& q : obj.at("quantiles")) spec.quantiles.push_back(q.get<double>());
    }
    std::string default_name;
    switch (spec.kind) {
        case ModelKind::EdfCopula: default_name = "EDF-C-" + std::to_string(spec.window); break;
        case ModelKind::FqAL: default_name = "FQ-AL-" + std::to_string(spec.window); break;
        case ModelKind::FqAB: default_name = "FQ-AB-" + std::to_string(spec.window); break;
        case ModelKind::CccGarch: default_name = "CCC-GARCH"; break;
        case ModelKind::DccGarch: default_name = "DCC-GARCH"; break;
    }
    spec.name = get_string(obj, where, "name", default_name);
    return spec;
}

RuleSpec parse_rule(const json& obj, const std::string& where) {
    std::string type = get_string(obj, where, "type", "", true);
    RuleSpec rule;
    if (type == "es") {
        require_keys(obj, where, {"type", "beta"}, {"type"});
        rule.kind = RuleSpec::Kind::EnergyScore;
        rule.param = get_number(obj, where, "beta", 1.0);
    } else if (type == "vs") {
        require_keys(obj, where, {"type", "p"}, {"type"});
        rule.kind = RuleSpec::Kind::VariogramScore;
        rule.param = get_number(obj, where, "p", 1.0);
    } else {
        fail(Err::ConfigError, where + ": rule type must be 'es' or 'vs'");
    }
    return rule;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::IoError, "cannot open config '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        fail(Err::ConfigError, "config '" + path + "' is not valid JSON: " + e.what());
    }

    require_keys(doc, "config", {"data", "models", "rules", "grid", "output"},
                 {"data", "output"});

    RunConfig config;

    const json& data = doc.at("data");
    require_keys(data, "data", {"panels"}, {"panels"});
    if (!data.at("panels").is_array() || data.at("panels").empty())
        fail(Err::ConfigError, "data.panels must be a non-empty array");
    for (std::size_t i = 0; i < data.at("panels").size(); ++i) {
        const json& p = data.at("panels")[i];
        std::string where = "data.panels[" + std::to_string(i) + "]";
        require_keys(p, where, {"name", "source"}, {"name", "source"});
        PanelConfig pc;
        pc.name = get_string(p, where, "name", "", true);
        pc.source = parse_source(p.at("source"), where + ".source");
        config.panels.push_back(std::move(pc));
    }

    if (doc.contains("models")) {
        if (!doc.at("models").is_array() || doc.at("models").empty())
            fail(Err::ConfigError, "models must be a non-empty array");
        for (std::size_t i = 0; i < doc.at("models").size(); ++i)
            config.models.push_back(
                parse_model(doc.at("models")[i], "models[" + std::to_string(i) + "]"));
    } else {
        config.models = default_roster();
    }

    if (doc.contains("rules")) {
        if (!doc.at("rules").is_array() || doc.at("rules").empty())
            fail(Err::ConfigError, "rules must be a non-empty array");
        for (std::size_t i = 0; i < doc.at("rules").size(); ++i)
            config.rules.push_back(
                parse_rule(doc.at("rules")[i], "rules[" + std::to_string(i) + "]"));
    } else {
        config.rules = default_rules();
    }

    if (doc.contains("grid")) {
        const json& grid = doc.at("grid");
        require_keys(grid, "grid", {"n_draws", "subsample", "frequency", "root_seed", "max_dates"},
                     {});
        config.grid.n_draws = get_int(grid, "grid", "n_draws", config.grid.n_draws);
        config.grid.subsample = get_int(grid, "grid", "subsample", config.grid.subsample);
        config.grid.frequency = get_string(grid, "grid", "frequency", config.grid.frequency);
        if (config.grid.frequency != "quarterly")
            fail(Err::ConfigError, "grid.frequency: only 'quarterly' is supported");
        config.grid.root_seed =
            static_cast<std::uint64_t>(get_number(grid, "grid", "root_seed",
                                                  static_cast<double>(config.grid.root_seed)));
        config.grid.max_dates = get_int(grid, "grid", "max_dates", config.grid.max_dates);
    }

    const json& output = doc.at("output");
    require_keys(output, "output", {"directory"}, {"directory"});
    config.output_dir = get_string(output, "output", "directory", "", true);

    return config;
}

SeriesPanel build_panel(const PanelConfig& config) {
    SeriesPanel panel;
    if (config.source.type == PanelSource::Type::Csv) {
        panel = load_csv(config.source.path);
        panel.name = config.name;
        if (config.source.transform == "log-return")
            panel = to_changes(panel, ChangeMode::LogReturn);
        else if (config.source.transform == "difference")
            panel = to_changes(panel, ChangeMode::Difference);
    } else {
        panel = generate_synthetic_panel(config.source.generator, config.source.T, config.source.d,
                                         config.source.seed);
        panel.name = config.name;
    }
    panel.name = config.name;
    validate_panel(panel);
    return panel;
}

}  // namespace scorebench
