// JSON run configuration: the single artifact of record for a reproducible
// run. Unknown keys are rejected everywhere; docs/config.schema.json is the
// published schema this validation mirrors.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scorebench/harness.hpp"
#include "scorebench/panel.hpp"
#include "scorebench/synthetic.hpp"

namespace scorebench {

struct PanelSource {
    enum class Type { Csv, Synthetic } type = Type::Csv;
    // csv
    std::string path;
    std::string transform = "log-return";  // log-return | difference | none
    // synthetic
    GeneratorSpec generator;
    int T = 0;
    int d = 0;
    std::uint64_t seed = 0;
};

struct PanelConfig {
    std::string name;
    PanelSource source;
};

struct GridOptions {
    int n_draws = 5000;
    int subsample = 100;
    std::string frequency = "quarterly";
    std::uint64_t root_seed = 42;
    int max_dates = 0;
};

struct RunConfig {
    std::vector<PanelConfig> panels;
    std::vector<ModelSpec> models;  // empty -> default roster
    std::vector<RuleSpec> rules;    // empty -> default rules
    GridOptions grid;
    std::string output_dir;
};

RunConfig load_run_config(const std::string& path);

// Materializes one configured panel (CSV load + transform, or generator).
SeriesPanel build_panel(const PanelConfig& config);

}  // namespace scorebench
