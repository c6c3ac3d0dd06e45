#include "scorebench/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "scorebench/errors.hpp"
#include "scorebench/metrics.hpp"
#include "scorebench/rng.hpp"

namespace scorebench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

int exit_code_for(const Error& error) {
    switch (error.code()) {
        case Err::IoError:
        case Err::MissingTensor:
            return kExitIo;
        default:
            return kExitConfig;
    }
}

namespace {

fs::path panels_dir(const RunConfig& config) { return fs::path(config.output_dir) / "panels"; }
fs::path tensor_dir(const RunConfig& config) { return fs::path(config.output_dir) / "tensor"; }

SeriesPanel load_cached_panel(const RunConfig& config, const std::string& name) {
    fs::path csv = panels_dir(config) / (name + ".csv");
    fs::path meta_path = panels_dir(config) / (name + ".meta.json");
    if (!fs::exists(csv) || !fs::exists(meta_path))
        fail(Err::IoError, "panel '" + name + "' is not cached under '" +
                               panels_dir(config).string() + "'; run `scorebench ingest` first");
    SeriesPanel panel = load_csv(csv.string());
    panel.name = name;
    std::ifstream meta_in(meta_path);
    ordered_json meta;
    meta_in >> meta;
    panel.kind = panel_kind_from_name(meta.at("kind").get<std::string>());
    return panel;
}

}  // namespace

int cmd_ingest(const RunConfig& config, bool verbose) {
    std::error_code ec;
    fs::create_directories(panels_dir(config), ec);
    if (ec) fail(Err::IoError, "cannot create '" + panels_dir(config).string() + "'");

    for (const auto& pc : config.panels) {
        SeriesPanel panel = build_panel(pc);
        write_csv(panel, (panels_dir(config) / (pc.name + ".csv")).string());

        ordered_json meta;
        meta["name"] = pc.name;
        meta["kind"] = panel_kind_name(panel.kind);
        meta["rows"] = panel.rows();
        meta["columns"] = panel.cols();
        if (pc.source.type == PanelSource::Type::Synthetic) {
            meta["source"] = "synthetic";
            meta["generator"] = generator_kind_name(pc.source.generator.kind);
            meta["seed"] = pc.source.seed;
        } else {
            meta["source"] = "csv";
            meta["path"] = pc.source.path;
            meta["transform"] = pc.source.transform;
        }
        std::ofstream meta_out(panels_dir(config) / (pc.name + ".meta.json"));
        if (!meta_out) fail(Err::IoError, "cannot write panel metadata for '" + pc.name + "'");
        meta_out << meta.dump(2) << '\n';

        std::cout << "panel " << pc.name << ": " << panel.rows() << " x " << panel.cols() << " "
                  << panel_kind_name(panel.kind) << "\n"
                  << format_summary(summary_statistics(panel)) << "\n";
        if (verbose) std::cout << "cached under " << panels_dir(config).string() << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig& config, int threads, bool verbose) {
    GridSpec spec;
    for (const auto& pc : config.panels) spec.panels.push_back(load_cached_panel(config, pc.name));
    spec.models = config.models;
    spec.rules = config.rules;
    spec.n_draws = config.grid.n_draws;
    spec.subsample = config.grid.subsample;
    spec.root_seed = config.grid.root_seed;
    spec.max_dates = config.grid.max_dates;

    if (verbose)
        std::cout << "running grid: " << spec.panels.size() << " panel(s), "
                  << spec.models.size() << " model(s), "
                  << (spec.rules.empty() ? default_rules().size() : spec.rules.size())
                  << " rule(s), N=" << spec.n_draws << ", threads=" << threads << "\n";

    ScoreTensor tensor = run_grid(spec, threads);
    write_tensor(tensor, tensor_dir(config).string());

    std::cout << "tensor written to " << tensor_dir(config).string() << " ("
              << tensor.absent.size() << " absent cell(s))\n";
    for (const auto& cell : tensor.absent)
        if (verbose)
            std::cout << "absent: " << cell.panel << " " << cell.date.iso() << " " << cell.model
                      << ": " << cell.reason << "\n";
    return tensor.absent.empty() ? kExitOk : kExitPartial;
}

int cmd_report(const RunConfig& config, bool verbose) {
    ScoreTensor tensor = read_tensor(tensor_dir(config).string());

    MetricReportOptions options;
    options.subsample = tensor.subsample;
    options.seed = seed_combine(tensor.root_seed, "report-bootstrap");
    MetricReport report = build_report(tensor, options);
    write_report(report, config.output_dir);

    std::cout << "report written to " << config.output_dir << "\n";
    if (verbose) {
        std::cout << "error-rate ordering:";
        for (const auto& name : report.error_rate_ordering)
            std::cout << " " << name << "=" << report.rule_avg_error_rate.at(name);
        std::cout << "\nheuristic ordering:";
        for (const auto& name : report.heuristic_ordering)
            std::cout << " " << name << "=" << report.rule_avg_heuristic.at(name);
        std::cout << "\n";
    }
    return kExitOk;
}

}  // namespace scorebench
