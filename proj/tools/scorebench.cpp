// scorebench: configuration-driven runner for the scoring-rule grid.
//
//   scorebench ingest   --config run.json        validate + cache panels
//   scorebench simulate --config run.json        run the grid, write the tensor
//   scorebench report   --config run.json        metrics + figure data
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scorebench/commands.hpp"
#include "scorebench/errors.hpp"

namespace {

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("SCOREBENCH_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scorebench: proper-scoring-rule discrimination benchmarks"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::string output_override;
    int threads = 0;
    bool verbose = false;
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--output", output_override, "override output.directory");
    app.add_option("--threads", threads, "worker threads (never changes results)");
    app.add_flag("--verbose", verbose, "chatty progress output");

    auto* ingest = app.add_subcommand("ingest", "validate, transform and cache panels");
    auto* simulate = app.add_subcommand("simulate", "run the simulation grid");
    auto* report = app.add_subcommand("report", "compute metrics from a stored tensor");

    CLI11_PARSE(app, argc, argv);

    try {
        scorebench::RunConfig config = scorebench::load_run_config(config_path);
        if (!output_override.empty()) config.output_dir = output_override;
        if (ingest->parsed()) return scorebench::cmd_ingest(config, verbose);
        if (simulate->parsed())
            return scorebench::cmd_simulate(config, resolve_threads(threads), verbose);
        if (report->parsed()) return scorebench::cmd_report(config, verbose);
    } catch (const scorebench::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return scorebench::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return scorebench::kExitConfig;
    }
    return scorebench::kExitConfig;
}
