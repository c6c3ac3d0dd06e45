#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <cstdlib>
#include <sys/wait.h>

#include "scorebench/commands.hpp"
#include "scorebench/errors.hpp"
#include "scorebench/run_config.hpp"

using namespace scorebench;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

std::string tiny_config_json(const std::string& out_dir, int n_draws = 50,
                             std::uint64_t seed = 42) {
    std::ostringstream os;
    os << R"({
  "data": {"panels": [
    {"name": "syn", "source": {"type": "synthetic", "generator": "gaussian",
                                "T": 330, "d": 3, "seed": 5, "vol": 0.01, "rho": 0.25}}
  ]},
  "models": [
    {"type": "edf", "window": 250},
    {"type": "fq-al", "window": 250, "factors": 1}
  ],
  "rules": [{"type": "es", "beta": 1.0}, {"type": "vs", "p": 0.5}],
  "grid": {"n_draws": )"
       << n_draws << R"(, "subsample": 20, "root_seed": )" << seed << R"(, "max_dates": 2},
  "output": {"directory": ")"
       << out_dir << R"("}
})";
    return os.str();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Byte-level comparison of every regular file under two directories.
bool directories_identical(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> rel_a, rel_b;
    for (auto& entry : fs::recursive_directory_iterator(a))
        if (entry.is_regular_file()) rel_a.push_back(fs::relative(entry.path(), a));
    for (auto& entry : fs::recursive_directory_iterator(b))
        if (entry.is_regular_file()) rel_b.push_back(fs::relative(entry.path(), b));
    std::sort(rel_a.begin(), rel_a.end());
    std::sort(rel_b.begin(), rel_b.end());
    if (rel_a != rel_b) return false;
    for (const auto& rel : rel_a)
        if (read_file(a / rel) != read_file(b / rel)) return false;
    return true;
}

}  // namespace

TEST_CASE("config: valid file parses with defaults applied") {
    auto out = (fs::temp_directory_path() / "sb_cfg_out").string();
    auto path = write_temp("sb_cfg_ok.json", tiny_config_json(out));
    RunConfig config = load_run_config(path);
    CHECK(config.panels.size() == 1);
    CHECK(config.panels[0].name == "syn");
    CHECK(config.models.size() == 2);
    CHECK(config.models[0].name == "EDF-C-250");
    CHECK(config.rules.size() == 2);
    CHECK(config.grid.n_draws == 50);
    CHECK(config.output_dir == out);
}

TEST_CASE("config: default roster has the eight models") {
    auto out = (fs::temp_directory_path() / "sb_cfg_out2").string();
    auto path = write_temp("sb_cfg_roster.json", R"({
  "data": {"panels": [{"name": "p", "source": {"type": "synthetic", "generator": "gaussian", "T": 100, "d": 2, "seed": 1}}]},
  "output": {"directory": ")" + out + R"("}
})");
    RunConfig config = load_run_config(path);
    REQUIRE(config.models.size() == 8);
    CHECK(config.models[0].name == "EDF-C-250");
    CHECK(config.models[7].name == "DCC-GARCH");
    CHECK(config.rules.size() == 4);
}

TEST_CASE("config: unknown keys are rejected at every level") {
    auto out = (fs::temp_directory_path() / "x").string();
    auto bad_root = write_temp("sb_cfg_bad1.json", R"({
  "data": {"panels": [{"name": "p", "source": {"type": "synthetic", "generator": "gaussian", "T": 10, "d": 2, "seed": 1}}]},
  "output": {"directory": "o"}, "extra": 1
})");
    CHECK_THROWS_AS(load_run_config(bad_root), Error);

    auto bad_grid = write_temp("sb_cfg_bad2.json", R"({
  "data": {"panels": [{"name": "p", "source": {"type": "synthetic", "generator": "gaussian", "T": 10, "d": 2, "seed": 1}}]},
  "grid": {"n_draw": 10},
  "output": {"directory": "o"}
})");
    CHECK_THROWS_AS(load_run_config(bad_grid), Error);

    auto bad_source = write_temp("sb_cfg_bad3.json", R"({
  "data": {"panels": [{"name": "p", "source": {"type": "synthetic", "generator": "gaussian", "T": 10, "d": 2, "seed": 1, "sigma": 3}}]},
  "output": {"directory": "o"}
})");
    CHECK_THROWS_AS(load_run_config(bad_source), Error);

    try {
        load_run_config(bad_grid);
    } catch (const Error& e) {
        CHECK(e.code() == Err::ConfigError);
        CHECK(exit_code_for(e) == kExitConfig);
    }
}

TEST_CASE("config: missing file maps to the I/O exit code") {
    try {
        load_run_config("/nonexistent/sb.json");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::IoError);
        CHECK(exit_code_for(e) == kExitIo);
    }
}

TEST_CASE("ingest -> simulate -> report end to end on a tiny config") {
    auto out = (fs::temp_directory_path() / "sb_e2e").string();
    fs::remove_all(out);
    auto path = write_temp("sb_e2e.json", tiny_config_json(out));
    RunConfig config = load_run_config(path);

    CHECK(cmd_ingest(config) == kExitOk);
    CHECK(fs::exists(fs::path(out) / "panels" / "syn.csv"));
    CHECK(fs::exists(fs::path(out) / "panels" / "syn.meta.json"));

    CHECK(cmd_simulate(config, 1) == kExitOk);  // no absent cells expected
    CHECK(fs::exists(fs::path(out) / "tensor" / "manifest.json"));

    CHECK(cmd_report(config) == kExitOk);
    CHECK(fs::exists(fs::path(out) / "report.csv"));
    CHECK(fs::exists(fs::path(out) / "summary.json"));
    CHECK(fs::exists(fs::path(out) / "figures" / "fig3_mean_relative_scores.csv"));
    CHECK(fs::exists(fs::path(out) / "figures" / "fig5_error_rates.csv"));
    CHECK(fs::exists(fs::path(out) / "figures" / "fig6_discrimination_heuristic.csv"));

    // summary.json has finite metrics for both rules.
    std::string summary = read_file(fs::path(out) / "summary.json");
    CHECK(summary.find("ES(1)") != std::string::npos);
    CHECK(summary.find("VS(0.5)") != std::string::npos);
    CHECK(summary.find("nan") == std::string::npos);
}

TEST_CASE("simulate before ingest is an I/O error") {
    auto out = (fs::temp_directory_path() / "sb_noingest").string();
    fs::remove_all(out);
    auto path = write_temp("sb_noingest.json", tiny_config_json(out));
    RunConfig config = load_run_config(path);
    try {
        cmd_simulate(config, 1);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(exit_code_for(e) == kExitIo);
    }
}

TEST_CASE("rerunning simulate + report is byte identical, independent of threads") {
    auto out1 = (fs::temp_directory_path() / "sb_det1").string();
    auto out2 = (fs::temp_directory_path() / "sb_det2").string();
    fs::remove_all(out1);
    fs::remove_all(out2);
    auto p1 = write_temp("sb_det1.json", tiny_config_json(out1, 40, 4242));
    auto p2 = write_temp("sb_det2.json", tiny_config_json(out2, 40, 4242));
    RunConfig c1 = load_run_config(p1);
    RunConfig c2 = load_run_config(p2);

    CHECK(cmd_ingest(c1) == kExitOk);
    CHECK(cmd_ingest(c2) == kExitOk);
    CHECK(cmd_simulate(c1, 1) == kExitOk);
    CHECK(cmd_simulate(c2, 4) == kExitOk);  // different thread count
    CHECK(cmd_report(c1) == kExitOk);
    CHECK(cmd_report(c2) == kExitOk);

    CHECK(directories_identical(fs::path(out1) / "tensor", fs::path(out2) / "tensor"));
    CHECK(read_file(fs::path(out1) / "report.csv") == read_file(fs::path(out2) / "report.csv"));
    CHECK(read_file(fs::path(out1) / "summary.json") ==
          read_file(fs::path(out2) / "summary.json"));
}

TEST_CASE("garch on a 250 window logs absent cells and exits partial") {
    auto out = (fs::temp_directory_path() / "sb_partial").string();
    fs::remove_all(out);
    std::string json = R"({
  "data": {"panels": [
    {"name": "syn", "source": {"type": "synthetic", "generator": "gaussian", "T": 330, "d": 2, "seed": 6}}
  ]},
  "models": [
    {"type": "edf", "window": 250},
    {"type": "ccc-garch", "window": 250}
  ],
  "rules": [{"type": "es", "beta": 1.0}],
  "grid": {"n_draws": 30, "subsample": 10, "max_dates": 1},
  "output": {"directory": ")" + out + R"("}
})";
    auto path = write_temp("sb_partial.json", json);
    RunConfig config = load_run_config(path);
    CHECK(cmd_ingest(config) == kExitOk);
    CHECK(cmd_simulate(config, 1) == kExitPartial);
    std::string manifest = read_file(fs::path(out) / "tensor" / "manifest.json");
    CHECK(manifest.find("CCC-GARCH") != std::string::npos);
    CHECK(cmd_report(config) == kExitOk);
}

TEST_CASE("cli binary: subcommands, trailing global flags, exit codes") {
    // Located relative to the ctest working directory (build/tests).
    fs::path bin = "../tools/scorebench";
    if (const char* env = std::getenv("SCOREBENCH_BIN")) bin = env;
    if (!fs::exists(bin)) {
        MESSAGE("scorebench binary not found; skipping subprocess smoke test");
        return;
    }
    auto out = (fs::temp_directory_path() / "sb_cli_smoke").string();
    fs::remove_all(out);
    auto cfg = write_temp("sb_cli_smoke.json", tiny_config_json(out, 30, 7));

    auto run = [&](const std::string& args) {
        std::string cmd = bin.string() + " " + args + " > /dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    CHECK(run("ingest --config " + cfg) == kExitOk);
    CHECK(run("simulate --config " + cfg + " --threads 2") == kExitOk);
    CHECK(run("report --config " + cfg + " --verbose") == kExitOk);
    CHECK(run("report --config /nonexistent.json") == kExitIo);
    CHECK(run("ingest") != kExitOk);  // missing --config
    // Config error: unknown key.
    auto bad = write_temp("sb_cli_bad.json", "{\"data\": {}, \"output\": {\"directory\": \"x\"}, \"zzz\": 1}");
    CHECK(run("ingest --config " + bad) == kExitConfig);
}
