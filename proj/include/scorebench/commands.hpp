// The three CLI commands as library functions, so tests can drive them
// without a subprocess. Exit codes: 0 success, 1 partial (absent cells),
// 2 configuration error, 3 I/O error.
#pragma once

#include <string>

#include "scorebench/errors.hpp"
#include "scorebench/run_config.hpp"

namespace scorebench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

int cmd_ingest(const RunConfig& config, bool verbose = false);
int cmd_simulate(const RunConfig& config, int threads = 1, bool verbose = false);
int cmd_report(const RunConfig& config, bool verbose = false);

// Maps a thrown Error to the CLI exit code.
int exit_code_for(const Error& error);

}  // namespace scorebench
