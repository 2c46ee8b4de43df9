#pragma once

#include <string>

namespace piezocell {

// Exit codes of the batch front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitComputeError = 3;
inline constexpr int kExitValidationFailure = 4;

// Runs one batch mode (homogenize | macro | dns | sweep | validate) from a
// self-describing config file, writing all artifacts into out_dir (created
// if missing). Returns the process exit code; never throws. threads <= 0
// means "decide automatically".
int run_mode(const std::string& mode, const std::string& config_path,
             const std::string& out_dir, int threads);

} // namespace piezocell
