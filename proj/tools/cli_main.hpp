#pragma once

namespace alphasign {

/// Full command-line entry point; returns the process exit code
/// (0 success, 1 usage error, 2 data error, 3 numerical failure).
int cli_run(int argc, const char* const* argv);

}  // namespace alphasign
