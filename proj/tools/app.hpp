#pragma once

namespace cendre::cli {

/// Exit codes: 0 success, 1 I/O failure, 2 configuration or usage error,
/// 3 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace cendre::cli
