#pragma once

namespace pinnlab {

/// Entry point of the `pinnlab` command-line tool.
/// Exit codes: 0 success, 2 configuration/usage error, 3 training divergence,
/// 1 any other failure.
int cli_main(int argc, const char* const* argv);

} // namespace pinnlab
