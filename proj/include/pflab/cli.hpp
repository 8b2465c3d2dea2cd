#pragma once

namespace pflab {

/// Command-line entry point. Subcommands: run, sweep, oracle, effort,
/// validate. Returns 0 on success, 2 on configuration errors, 3 on
/// numerical failures.
int cli_main(int argc, const char* const* argv);

}  // namespace pflab
