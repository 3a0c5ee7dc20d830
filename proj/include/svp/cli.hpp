#pragma once

namespace svp {

// Command-line front end: one subcommand plus flags, optionally merged with
// a config file (flags win), runs the experiment and writes artifacts under
// --out. Returns the process exit code: 0 success, 1 usage/config/io error,
// 2 hard invariant violation (a deterministic-theorem breach).
int run_cli(int argc, const char* const* argv);

} // namespace svp
