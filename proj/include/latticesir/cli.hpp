#pragma once

namespace latticesir {

// Full command-line entry point, linked into the library so tests can drive
// it in process. Returns the process exit code: 0 success, 1 module error,
// 2 parse error, 3 validation error.
int run_cli(int argc, const char* const* argv);

}  // namespace latticesir
