#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spikelab {

// Exit codes shared by the CLI and its tests.
inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;   // golden/tolerance check failed
inline constexpr int kExitUsage = 2;      // bad arguments, schema or I/O errors

// Run one CLI invocation (args excludes the program name). All output goes
// through the supplied streams so tests can capture it.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace spikelab
