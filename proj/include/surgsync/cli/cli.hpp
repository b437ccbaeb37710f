#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

namespace surgsync::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitIo = 2;

/// Parses `args` (without the program name) and runs the subcommand.
/// Argument errors are reported before any side effect. Results go to `out`,
/// diagnostics to `err`. `stop` interrupts recorders the same way 'q' does.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const std::atomic<bool>* stop = nullptr);

/// Usage text for the top-level command.
std::string usage();

}  // namespace surgsync::cli
