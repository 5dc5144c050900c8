#pragma once

#include <iosfwd>

namespace ccdc {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kConfigSchemaVersion = 1;

/// Entry point of the `ccdc` tool. Exit status: 0 success, 1 configuration
/// or usage error, 2 numerical failure, 3 I/O error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ccdc
