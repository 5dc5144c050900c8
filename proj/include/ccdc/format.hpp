#pragma once

#include <string>

#include <fmt/format.h>

namespace ccdc {

/// Every number written by the tools: 12 significant digits, C locale.
inline std::string num12(double x) { return fmt::format("{:.12g}", x); }

}  // namespace ccdc
