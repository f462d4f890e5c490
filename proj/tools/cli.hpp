#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spinsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConnection = 3;
/// Transport errors exit with kExitTransportBase + TransportErrorCode.
inline constexpr int kExitTransportBase = 10;

/// Entry point behind the spinsim executable. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double value);

}  // namespace spinsim::cli
