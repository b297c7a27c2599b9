#pragma once

#include <iosfwd>

#include "run_config.hpp"

namespace rotbec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitAccuracy = 4;

/// Executes one command and writes its artifacts under cfg.output. The
/// summary record goes to `out`, progress lines to `log`. Library errors
/// propagate; the caller maps them onto exit codes.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace rotbec::cli
