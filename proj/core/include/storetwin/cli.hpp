#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace storetwin {

/// Exit codes: 0 success, 1 usage or validation error, 2 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point for the `storetwin` tool. `args` excludes the program name.
///
///   run <scenario> [--out DIR] [--mqtt HOST:PORT] [--calibration FILE]
///   compare <scenario> [--json] [--calibration FILE]
///   broker [--port N] [--bind ADDR]
///   calibrate <scenario> [--target-low 40] [--target-high 45] [--sidecar FILE]
///
/// STORETWIN_MQTT=HOST:PORT overrides the broker address of a scenario that
/// has telemetry enabled.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace storetwin
