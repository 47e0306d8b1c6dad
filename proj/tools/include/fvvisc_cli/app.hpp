#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fvvisc/verify.hpp"
#include "fvvisc_cli/config.hpp"

namespace fvvisc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitBand = 4;

/// Grid family behind `study-3d --full`.
inline const std::vector<Index> kFull3DGrids{7, 11, 15, 23, 31};

/// Layers the configuration: command defaults, then the config file, then
/// FVVISC_* variables, then `flags` in order (each a key/value pair).
StudyConfig build_config(const std::string& command, const std::optional<std::string>& config_path,
                         const EnvLookup& env,
                         std::span<const std::pair<std::string, std::string>> flags);

struct OrderBand {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double order) const { return order >= lo && order <= hi; }
};

/// Acceptance band of the global order for one strategy in a study.
OrderBand expected_band(const std::string& command, const ReconstructionStrategy& strategy);

/// Human-readable band violations; the 3D study checks density only.
std::vector<std::string> band_violations(const std::string& command,
                                         std::span<const ConvergenceRecord> records,
                                         std::span<const ReconstructionStrategy> strategies);

/// Full command-line entry point; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env);

}  // namespace fvvisc::cli
