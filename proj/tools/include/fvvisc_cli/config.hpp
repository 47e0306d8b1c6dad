#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fvvisc/physics.hpp"
#include "fvvisc/recon.hpp"
#include "fvvisc/solver.hpp"

namespace fvvisc::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Problem { Diffusion1D, NS3D };

/// Everything a study run needs. Plain key=value text with dotted keys
/// (`solver.max_iterations = 200`); see config_keys().
struct StudyConfig {
  Problem problem = Problem::Diffusion1D;
  std::vector<Index> grids{7, 11, 15, 19, 23, 31, 47, 63};
  bool regular = false;
  std::vector<ReconstructionStrategy> strategies;
  std::vector<double> omegas;
  double perturbation = 0.3;
  std::uint64_t seed = 1;
  FlowConfig flow;
  SolverConfig solver;
  std::string output = "fvvisc-out";
  bool volume_weighted = false;
  bool unpinned_only = false;
  int jobs = 0;  // 0 uses every hardware thread

  friend bool operator==(const StudyConfig&, const StudyConfig&) = default;
};

/// Defaults for a subcommand: study-1d, study-1d-omega, study-3d, solve,
/// mesh-export or selftest.
StudyConfig default_config(std::string_view command);

/// Every recognized key, in the order to_config_text() writes them.
const std::vector<std::string>& config_keys();

/// Sets one key from its text value. Throws ConfigError on unknown keys or
/// malformed values.
void set_key(StudyConfig& cfg, std::string_view key, std::string_view value);

/// Applies `key = value` lines; '#' starts a comment.
void parse_config(std::istream& in, StudyConfig& cfg, const std::string& source = "<config>");
void load_config_file(const std::string& path, StudyConfig& cfg);

/// Applies FVVISC_<KEY> variables, with dots mapped to underscores and the key
/// upper-cased (FVVISC_SOLVER_MAX_ITERATIONS).
using EnvLookup = std::function<const char*(const char*)>;
void apply_environment(StudyConfig& cfg, const EnvLookup& lookup);
std::string environment_name(std::string_view key);

/// Full effective configuration; parsing it reproduces `cfg` exactly.
std::string to_config_text(const StudyConfig& cfg);

/// Comma-separated list parsers shared with the flag handlers.
std::vector<Index> parse_grid_list(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);
std::vector<ReconstructionStrategy> parse_strategy_list(std::string_view text);

}  // namespace fvvisc::cli
