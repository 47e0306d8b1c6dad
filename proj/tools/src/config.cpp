#include "fvvisc_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "fvvisc/errors.hpp"

namespace fvvisc::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid number '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

template <class Int>
Int to_int(std::string_view key, std::string_view text) {
  text = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid integer '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

struct KeyHandler {
  std::function<void(StudyConfig&, std::string_view)> set;
  std::function<std::string(const StudyConfig&)> get;
};

const std::vector<std::pair<std::string, KeyHandler>>& handlers() {
  static const std::vector<std::pair<std::string, KeyHandler>> table = [] {
    std::vector<std::pair<std::string, KeyHandler>> t;
    auto real = [&t](const std::string& key, auto member) {
      t.push_back({key,
                   {[key, member](StudyConfig& c, std::string_view v) { member(c) = to_double(key, v); },
                    [member](const StudyConfig& c) {
                      return format_double(member(const_cast<StudyConfig&>(c)));
                    }}});
    };
    auto integer = [&t](const std::string& key, auto member) {
      t.push_back({key,
                   {[key, member](StudyConfig& c, std::string_view v) {
                      member(c) = to_int<std::remove_reference_t<decltype(member(c))>>(key, v);
                    },
                    [member](const StudyConfig& c) {
                      return std::to_string(member(const_cast<StudyConfig&>(c)));
                    }}});
    };
    auto boolean = [&t](const std::string& key, auto member) {
      t.push_back({key,
                   {[key, member](StudyConfig& c, std::string_view v) { member(c) = to_bool(key, v); },
                    [member](const StudyConfig& c) {
                      return std::string(member(const_cast<StudyConfig&>(c)) ? "true" : "false");
                    }}});
    };

    t.push_back({"problem",
                 {[](StudyConfig& c, std::string_view v) {
                    v = trim(v);
                    if (v == "diffusion1d") {
                      c.problem = Problem::Diffusion1D;
                    } else if (v == "ns3d") {
                      c.problem = Problem::NS3D;
                    } else {
                      throw ConfigError("invalid problem '" + std::string(v) +
                                        "'; valid: diffusion1d, ns3d");
                    }
                  },
                  [](const StudyConfig& c) {
                    return std::string(c.problem == Problem::NS3D ? "ns3d" : "diffusion1d");
                  }}});
    t.push_back({"grids",
                 {[](StudyConfig& c, std::string_view v) { c.grids = parse_grid_list(v); },
                  [](const StudyConfig& c) {
                    return join(c.grids, [](Index n) { return std::to_string(n); });
                  }}});
    boolean("regular", [](StudyConfig& c) -> bool& { return c.regular; });
    t.push_back({"strategies",
                 {[](StudyConfig& c, std::string_view v) { c.strategies = parse_strategy_list(v); },
                  [](const StudyConfig& c) {
                    return join(c.strategies, [](const ReconstructionStrategy& s) { return s.name(); });
                  }}});
    t.push_back({"omegas",
                 {[](StudyConfig& c, std::string_view v) {
                    c.omegas = parse_double_list(v);
                    for (double w : c.omegas) {
                      if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("omega must lie in [0, 1]");
                    }
                  },
                  [](const StudyConfig& c) { return join(c.omegas, format_double); }}});
    real("perturbation", [](StudyConfig& c) -> double& { return c.perturbation; });
    integer("seed", [](StudyConfig& c) -> std::uint64_t& { return c.seed; });
    t.push_back({"output",
                 {[](StudyConfig& c, std::string_view v) {
                    v = trim(v);
                    if (v.empty()) throw ConfigError("output must not be empty");
                    c.output = std::string(v);
                  },
                  [](const StudyConfig& c) { return c.output; }}});
    integer("jobs", [](StudyConfig& c) -> int& { return c.jobs; });
    boolean("error.volume_weighted", [](StudyConfig& c) -> bool& { return c.volume_weighted; });
    t.push_back({"error.cells",
                 {[](StudyConfig& c, std::string_view v) {
                    v = trim(v);
                    if (v == "all") {
                      c.unpinned_only = false;
                    } else if (v == "unpinned") {
                      c.unpinned_only = true;
                    } else {
                      throw ConfigError("invalid error.cells '" + std::string(v) +
                                        "'; valid: all, unpinned");
                    }
                  },
                  [](const StudyConfig& c) {
                    return std::string(c.unpinned_only ? "unpinned" : "all");
                  }}});
    real("flow.mach", [](StudyConfig& c) -> double& { return c.flow.mach; });
    real("flow.reynolds", [](StudyConfig& c) -> double& { return c.flow.reynolds; });
    real("flow.t_inf", [](StudyConfig& c) -> double& { return c.flow.t_inf; });
    real("flow.sutherland", [](StudyConfig& c) -> double& { return c.flow.sutherland; });
    real("flow.gamma", [](StudyConfig& c) -> double& { return c.flow.gamma; });
    real("flow.prandtl", [](StudyConfig& c) -> double& { return c.flow.prandtl; });
    real("flow.alpha", [](StudyConfig& c) -> double& { return c.flow.alpha; });
    real("solver.target_drop", [](StudyConfig& c) -> double& { return c.solver.target_drop; });
    integer("solver.max_iterations", [](StudyConfig& c) -> int& { return c.solver.max_iterations; });
    real("solver.cfl_start", [](StudyConfig& c) -> double& { return c.solver.cfl_start; });
    real("solver.cfl_max", [](StudyConfig& c) -> double& { return c.solver.cfl_max; });
    real("solver.cfl_growth", [](StudyConfig& c) -> double& { return c.solver.cfl_growth; });
    integer("solver.linear_sweeps", [](StudyConfig& c) -> int& { return c.solver.linear_sweeps; });
    real("solver.absolute_tolerance",
         [](StudyConfig& c) -> double& { return c.solver.absolute_tolerance; });
    return t;
  }();
  return table;
}

const KeyHandler& handler(std::string_view key) {
  for (const auto& [name, h] : handlers()) {
    if (name == key) return h;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

std::vector<Index> parse_grid_list(std::string_view text) {
  std::vector<Index> out;
  for (auto item : split(text, ',')) {
    const Index n = to_int<Index>("grids", item);
    if (n < 3) throw ConfigError("grid size must be >= 3, got " + std::to_string(n));
    out.push_back(n);
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split(text, ',')) out.push_back(to_double("list", item));
  return out;
}

std::vector<ReconstructionStrategy> parse_strategy_list(std::string_view text) {
  std::vector<ReconstructionStrategy> out;
  for (auto item : split(text, ',')) {
    try {
      out.push_back(ReconstructionStrategy::parse(item));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

StudyConfig default_config(std::string_view command) {
  StudyConfig c;
  if (command == "study-1d" || command == "solve" || command == "selftest") {
    c.strategies = parse_strategy_list(
        "lr-average,inverse-distance,arithmetic,one-sided-left,one-sided-right");
  } else if (command == "study-1d-omega") {
    c.regular = true;
    c.omegas = {0.5, 0.6, 0.75, 1.0};
  } else if (command == "study-3d" || command == "mesh-export") {
    c.problem = Problem::NS3D;
    c.grids = {7, 11, 15};
    c.strategies = parse_strategy_list("lr-average,arithmetic,inverse-distance");
    // Five orders leave an algebraic error above the discretization error.
    c.solver.target_drop = 10.0;
  } else {
    throw ConfigError("unknown command '" + std::string(command) + "'");
  }
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, h] : handlers()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_key(StudyConfig& cfg, std::string_view key, std::string_view value) {
  handler(trim(key)).set(cfg, value);
}

void parse_config(std::istream& in, StudyConfig& cfg, const std::string& source) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(number) + ": expected key = value");
    }
    try {
      set_key(cfg, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void load_config_file(const std::string& path, StudyConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  parse_config(in, cfg, path);
}

std::string environment_name(std::string_view key) {
  std::string name = "FVVISC_";
  for (char ch : key) {
    name += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return name;
}

void apply_environment(StudyConfig& cfg, const EnvLookup& lookup) {
  for (const auto& [name, h] : handlers()) {
    const std::string var = environment_name(name);
    if (const char* value = lookup(var.c_str()); value != nullptr) {
      try {
        h.set(cfg, value);
      } catch (const ConfigError& e) {
        throw ConfigError(var + ": " + e.what());
      }
    }
  }
}

std::string to_config_text(const StudyConfig& cfg) {
  std::ostringstream out;
  out << "# fvvisc effective configuration\n";
  for (const auto& [name, h] : handlers()) out << name << " = " << h.get(cfg) << '\n';
  return out.str();
}

}  // namespace fvvisc::cli
