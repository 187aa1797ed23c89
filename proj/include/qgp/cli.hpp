#pragma once

// Scenario configs and the qgplab subcommands.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qgp/models.hpp"

namespace qgp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  const Entry* find(const std::string& key) const;
  std::vector<const Entry*> all(const std::string& key) const;
};

/// Line-oriented `[section]` / `key = value` text; `#` and `;` start comments.
struct ConfigFile {
  std::string source;
  std::vector<Section> sections;

  const Section* find(const std::string& name) const;
};

/// ConfigError with `source:line` on malformed lines or unknown sections.
ConfigFile parse_config(std::istream& in, const std::string& source = "config");
ConfigFile load_config(const std::filesystem::path& path);

struct Scenario {
  std::string source;
  Section model;
  std::string model_name;
  double start = 0.0;
  double end = 1.0;
  std::size_t grid = 4096;
  std::size_t level = 0;
  double tol = 1e-10;
  double delta = 0.1;
  double traditional_threshold = 0.1;
  bool simulate_conditions = true;  // append observed min P to the conditions summary
  bool write_trajectory = true;
  bool write_fidelity = true;
  std::filesystem::path out_dir = "out";
  std::optional<Section> sweep;
};

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> grid;
  std::optional<double> tol;
  std::optional<double> delta;
  std::optional<unsigned long long> seed;
};

/// Typed view of a parsed file; ConfigError names the section and field.
Scenario load_scenario(const ConfigFile& file, const Overrides& overrides = {});

/// Builds the Hamiltonian named in [model]. Parameter overrides (from a
/// sweep) replace or add `key = value` entries.
HamiltonianModel build_model(const Section& model, const std::string& source,
                             const std::vector<Entry>& overrides = {});

/// Smooth-function descriptor: `poly c0 c1 ...` or `sin amplitude omega phase [offset]`.
SmoothFunction parse_smooth(const std::string& text, const std::string& where);

/// Each command returns an exit code and reports to `log`.
int cmd_simulate(const Scenario& scenario, std::ostream& log);
int cmd_conditions(const Scenario& scenario, std::ostream& log);
int cmd_figure1(const std::filesystem::path& out_dir, std::size_t grid, double tol, std::ostream& log);
int cmd_sweep(const Scenario& scenario, std::ostream& log);

/// Formats with 17 significant digits.
std::string format_double(double x);

}  // namespace qgp::cli
