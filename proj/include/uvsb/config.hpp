#pragma once

#include "uvsb/analysis.hpp"
#include "uvsb/core.hpp"
#include "uvsb/montecarlo.hpp"
#include "uvsb/payoff.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace uvsb {

/// Ordered "section.key" -> text table.  Starts from the built-in defaults;
/// files and overrides may only touch keys that already exist.
class ConfigTable {
public:
    static ConfigTable defaults();

    /// Merges an INI file.  Unknown sections are skipped (a manifest's
    /// [run] section, for instance); unknown keys in known sections are a
    /// ConfigError.
    void load_file(const std::filesystem::path& path);

    /// Applies "section.key=value".
    void set_override(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    bool contains(const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    /// Writes every entry, followed by `extra` entries (e.g. "run.seed").
    void write_ini(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& extra = {}) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

struct McSettings {
    std::uint64_t seed = 20240601;
    RateOptions rate;
    std::vector<double> rate_deltas;
    std::vector<std::string> controls;  // "d", "u", "threshold"
    double threshold_level = 100.0;
    int bounds_paths = 20;
    int bounds_steps = 250;
};

/// Typed view of a ConfigTable.
struct Settings {
    ModelParams model;
    GridSpec grid;
    SolverConfig solver;
    PayoffSpec payoff;
    double regularize_eps = 0.0;
    std::vector<double> sweep_deltas;
    SweepOptions sweep;
    std::vector<double> gamma_deltas;
    double compare_x_min = 60.0;
    double compare_x_max = 140.0;
    double compare_tol = 0.1;  // absolute; 1e-3 * x0 by default
    McSettings mc;
};

/// Parses and validates; throws ConfigError naming the offending key.
Settings resolve(const ConfigTable& table);

/// Builds the control rule for one of the names in McSettings::controls.
ControlRule make_control(const std::string& name, const Settings& s);

std::vector<double> parse_list(const std::string& text);

}  // namespace uvsb
