#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "manet/engine.hpp"

namespace manet {

/// Configuration or spec-file problem; carries the offending line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    explicit ConfigError(const std::string& what) : std::runtime_error(what), line_(0) {}
    int line() const { return line_; }

private:
    int line_;
};

struct SweepPoint {
    std::string label;
    std::vector<std::pair<std::string, std::string>> overrides;  // key = value pairs
};

struct ExperimentSpec {
    std::string name = "experiment";
    ScenarioConfig base;
    std::vector<SweepPoint> sweep;  // empty means a single run of the base config
    int n_seeds = 10;
    std::string out_dir = ".";
};

/// Apply one configuration key (the key set shared by the config file's
/// scenario/radio/mac/dsr sections and by sweep points). Unknown keys or
/// unparsable values throw ConfigError.
void apply_config_key(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Parse the flat key-value experiment format. Radio fields left unset keep
/// their defaults (24.50 dBm transmit power, -64.38 dBm threshold, sigma
/// 3 dB, d0 1 m, exponent 3.0, 914 MHz, unit gains, 1 m antennas).
ExperimentSpec parse_config(const std::string& path);

/// Resolve one sweep point against the base scenario.
ScenarioConfig resolve_point(const ExperimentSpec& spec, const SweepPoint& point);

/// Run every sweep point with n_seeds replications and emit
/// <name>.csv plus <name>_seeds.csv under out_dir. Throws on failure.
void run_experiment(const ExperimentSpec& spec);

/// Built-in experiments named fig5 through fig10: the closed-form link
/// geometry and propagation curves, and the delivery-ratio studies over the
/// constant-density scenario suite (two-ray vs shadowing, the analytic
/// prediction overlay, and the two mitigations: higher transmit power and a
/// raised retry limit).
void run_builtin(const std::string& which, int n_seeds, const std::string& out_dir);

}  // namespace manet
