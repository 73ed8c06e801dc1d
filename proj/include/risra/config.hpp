#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "risra/baselines.hpp"
#include "risra/engine.hpp"
#include "risra/model.hpp"
#include "risra/strategy.hpp"

namespace risra {

/// Everything a run needs. Loaded from one flat `key = value` file; every
/// key not present keeps its documented default.
struct Settings {
    SystemConfig system;
    McParams mc;
    SolverSettings solver;
    SimulationOptions sim;
    StrategyKind strategy = StrategyKind::Proposed;

    // Sweep grid: Cartesian product; an empty axis means the base value.
    std::vector<double> sweep_tx_power_dbm;
    std::vector<double> sweep_coherence_time_s;
    std::vector<int> sweep_n_elements;
    std::vector<StrategyKind> sweep_strategies;

    std::vector<SweepPoint> sweep_points() const;
};

/// Parses `text` (the contents of `source`) on top of `settings`.
/// Throws Error(Config) naming the source, line and key.
void parse_settings(std::string_view text, const std::string& source, Settings& settings);

/// Applies one `key=value` override. Throws Error(Config) for unknown keys.
void apply_override(Settings& settings, std::string_view assignment);

/// Defaults, then the file at `path` (if non-empty), then overrides.
/// Resolves n_elements / max_grouping_level when only one of them is given.
Settings load_settings(const std::string& path, const std::vector<std::string>& overrides = {});

/// Every key this loader understands.
std::vector<std::string> known_keys();

} // namespace risra
