#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "risra/baselines.hpp"
#include "risra/model.hpp"

namespace risra {

struct ProbeRecord {
    int phase = 0; // 1-based RR phase index
    int level = 0;
};

enum class Transmission { Direct, Ris };

/// One frame, from its first RR phase up to and including its DT phase.
struct FrameTrace {
    int n_rr_phases = 0;             // N
    int empty_rr_phases = 0;         // RR phases that granted nobody
    std::vector<ProbeRecord> probes; // every GRP phase, the last one may be the DT phase's
    Transmission final_kind = Transmission::Direct;
    double final_rate = 0.0;         // R_d* or R_r of the DT phase
    int final_level = 0;             // J_N for RIS-aided DT
    std::size_t final_users = 0;     // users scheduled in the DT phase
    double traffic = 0.0;            // Y_N, bit/Hz
    double duration = 0.0;           // T_N, seconds
};

/// RR -> first layer -> {DT | skip | GRP -> second layer -> {DT | skip}},
/// repeated with fresh contention and fading until a DT phase happens.
/// Throws SkipCapExceeded after `skip_cap` consecutive phases without DT.
FrameTrace run_frame(const Policy& policy, const SystemConfig& config, const DerivedParams& derived,
                     Rng& rng, long skip_cap = 1'000'000);

struct SimulationOptions {
    std::size_t n_frames = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    long skip_cap = 1'000'000;
};

struct SimulationReport {
    std::string strategy;
    double tx_power_dbm = 0.0;
    double coherence_time_s = 0.0;
    int n_elements = 0;
    std::size_t n_frames = 0;
    double total_traffic = 0.0;
    double total_time = 0.0;
    double throughput = 0.0;
    double ci_half_width = 0.0; // 95%, delta-method ratio estimator
    std::uint64_t seed = 0;
    double lambda_star_used = 0.0; // NaN when the strategy uses none
    std::uint64_t config_hash = 0;

    double mean_rr_phases = 0.0;
    double ris_fraction = 0.0; // frames ending in RIS-aided DT
    std::size_t total_rr_phases = 0;
    std::size_t total_probes = 0;
};

/// Frame f draws from stream (seed, Frame, 0, f) whatever the strategy, so
/// strategies see common random numbers and results do not depend on the
/// thread count. Frames are aggregated in fixed blocks, in block order.
SimulationReport run_simulation(const Policy& policy, const SystemConfig& config,
                                const DerivedParams& derived, const SimulationOptions& options);

/// Self-describing CSV: strategy,P_t_dbm,T_c_s,M,n_frames,throughput,
/// ci_half_width,seed,lambda_star_used,config_hash
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const SimulationReport& report);

struct SweepPoint {
    double tx_power_dbm = 0.0;
    double coherence_time_s = 0.0;
    int n_elements = 0;
};

struct SweepRequest {
    SystemConfig base;
    McParams mc;
    SolverSettings solver;
    std::vector<SweepPoint> points;
    std::vector<StrategyKind> strategies;
    SimulationOptions sim;
};

struct SweepRow {
    SweepPoint point;
    SimulationReport report;
    std::optional<OfflineSolution> solution;
};

/// Applies a grid point to the base config (M also sets the maximal level).
SystemConfig apply_point(const SystemConfig& base, const SweepPoint& point);

/// Per point: validate, solve every threshold the strategies need (same
/// cascade pool and direct-channel pool for all of them), then simulate.
std::vector<SweepRow> sweep(const SweepRequest& request);

} // namespace risra
