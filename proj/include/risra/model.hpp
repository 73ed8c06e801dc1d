#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace risra {

using Vec3 = std::array<double, 3>;

double distance(const Vec3& a, const Vec3& b);
double db_to_linear(double db);
double dbm_to_watt(double dbm);

enum class DirectFading {
    Rayleigh,
    /// |h_d|^2 fixed to direct_constant_gain, zero phase (deterministic oracle).
    Constant,
};

/// Static scenario parameters. dB quantities stay in dB here; linear values
/// are produced once by validate().
struct SystemConfig {
    int n_users = 50;
    int n_preambles = 30;
    int n_subchannels = 8;
    int max_grouping_level = 10;
    int n_elements = 1024;

    Vec3 bs_position{0.0, 100.0, 0.0};
    Vec3 ris_position{200.0, 0.0, 20.0};
    Vec3 user_position{1000.0, 100.0, 0.0};

    double pathloss_exp_direct = 3.5;
    double pathloss_exp_ris = 2.2;
    double ref_pathloss_db = -30.0;
    double tx_power_dbm = 26.0;
    double noise_power_dbm = -100.0;

    double coherence_time_s = 24e-3;
    double rr_duration_s = 0.3e-3;
    double pilot_duration_s = 10e-6;
    double carrier_freq_hz = 2e9;

    DirectFading direct_fading = DirectFading::Rayleigh;
    double direct_constant_gain = 1.0;
    bool ris_enabled = true;
};

/// Quantities derived from a validated SystemConfig. Immutable.
struct DerivedParams {
    double mean_snr = 0.0;  // P_t * beta0 / N0, linear
    double d_direct = 0.0;
    double d_user_ris = 0.0;
    double d_ris_bs = 0.0;

    double direct_variance = 0.0;   // d_s^-alpha1
    double user_ris_variance = 0.0; // d_{r,1}^-alpha2
    double ris_bs_variance = 0.0;   // d_{r,2}^-alpha2

    int max_level = 0;
    int n_elements = 0;
    double pilot_duration = 0.0;
    double coherence_time = 0.0;
    double rr_duration = 0.0;

    /// Indexed by J in 1..max_level; entry 0 is unused.
    std::vector<int> subarray_size;
    std::vector<double> probe_time;

    /// B(J) = M / 2^J. Throws LevelOutOfRange.
    int subarray(int level) const;
    /// tau_CE(J) = 2^{J+1} tau_s. Throws LevelOutOfRange.
    double tau_ce(int level) const;
    /// T_c - tau_CE(J): data time left after probing at level J.
    double ris_tx_time(int level) const { return coherence_time - tau_ce(level); }
};

/// Canonical `key = value` listing of every field, in declaration order.
std::string canonical_string(const SystemConfig& config);

/// FNV-1a 64 of canonical_string(config).
std::uint64_t config_hash(const SystemConfig& config);

/// 2^{J+1} * pilot_duration for 1 <= level <= max_level.
double tau_ce(int level, int max_level, double pilot_duration);

/// Checks every invariant of SystemConfig and computes the derived table.
/// Throws Error with NonPowerOfTwoElements, ProbeExceedsCoherence or
/// NonPositiveParameter.
DerivedParams validate(const SystemConfig& config);

} // namespace risra
