#pragma once

#include <span>
#include <vector>

#include "risra/channel.hpp"

namespace risra {

/// Sub-channel -> granted-user row (index into the direct-gain matrix), or kNone.
struct Schedule {
    static constexpr int kNone = -1;
    std::vector<int> assignment;

    std::size_t n_assigned() const;
    bool operator==(const Schedule&) const = default;
};

/// Throws InvalidSchedule if the schedule has the wrong length, points
/// outside [0, n_users) or uses a user on two sub-channels.
void check_schedule(const Schedule& schedule, std::size_t n_users, std::size_t n_channels);

/// log2(1 + snr * gain^2).
inline double link_rate(double snr, double gain_magnitude)
{
    return std::log2(1.0 + snr * gain_magnitude * gain_magnitude);
}

/// Sum over assigned sub-channels of log2(1 + snr |h_d|^2).
double direct_sum_rate(const Schedule& schedule, const Matrix<cplx>& direct, double snr);

/// Greedy user-to-sub-channel assignment: visit (user, channel) pairs by
/// descending |h_d| (ties: lower channel, then lower user) and accept a pair
/// when both are still free, until min(K_n, C) pairs are placed.
/// Throws EmptyGrantSet when there are no granted users.
Schedule greedy_schedule(const Matrix<cplx>& direct);

/// Per-subarray phase theta_u = mod(arg h_d - arg h_u, 2pi), unit amplitude.
/// arg(0) is taken as 0.
std::vector<double> optimal_phases(cplx direct, std::span<const cplx> grouped);

/// h_d + sum_u h_u exp(j theta_u).
cplx combined_gain(cplx direct, std::span<const cplx> grouped, std::span<const double> phases);

/// |h_d| + sum_u |h_u|: the combined magnitude under optimal phases.
double aligned_magnitude(cplx direct, std::span<const cplx> grouped);

/// Sum over probed sub-channels of log2(1 + snr (|h_d| + sum_u |h_u|)^2).
/// `grouped` is indexed by the same user rows as `direct`.
double ris_sum_rate(const Schedule& schedule, const Matrix<cplx>& direct, const GroupedGains& grouped,
                    double snr);

} // namespace risra
