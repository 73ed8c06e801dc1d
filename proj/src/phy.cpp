#include "risra/phy.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/core.h>
#include <numbers>
#include <tuple>

#include "risra/error.hpp"

namespace risra {

std::size_t Schedule::n_assigned() const
{
    return static_cast<std::size_t>(
        std::count_if(assignment.begin(), assignment.end(), [](int a) { return a != kNone; }));
}

void check_schedule(const Schedule& schedule, std::size_t n_users, std::size_t n_channels)
{
    if (schedule.assignment.size() != n_channels) {
        throw Error(ErrorKind::InvalidSchedule,
                    fmt::format("schedule has {} entries, expected {}", schedule.assignment.size(),
                                n_channels));
    }
    std::vector<bool> used(n_users, false);
    for (std::size_t c = 0; c < n_channels; ++c) {
        const int user = schedule.assignment[c];
        if (user == Schedule::kNone) {
            continue;
        }
        if (user < 0 || static_cast<std::size_t>(user) >= n_users) {
            throw Error(ErrorKind::InvalidSchedule,
                        fmt::format("sub-channel {} assigned to unknown user {}", c, user));
        }
        if (used[static_cast<std::size_t>(user)]) {
            throw Error(ErrorKind::InvalidSchedule,
                        fmt::format("user {} assigned to more than one sub-channel", user));
        }
        used[static_cast<std::size_t>(user)] = true;
    }
}

double direct_sum_rate(const Schedule& schedule, const Matrix<cplx>& direct, double snr)
{
    check_schedule(schedule, direct.rows(), direct.cols());
    double rate = 0.0;
    for (std::size_t c = 0; c < schedule.assignment.size(); ++c) {
        const int user = schedule.assignment[c];
        if (user != Schedule::kNone) {
            rate += link_rate(snr, std::abs(direct(static_cast<std::size_t>(user), c)));
        }
    }
    return rate;
}

Schedule greedy_schedule(const Matrix<cplx>& direct)
{
    const std::size_t n_users = direct.rows();
    const std::size_t n_channels = direct.cols();
    if (n_users == 0) {
        throw Error(ErrorKind::EmptyGrantSet, "greedy scheduling needs at least one granted user");
    }

    struct Entry {
        double magnitude;
        std::size_t channel;
        std::size_t user;
    };
    std::vector<Entry> entries;
    entries.reserve(n_users * n_channels);
    for (std::size_t k = 0; k < n_users; ++k) {
        for (std::size_t c = 0; c < n_channels; ++c) {
            entries.push_back({std::abs(direct(k, c)), c, k});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(b.magnitude, a.channel, a.user) < std::tie(a.magnitude, b.channel, b.user);
    });

    Schedule schedule;
    schedule.assignment.assign(n_channels, Schedule::kNone);
    std::vector<bool> user_used(n_users, false);
    const std::size_t target = std::min(n_users, n_channels);
    std::size_t placed = 0;
    for (const Entry& e : entries) {
        if (placed == target) {
            break;
        }
        if (schedule.assignment[e.channel] == Schedule::kNone && !user_used[e.user]) {
            schedule.assignment[e.channel] = static_cast<int>(e.user);
            user_used[e.user] = true;
            ++placed;
        }
    }
    return schedule;
}

namespace {

double arg0(cplx z) { return z == cplx{} ? 0.0 : std::arg(z); }

} // namespace

std::vector<double> optimal_phases(cplx direct, std::span<const cplx> grouped)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> phases(grouped.size());
    const double base = arg0(direct);
    for (std::size_t u = 0; u < grouped.size(); ++u) {
        double theta = std::fmod(base - arg0(grouped[u]), two_pi);
        if (theta < 0.0) {
            theta += two_pi;
        }
        if (theta >= two_pi) {
            theta = 0.0;
        }
        phases[u] = theta;
    }
    return phases;
}

cplx combined_gain(cplx direct, std::span<const cplx> grouped, std::span<const double> phases)
{
    cplx sum = direct;
    for (std::size_t u = 0; u < grouped.size(); ++u) {
        sum += grouped[u] * std::polar(1.0, phases[u]);
    }
    return sum;
}

double aligned_magnitude(cplx direct, std::span<const cplx> grouped)
{
    double sum = std::abs(direct);
    for (const cplx& h : grouped) {
        sum += std::abs(h);
    }
    return sum;
}

double ris_sum_rate(const Schedule& schedule, const Matrix<cplx>& direct, const GroupedGains& grouped,
                    double snr)
{
    check_schedule(schedule, direct.rows(), direct.cols());
    if (grouped.n_users != direct.rows() || grouped.n_subchannels != direct.cols()) {
        throw Error(ErrorKind::InvalidSchedule, "grouped gains do not match the direct-gain matrix");
    }
    double rate = 0.0;
    for (std::size_t c = 0; c < schedule.assignment.size(); ++c) {
        const int user = schedule.assignment[c];
        if (user == Schedule::kNone) {
            continue;
        }
        const auto k = static_cast<std::size_t>(user);
        rate += link_rate(snr, aligned_magnitude(direct(k, c), grouped.at(k, c)));
    }
    return rate;
}

} // namespace risra
