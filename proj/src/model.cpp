#include "risra/model.hpp"

#include <cmath>
#include <fmt/core.h>

#include "risra/error.hpp"

namespace risra {

double distance(const Vec3& a, const Vec3& b)
{
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double tau_ce(int level, int max_level, double pilot_duration)
{
    if (level < 1 || level > max_level) {
        throw Error(ErrorKind::LevelOutOfRange,
                    fmt::format("grouping level {} outside [1, {}]", level, max_level));
    }
    return std::ldexp(pilot_duration, level + 1);
}

int DerivedParams::subarray(int level) const
{
    if (level < 1 || level > max_level) {
        throw Error(ErrorKind::LevelOutOfRange,
                    fmt::format("grouping level {} outside [1, {}]", level, max_level));
    }
    return subarray_size[static_cast<std::size_t>(level)];
}

double DerivedParams::tau_ce(int level) const
{
    if (level < 1 || level > max_level) {
        throw Error(ErrorKind::LevelOutOfRange,
                    fmt::format("grouping level {} outside [1, {}]", level, max_level));
    }
    return probe_time[static_cast<std::size_t>(level)];
}

namespace {

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorKind::NonPositiveParameter, fmt::format("{} = {} must be > 0", name, value));
    }
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

std::string canonical_string(const SystemConfig& c)
{
    const auto vec = [](const Vec3& v) { return fmt::format("{:.17g},{:.17g},{:.17g}", v[0], v[1], v[2]); };
    std::string out;
    out += fmt::format("n_users = {}\n", c.n_users);
    out += fmt::format("n_preambles = {}\n", c.n_preambles);
    out += fmt::format("n_subchannels = {}\n", c.n_subchannels);
    out += fmt::format("max_grouping_level = {}\n", c.max_grouping_level);
    out += fmt::format("n_elements = {}\n", c.n_elements);
    out += fmt::format("bs_position = {}\n", vec(c.bs_position));
    out += fmt::format("ris_position = {}\n", vec(c.ris_position));
    out += fmt::format("user_position = {}\n", vec(c.user_position));
    out += fmt::format("pathloss_exp_direct = {:.17g}\n", c.pathloss_exp_direct);
    out += fmt::format("pathloss_exp_ris = {:.17g}\n", c.pathloss_exp_ris);
    out += fmt::format("ref_pathloss_db = {:.17g}\n", c.ref_pathloss_db);
    out += fmt::format("tx_power_dbm = {:.17g}\n", c.tx_power_dbm);
    out += fmt::format("noise_power_dbm = {:.17g}\n", c.noise_power_dbm);
    out += fmt::format("coherence_time_s = {:.17g}\n", c.coherence_time_s);
    out += fmt::format("rr_duration_s = {:.17g}\n", c.rr_duration_s);
    out += fmt::format("pilot_duration_s = {:.17g}\n", c.pilot_duration_s);
    out += fmt::format("carrier_freq_hz = {:.17g}\n", c.carrier_freq_hz);
    out += fmt::format("direct_fading = {}\n",
                       c.direct_fading == DirectFading::Constant ? "constant" : "rayleigh");
    out += fmt::format("direct_constant_gain = {:.17g}\n", c.direct_constant_gain);
    out += fmt::format("ris_enabled = {}\n", c.ris_enabled ? "true" : "false");
    return out;
}

std::uint64_t config_hash(const SystemConfig& config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : canonical_string(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

DerivedParams validate(const SystemConfig& c)
{
    require_positive(c.n_users, "n_users");
    require_positive(c.n_preambles, "n_preambles");
    require_positive(c.n_subchannels, "n_subchannels");
    require_positive(c.max_grouping_level, "max_grouping_level");
    require_positive(c.pathloss_exp_direct, "pathloss_exp_direct");
    require_positive(c.pathloss_exp_ris, "pathloss_exp_ris");
    require_positive(c.coherence_time_s, "coherence_time_s");
    require_positive(c.rr_duration_s, "rr_duration_s");
    require_positive(c.pilot_duration_s, "pilot_duration_s");
    if (c.direct_fading == DirectFading::Constant && !(c.direct_constant_gain >= 0.0)) {
        throw Error(ErrorKind::NonPositiveParameter,
                    fmt::format("direct_constant_gain = {} must be >= 0", c.direct_constant_gain));
    }
    if (c.max_grouping_level > 30) {
        throw Error(ErrorKind::NonPowerOfTwoElements,
                    fmt::format("max_grouping_level {} too large", c.max_grouping_level));
    }
    if (!is_power_of_two(c.n_elements) || c.n_elements != (1 << c.max_grouping_level)) {
        throw Error(ErrorKind::NonPowerOfTwoElements,
                    fmt::format("n_elements = {} must equal 2^max_grouping_level = {}", c.n_elements,
                                1L << c.max_grouping_level));
    }

    DerivedParams d;
    d.d_direct = distance(c.user_position, c.bs_position);
    d.d_user_ris = distance(c.user_position, c.ris_position);
    d.d_ris_bs = distance(c.ris_position, c.bs_position);
    require_positive(d.d_direct, "user-BS distance");
    require_positive(d.d_user_ris, "user-RIS distance");
    require_positive(d.d_ris_bs, "RIS-BS distance");

    const double pt = dbm_to_watt(c.tx_power_dbm);
    const double n0 = dbm_to_watt(c.noise_power_dbm);
    const double beta0 = db_to_linear(c.ref_pathloss_db);
    require_positive(pt, "tx power (linear)");
    require_positive(n0, "noise power (linear)");
    require_positive(beta0, "reference path loss (linear)");
    d.mean_snr = pt * beta0 / n0;

    d.direct_variance = std::pow(d.d_direct, -c.pathloss_exp_direct);
    d.user_ris_variance = std::pow(d.d_user_ris, -c.pathloss_exp_ris);
    d.ris_bs_variance = std::pow(d.d_ris_bs, -c.pathloss_exp_ris);

    d.max_level = c.max_grouping_level;
    d.n_elements = c.n_elements;
    d.pilot_duration = c.pilot_duration_s;
    d.coherence_time = c.coherence_time_s;
    d.rr_duration = c.rr_duration_s;

    d.subarray_size.assign(static_cast<std::size_t>(d.max_level) + 1, 0);
    d.probe_time.assign(static_cast<std::size_t>(d.max_level) + 1, 0.0);
    for (int level = 1; level <= d.max_level; ++level) {
        const double probe = tau_ce(level, d.max_level, c.pilot_duration_s);
        if (!(probe < c.coherence_time_s)) {
            throw Error(ErrorKind::ProbeExceedsCoherence,
                        fmt::format("tau_CE({}) = {} s is not below coherence_time_s = {} s", level,
                                    probe, c.coherence_time_s));
        }
        d.subarray_size[static_cast<std::size_t>(level)] = c.n_elements >> level;
        d.probe_time[static_cast<std::size_t>(level)] = probe;
    }
    return d;
}

} // namespace risra
