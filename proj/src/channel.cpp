#include "risra/channel.hpp"

#include <bit>
#include <cmath>
#include <fmt/core.h>
#include <ostream>

#include "risra/error.hpp"

namespace risra {

cplx sample_cscg(Rng& rng, double variance)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

Matrix<cplx> sample_direct(Rng& rng, std::size_t n_users, const SystemConfig& config,
                           const DerivedParams& derived)
{
    const auto n_channels = static_cast<std::size_t>(config.n_subchannels);
    Matrix<cplx> direct(n_users, n_channels);
    if (config.direct_fading == DirectFading::Constant) {
        const cplx h{std::sqrt(config.direct_constant_gain), 0.0};
        for (auto& v : direct.data()) {
            v = h;
        }
        return direct;
    }
    for (auto& v : direct.data()) {
        v = sample_cscg(rng, derived.direct_variance);
    }
    return direct;
}

void sample_cascaded(Rng& rng, const SystemConfig& config, const DerivedParams& derived,
                     std::span<cplx> out)
{
    if (!config.ris_enabled) {
        std::fill(out.begin(), out.end(), cplx{});
        return;
    }
    for (auto& v : out) {
        const cplx f = sample_cscg(rng, derived.user_ris_variance);
        const cplx g = sample_cscg(rng, derived.ris_bs_variance);
        v = f * g;
    }
}

ChannelRealization sample_realization(Rng& rng, std::size_t n_granted, const SystemConfig& config,
                                      const DerivedParams& derived)
{
    ChannelRealization r;
    r.n_users = n_granted;
    r.n_subchannels = static_cast<std::size_t>(config.n_subchannels);
    r.n_elements = static_cast<std::size_t>(config.n_elements);
    r.direct = sample_direct(rng, n_granted, config, derived);
    r.cascaded.resize(n_granted * r.n_subchannels * r.n_elements);
    sample_cascaded(rng, config, derived, r.cascaded);
    return r;
}

void group_elements(std::span<const cplx> elements, int level, std::span<cplx> out)
{
    const std::size_t groups = std::size_t{1} << level;
    const std::size_t block = elements.size() / groups;
    for (std::size_t u = 0; u < groups; ++u) {
        cplx sum{};
        for (std::size_t m = 0; m < block; ++m) {
            sum += elements[u * block + m];
        }
        out[u] = sum;
    }
}

GroupedGains group(const ChannelRealization& realization, int level)
{
    const int max_level = std::countr_zero(realization.n_elements);
    if (level < 1 || level > max_level || !std::has_single_bit(realization.n_elements)) {
        throw Error(ErrorKind::LevelOutOfRange,
                    fmt::format("grouping level {} outside [1, {}]", level, max_level));
    }
    GroupedGains g;
    g.level = level;
    g.n_users = realization.n_users;
    g.n_subchannels = realization.n_subchannels;
    g.n_groups = std::size_t{1} << level;
    g.gains.resize(g.n_users * g.n_subchannels * g.n_groups);
    for (std::size_t k = 0; k < g.n_users; ++k) {
        for (std::size_t c = 0; c < g.n_subchannels; ++c) {
            std::span<cplx> out{g.gains.data() + (k * g.n_subchannels + c) * g.n_groups, g.n_groups};
            group_elements(realization.elements(k, c), level, out);
        }
    }
    return g;
}

void write_realization(std::ostream& os, const ChannelRealization& r)
{
    os << "user channel element re im\n";
    for (std::size_t k = 0; k < r.n_users; ++k) {
        for (std::size_t c = 0; c < r.n_subchannels; ++c) {
            const cplx h = r.direct(k, c);
            os << fmt::format("{} {} 0 {:.17g} {:.17g}\n", k, c, h.real(), h.imag());
            const auto el = r.elements(k, c);
            for (std::size_t m = 0; m < el.size(); ++m) {
                os << fmt::format("{} {} {} {:.17g} {:.17g}\n", k, c, m + 1, el[m].real(), el[m].imag());
            }
        }
    }
}

} // namespace risra
