#include "risra/rng.hpp"

#include <array>

namespace risra {

Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b)
{
    const std::array<std::uint64_t, 4> key{seed, static_cast<std::uint64_t>(tag), a, b};
    std::array<std::uint32_t, 8> words{};
    for (std::size_t i = 0; i < key.size(); ++i) {
        words[2 * i] = static_cast<std::uint32_t>(key[i]);
        words[2 * i + 1] = static_cast<std::uint32_t>(key[i] >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

} // namespace risra
