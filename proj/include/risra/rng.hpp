#pragma once

#include <cstdint>
#include <random>

namespace risra {

using Rng = std::mt19937_64;

// Sub-stream tags. A stream is keyed by (master seed, tag, a, b); every
// consumer that must be reproducible independently of thread scheduling
// draws from its own keyed stream:
//   Frame        a = strategy id,  b = frame index
//   CascadePool  a = pool sample index
//   DirectPool   a = granted count I, b = outer sample index
//   Validation   a = check id,     b = instance index
enum class StreamTag : std::uint64_t {
    Frame = 1,
    CascadePool = 2,
    DirectPool = 3,
    Validation = 4,
    Contention = 5,
};

/// Deterministic engine for the keyed sub-stream (seed, tag, a, b).
Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0);

} // namespace risra
