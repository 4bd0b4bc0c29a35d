// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace rrce {

/// Independent, reproducible stream keyed by (seed, stream id, trial index).
/// Streams with different keys are seeded through std::seed_seq so that
/// parallel trials never share state and results do not depend on the order
/// in which trials run.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream_id,
                                   std::uint64_t trial = 0)
{
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(stream_id), hi(stream_id), lo(trial), hi(trial),
                      0x9e3779b9u};
    return std::mt19937_64(seq);
}

} // namespace rrce
