#pragma once

#include <cstdint>
#include <random>

namespace fqmsim {

/// Draw from [0, 1) using the top 53 bits of one mt19937_64 output.
/// The generator's output sequence is pinned by the standard, so draws
/// are reproducible across platforms for a fixed seed.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace fqmsim
