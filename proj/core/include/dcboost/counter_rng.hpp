#pragma once

#include <cstdint>
#include <utility>

namespace dcboost {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so results do not depend on evaluation order or on
// how work is split across threads.

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// 64 random bits for the given key.
std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

/// Uniform double in the open interval (0, 1).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

/// Two independent standard normals via Box-Muller on the uniforms at
/// counters 2*counter and 2*counter + 1.
std::pair<double, double> counter_normal_pair(std::uint64_t seed, std::uint64_t stream,
                                              std::uint64_t counter);

}  // namespace dcboost
