#pragma once

// Counter-based random generation: a Philox4x32-10 block cipher keyed by the
// run seed, mapped to standard normals through the inverse CDF. Every draw is
// a pure function of (seed, stream, mode, step), so results do not depend on
// scheduling or worker count.

#include <array>
#include <cstdint>

namespace spde::rng {

// One Philox4x32-10 block (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Uniform double in (0,1) from 64 random bits (53-bit mantissa, never 0 or 1).
double to_unit_interval(std::uint64_t bits);

// Inverse standard normal CDF, Wichura's PPND16 (AS 241); |error| < 1e-15
// over the full open interval.
double normal_inv_cdf(double u);

// Two independent N(0,1) variates addressed by (seed, stream, mode, pair_index).
// Entries (mode, 2k) and (mode, 2k+1) of a noise matrix come from pair_index k.
struct NormalPair {
    double first;
    double second;
};
NormalPair normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint32_t mode,
                       std::uint64_t pair_index);

// Single N(0,1) entry at (seed, stream, mode, step); consistent with normal_pair.
double normal_at(std::uint64_t seed, std::uint64_t stream, std::uint32_t mode,
                 std::uint64_t step);

}  // namespace spde::rng
