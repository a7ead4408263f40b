#pragma once

#include <array>
#include <cstdint>

namespace riskhedge {

// Philox 4x32-10 counter-based generator. A block is a pure function of
// (counter, key), so draws indexed by (seed, path, step) are reproducible
// under any execution order or degree of parallelism.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// Uniform draw in the open interval (0, 1) for the given (seed, path, step).
double uniform_open01(std::uint64_t seed, std::uint64_t path, std::uint64_t step);

// Inverse standard normal CDF (Wichura's AS241, double precision).
double standard_normal_icdf(double u);

// Standard normal draw for (seed, path, step).
double normal_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step);

}  // namespace riskhedge
