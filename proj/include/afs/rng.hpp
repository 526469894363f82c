// Counter-based pseudo-random generation (Philox 4x32-10).
//
// Each draw is a pure function of (key, counter), so a potential value keyed
// by (master_seed, realization_index, site) is identical no matter which
// worker computes it or in which order -- the basis of the harness's
// bit-reproducibility across schedules.

#pragma once

#include <array>
#include <cstdint>

#include "afs/lattice.hpp"

namespace afs {

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// 64-bit site code: splitmix64 chain over the coordinates.
uint64_t site_code(const Point& p);

// Uniform double in [0,1) from (master_seed, realization_index, site).
double site_uniform(uint64_t master_seed, uint64_t realization_index, const Point& site);

// Generic counter-keyed uniform, for draws not tied to a lattice site.
double counter_uniform(uint64_t master_seed, uint64_t stream, uint64_t counter);

}  // namespace afs
