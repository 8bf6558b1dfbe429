#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "sixsim/model.hpp"

namespace sixsim {

// Explicit finite-chain construction for desk-size parameter sets: the state
// space is enumerated breadth-first through the public transition list, the
// free-6S count is truncated at z_cap (creation disabled there; the clipped
// stationary mass is astronomically small for the intended rate choices), and
// the stationary vector is solved densely. This path shares nothing with the
// event-loop kernels, so it can arbitrate them.
struct GeneratorOracle {
    std::vector<FullState> states;
    std::map<std::uint64_t, std::size_t> index; // packed state -> position
    std::vector<double> stationary;
    std::int64_t z_cap = 0;

    static std::uint64_t pack(const FullState& x);
    bool contains(const FullState& x) const { return index.count(pack(x)) > 0; }
};

GeneratorOracle build_generator_oracle(const ModelParams& p, const FullState& initial,
                                       std::int64_t z_cap);

// Dense solve of pi Q = 0, sum(pi) = 1 by Gaussian elimination with partial
// pivoting; Q given as dense row-major rates (row = from, col = to).
std::vector<double> stationary_vector(std::vector<std::vector<double>> Q);

} // namespace sixsim
