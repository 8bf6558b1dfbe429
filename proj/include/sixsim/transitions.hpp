#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sixsim/model.hpp"
#include "sixsim/rng.hpp"

namespace sixsim {

enum class TransitionLabel : std::uint8_t {
    RrnaInitFree,          // promoter-held polymerase enters elongation, promoter refilled from the free pool
    RrnaInitEmptying,      // same, but no free polymerase: promoter empties
    RrnaCompleteToFree,    // completed polymerase returns to the free pool
    RrnaCompleteToPromoter,// completed polymerase lands on an empty promoter
    MrnaBind,              // free polymerase binds an empty mRNA slot
    MrnaRelease,           // mRNA slot releases its polymerase
    SixSCreate,
    SixSDegrade,
    Sequester,
    Desequester,
    // generic labels for the comparison processes
    Birth,
    Death,
    Arrival,
    Service,
    SwapToSequestered,     // limit chain (s,z) -> (s+1, z-1)
    SwapToFree,            // limit chain (s,z) -> (s-1, z+1)
};

const char* to_string(TransitionLabel label);

// One enabled transition of the full or auxiliary chain: label, rate, and the
// state delta prior to promoter normalization. dr applies to type j; du
// applies to the promoter index in `promoter`.
struct Transition {
    TransitionLabel label;
    std::int8_t j = -1;        // rRNA type (0-based), -1 if not applicable
    std::int8_t promoter = -1; // promoter whose occupancy changes, -1 if none
    double rate = 0;
    std::int8_t df = 0;
    std::int8_t ds = 0;
    std::int8_t dz = 0;
    std::int8_t dr = 0; // change of r[j]
    std::int8_t du = 0; // change of u[promoter]
};

// All transitions enabled in `x` (strictly positive rate), one entry per
// target, matching the generator of the chain family by family.
std::vector<Transition> enumerate_transitions_full(const FullState& x, const ModelParams& p);

// The six transition families of the reduced model; enabled ones only.
std::vector<Transition> enumerate_transitions_aux(const AuxState& x, const ModelParams& p);

// Applies the delta of `t` to `x` (no promoter normalization).
void apply_transition(FullState& x, const Transition& t);
void apply_transition(AuxState& x, const Transition& t);

// High-affinity promoter rule: while a free polymerase and an empty promoter
// coexist, move one polymerase onto an empty promoter chosen uniformly at
// random. The final state does not depend on the fill order.
void normalize_promoters(FullState& x, Rng& rng);

} // namespace sixsim
