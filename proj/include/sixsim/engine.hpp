#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "sixsim/model.hpp"
#include "sixsim/rng.hpp"
#include "sixsim/transitions.hpp"

namespace sixsim {

class absorbing_state_error : public model_error {
public:
    using model_error::model_error;
};

inline constexpr std::uint64_t kDefaultEventBudget = 1'000'000'000ULL;

// Stopping condition of a run. TimeHorizon caps the clock; the state
// predicates fire on the post-event state (and at t = 0 if already true).
struct StopRule {
    enum class Kind {
        TimeHorizon,  // run until t = horizon
        FreeBelow,    // first t with f <= level
        FreeHitsZero, // first t with f == 0
        AllRrnaFull,  // first t with r[j] == C_r[j] for all j
        AllRrnaEmpty, // first t with r[j] == 0 for all j
        HitsZero,     // scalar chains: first t with y == 0
        ReachesLevel, // scalar chains: first t with y >= level
    };
    Kind kind = Kind::TimeHorizon;
    double horizon = 0;
    std::int64_t level = 0;

    static StopRule time_horizon(double T) { return {Kind::TimeHorizon, T, 0}; }
    static StopRule free_below(std::int64_t level) { return {Kind::FreeBelow, 0, level}; }
    static StopRule free_hits_zero() { return {Kind::FreeHitsZero, 0, 0}; }
    static StopRule all_rrna_full() { return {Kind::AllRrnaFull, 0, 0}; }
    static StopRule all_rrna_empty() { return {Kind::AllRrnaEmpty, 0, 0}; }
    static StopRule hits_zero() { return {Kind::HitsZero, 0, 0}; }
    static StopRule reaches_level(std::int64_t level) { return {Kind::ReachesLevel, 0, level}; }
};

enum class StopReason { Horizon, Predicate, Budget };

struct RunResult {
    double t_end = 0;
    StopReason reason = StopReason::Horizon;
    std::uint64_t n_events = 0;
};

// Observer base with no-op hooks. segment() reports every constant piece
// [t0, t1) of the path; event() the jump that ends it; end() the final state
// at the stop time. Derived observers override what they need.
struct NullObserver {
    template <class State>
    void segment(double, double, const State&) {}
    template <class State>
    void event(double, TransitionLabel, const State&) {}
    template <class State>
    void end(double, const State&) {}
};

namespace detail {

inline int pick_slot(const double* rates, int n, double total, Rng& rng) {
    double u = rng.uniform01() * total;
    int last_enabled = 0;
    for (int i = 0; i < n; ++i) {
        if (rates[i] <= 0) continue;
        last_enabled = i;
        u -= rates[i];
        if (u <= 0) return i;
    }
    return last_enabled; // float rounding: fall back to the last enabled slot
}

} // namespace detail

// Direct-method realization of a chain: draw the dwell from the total rate,
// then the target proportionally to its rate. Deterministic given the seed.
template <class Model, class Observer>
RunResult run_chain(const Model& model, typename Model::State& state, const StopRule& stop,
                    Rng& rng, Observer&& obs, std::uint64_t budget = kDefaultEventBudget) {
    model.check_state(state);
    const bool by_horizon = stop.kind == StopRule::Kind::TimeHorizon;
    if (!by_horizon && model.stop_matches(stop, state)) {
        obs.end(0.0, state);
        return {0.0, StopReason::Predicate, 0};
    }

    std::array<double, Model::kMaxSlots> rates;
    double t = 0;
    std::uint64_t n = 0;
    const int n_slots = model.n_slots();

    for (;;) {
        const double total = model.fill_rates(state, rates.data());
        if (!(total > 0)) {
            if (by_horizon) { // absorbed: path is constant up to the horizon
                obs.segment(t, stop.horizon, state);
                obs.end(stop.horizon, state);
                return {stop.horizon, StopReason::Horizon, n};
            }
            throw absorbing_state_error("run_chain: total rate is zero");
        }
        const double dwell = rng.exponential(total);
        const double tn = t + dwell;
        if (by_horizon && tn > stop.horizon) {
            obs.segment(t, stop.horizon, state);
            obs.end(stop.horizon, state);
            return {stop.horizon, StopReason::Horizon, n};
        }
        const int slot = detail::pick_slot(rates.data(), n_slots, total, rng);
        obs.segment(t, tn, state);
        model.apply(slot, state, rng);
        ++n;
        obs.event(tn, model.slot_label(slot), state);
        t = tn;
        if (!by_horizon && model.stop_matches(stop, state)) {
            obs.end(t, state);
            return {t, StopReason::Predicate, n};
        }
        if (n >= budget) {
            obs.end(t, state);
            return {t, StopReason::Budget, n};
        }
    }
}

// ---------------------------------------------------------------------------
// Chain kernels. These are the hot paths; the slot layout of FullChain
// aggregates the completion-to-promoter family per type (the landing promoter
// is drawn uniformly among the empty ones in apply, which matches the
// per-promoter rates beta_r[j] / #empty exactly).
// ---------------------------------------------------------------------------

class FullChain {
public:
    using State = FullState;
    static constexpr int kMaxJ = 16;
    static constexpr int kMaxSlots = 4 * kMaxJ + 6;

    explicit FullChain(const ModelParams& p) : p_(p) { p.validate(); }

    const ModelParams& params() const { return p_; }

    int n_slots() const { return 4 * p_.J + 6; }

    void check_state(const State& x) const { validate_state(x, p_); }

    double fill_rates(const State& x, double* rr) const {
        const int J = p_.J;
        std::int64_t ur_sum = 0;
        if (x.f > 0) {
            // on the state space f > 0 forces every promoter occupied
            for (int j = 0; j < J; ++j) {
                rr[j] = (x.r[j] < p_.C_r[j]) ? p_.alpha_r[j] : 0.0;
                rr[J + j] = 0.0;
                rr[2 * J + j] = (x.r[j] > 0) ? p_.beta_r[j] : 0.0;
                rr[3 * J + j] = 0.0;
                ur_sum += 1 + x.r[j];
            }
        } else {
            int occupied = 0;
            for (int j = 0; j < J; ++j) {
                occupied += x.u[j];
                ur_sum += x.u[j] + x.r[j];
            }
            const bool any_empty = occupied < J;
            for (int j = 0; j < J; ++j) {
                rr[j] = 0.0;
                rr[J + j] = (x.u[j] == 1 && x.r[j] < p_.C_r[j]) ? p_.alpha_r[j] : 0.0;
                rr[2 * J + j] = (!any_empty && x.r[j] > 0) ? p_.beta_r[j] : 0.0;
                rr[3 * J + j] = (any_empty && x.r[j] > 0) ? p_.beta_r[j] : 0.0;
            }
        }
        const std::int64_t m = p_.N - x.f - x.s - ur_sum;
        const double f = static_cast<double>(x.f);
        const double z = static_cast<double>(x.z);
        rr[4 * J + 0] = p_.alpha_m * f * static_cast<double>(p_.C_m - m);
        rr[4 * J + 1] = p_.beta_m * static_cast<double>(m);
        rr[4 * J + 2] = p_.beta_6;
        rr[4 * J + 3] = p_.delta_6 * z;
        rr[4 * J + 4] = p_.lambda * f * z;
        rr[4 * J + 5] = p_.eta * static_cast<double>(x.s);

        double total = 0;
        const int n = 4 * J + 6;
        for (int i = 0; i < n; ++i) total += rr[i];
        return total;
    }

    void apply(int slot, State& x, Rng& rng) const {
        const int J = p_.J;
        if (slot < 4 * J) {
            const int j = slot % J;
            switch (slot / J) {
                case 0: // elongation starts, promoter refilled from the free pool
                    x.f -= 1;
                    x.r[j] += 1;
                    break;
                case 1: // elongation starts, promoter empties (no free polymerase)
                    x.u[j] = 0;
                    x.r[j] += 1;
                    break;
                case 2: // completion, polymerase freed
                    x.f += 1;
                    x.r[j] -= 1;
                    break;
                case 3: { // completion straight onto an empty promoter
                    x.r[j] -= 1;
                    int empties[kMaxJ];
                    int n = 0;
                    for (int i = 0; i < J; ++i)
                        if (x.u[i] == 0) empties[n++] = i;
                    const int pick =
                        (n == 1) ? empties[0]
                                 : empties[rng.uniform_below(static_cast<std::uint64_t>(n))];
                    x.u[pick] = 1;
                    break;
                }
            }
            return;
        }
        switch (slot - 4 * J) {
            case 0: x.f -= 1; break;                                  // mRNA bind
            case 1: x.f += 1; normalize_promoters(x, rng); break;     // mRNA release
            case 2: x.z += 1; break;                                  // 6S created
            case 3: x.z -= 1; break;                                  // free 6S degraded
            case 4: x.f -= 1; x.s += 1; x.z -= 1; break;              // sequestration
            case 5: x.f += 1; x.s -= 1; x.z += 1;                     // desequestration
                    normalize_promoters(x, rng); break;
        }
    }

    TransitionLabel slot_label(int slot) const {
        const int J = p_.J;
        if (slot < 4 * J) {
            switch (slot / J) {
                case 0: return TransitionLabel::RrnaInitFree;
                case 1: return TransitionLabel::RrnaInitEmptying;
                case 2: return TransitionLabel::RrnaCompleteToFree;
                default: return TransitionLabel::RrnaCompleteToPromoter;
            }
        }
        switch (slot - 4 * J) {
            case 0: return TransitionLabel::MrnaBind;
            case 1: return TransitionLabel::MrnaRelease;
            case 2: return TransitionLabel::SixSCreate;
            case 3: return TransitionLabel::SixSDegrade;
            case 4: return TransitionLabel::Sequester;
            default: return TransitionLabel::Desequester;
        }
    }

    bool stop_matches(const StopRule& stop, const State& x) const {
        switch (stop.kind) {
            case StopRule::Kind::FreeBelow: return x.f <= stop.level;
            case StopRule::Kind::FreeHitsZero: return x.f == 0;
            case StopRule::Kind::AllRrnaFull:
                for (int j = 0; j < p_.J; ++j)
                    if (x.r[j] != p_.C_r[j]) return false;
                return true;
            case StopRule::Kind::AllRrnaEmpty:
                for (int j = 0; j < p_.J; ++j)
                    if (x.r[j] != 0) return false;
                return true;
            default:
                throw model_error("full chain: unsupported stop predicate");
        }
    }

private:
    ModelParams p_;
};

class AuxChain {
public:
    using State = AuxState;
    static constexpr int kMaxSlots = 6;

    explicit AuxChain(const ModelParams& p) : p_(p) { p.validate(); }

    const ModelParams& params() const { return p_; }

    int n_slots() const { return 6; }

    void check_state(const State& x) const { validate_aux_state(x, p_); }

    double fill_rates(const State& x, double* rr) const {
        const std::int64_t busy = p_.N - x.f - x.s;
        const double f = static_cast<double>(x.f);
        const double z = static_cast<double>(x.z);
        rr[0] = p_.alpha_m * static_cast<double>(p_.C_m - busy) * f;
        rr[1] = p_.beta_m * static_cast<double>(busy);
        rr[2] = p_.beta_6;
        rr[3] = p_.delta_6 * z;
        rr[4] = p_.lambda * f * z;
        rr[5] = p_.eta * static_cast<double>(x.s);
        return rr[0] + rr[1] + rr[2] + rr[3] + rr[4] + rr[5];
    }

    void apply(int slot, State& x, Rng&) const {
        switch (slot) {
            case 0: x.f -= 1; break;
            case 1: x.f += 1; break;
            case 2: x.z += 1; break;
            case 3: x.z -= 1; break;
            case 4: x.f -= 1; x.s += 1; x.z -= 1; break;
            default: x.f += 1; x.s -= 1; x.z += 1; break;
        }
    }

    TransitionLabel slot_label(int slot) const {
        switch (slot) {
            case 0: return TransitionLabel::MrnaBind;
            case 1: return TransitionLabel::MrnaRelease;
            case 2: return TransitionLabel::SixSCreate;
            case 3: return TransitionLabel::SixSDegrade;
            case 4: return TransitionLabel::Sequester;
            default: return TransitionLabel::Desequester;
        }
    }

    bool stop_matches(const StopRule& stop, const State& x) const {
        switch (stop.kind) {
            case StopRule::Kind::FreeBelow: return x.f <= stop.level;
            case StopRule::Kind::FreeHitsZero: return x.f == 0;
            default:
                throw model_error("auxiliary chain: unsupported stop predicate");
        }
    }

private:
    ModelParams p_;
};

// Limit of the slow pair (S, Z): sequestration happens at lambda*rho_m per
// free 6S once the free-polymerase pool has averaged out.
struct LimitChainParams {
    double rho_m = 0; // phase-appropriate variant
    double lambda = 0;
    double eta = 0;
    double beta_6 = 0;
    double delta_6 = 0;

    void validate() const {
        if (!(rho_m > 0) || !(lambda > 0) || !(eta > 0) || !(beta_6 > 0) || !(delta_6 >= 0))
            throw model_error("LimitChainParams: rates must be positive (delta_6 >= 0)");
    }
};

struct LimitChainState {
    std::int64_t s = 0;
    std::int64_t z = 0;
    bool operator==(const LimitChainState&) const = default;
};

class LimitChain {
public:
    using State = LimitChainState;
    static constexpr int kMaxSlots = 4;

    explicit LimitChain(const LimitChainParams& p) : p_(p) { p.validate(); }

    int n_slots() const { return 4; }

    void check_state(const State& x) const {
        if (x.s < 0 || x.z < 0)
            throw invalid_state_error("limit chain: negative component");
    }

    double fill_rates(const State& x, double* rr) const {
        rr[0] = p_.lambda * p_.rho_m * static_cast<double>(x.z);
        rr[1] = p_.eta * static_cast<double>(x.s);
        rr[2] = p_.beta_6;
        rr[3] = p_.delta_6 * static_cast<double>(x.z);
        return rr[0] + rr[1] + rr[2] + rr[3];
    }

    void apply(int slot, State& x, Rng&) const {
        switch (slot) {
            case 0: x.s += 1; x.z -= 1; break;
            case 1: x.s -= 1; x.z += 1; break;
            case 2: x.z += 1; break;
            default: x.z -= 1; break;
        }
    }

    TransitionLabel slot_label(int slot) const {
        switch (slot) {
            case 0: return TransitionLabel::SwapToSequestered;
            case 1: return TransitionLabel::SwapToFree;
            case 2: return TransitionLabel::SixSCreate;
            default: return TransitionLabel::SixSDegrade;
        }
    }

    bool stop_matches(const StopRule&, const State&) const {
        throw model_error("limit chain: unsupported stop predicate");
    }

private:
    LimitChainParams p_;
};

// Constant-birth, linear-death comparison process (M/M/infinity);
// its stationary law is Poisson(kappa_i / kappa_o).
struct BirthDeathParams {
    double kappa_i = 0;
    double kappa_o = 0;
    std::int64_t y0 = 0;

    void validate() const {
        if (!(kappa_i > 0) || !(kappa_o > 0) || y0 < 0)
            throw model_error("BirthDeathParams: rates must be strictly positive, y0 >= 0");
    }
};

class BirthDeathChain {
public:
    using State = std::int64_t;
    static constexpr int kMaxSlots = 2;

    explicit BirthDeathChain(const BirthDeathParams& p) : p_(p) { p.validate(); }

    int n_slots() const { return 2; }
    void check_state(const State& y) const {
        if (y < 0) throw invalid_state_error("birth-death: negative population");
    }
    double fill_rates(const State& y, double* rr) const {
        rr[0] = p_.kappa_i;
        rr[1] = p_.kappa_o * static_cast<double>(y);
        return rr[0] + rr[1];
    }
    void apply(int slot, State& y, Rng&) const { y += (slot == 0) ? 1 : -1; }
    TransitionLabel slot_label(int slot) const {
        return slot == 0 ? TransitionLabel::Birth : TransitionLabel::Death;
    }
    bool stop_matches(const StopRule& stop, const State& y) const {
        switch (stop.kind) {
            case StopRule::Kind::HitsZero: return y == 0;
            case StopRule::Kind::ReachesLevel: return y >= stop.level;
            default: throw model_error("birth-death: unsupported stop predicate");
        }
    }

private:
    BirthDeathParams p_;
};

struct MM1Params {
    double arrival = 0;
    double service = 0;
    std::int64_t q0 = 0;

    bool stable() const { return arrival < service; }
    void validate() const {
        if (!(arrival > 0) || !(service > 0) || q0 < 0)
            throw model_error("MM1Params: rates must be strictly positive, q0 >= 0");
    }
};

class Mm1Chain {
public:
    using State = std::int64_t;
    static constexpr int kMaxSlots = 2;

    explicit Mm1Chain(const MM1Params& p) : p_(p) { p.validate(); }

    int n_slots() const { return 2; }
    void check_state(const State& q) const {
        if (q < 0) throw invalid_state_error("mm1: negative queue");
    }
    double fill_rates(const State& q, double* rr) const {
        rr[0] = p_.arrival;
        rr[1] = q > 0 ? p_.service : 0.0;
        return rr[0] + rr[1];
    }
    void apply(int slot, State& q, Rng&) const { q += (slot == 0) ? 1 : -1; }
    TransitionLabel slot_label(int slot) const {
        return slot == 0 ? TransitionLabel::Arrival : TransitionLabel::Service;
    }
    bool stop_matches(const StopRule& stop, const State& q) const {
        switch (stop.kind) {
            case StopRule::Kind::HitsZero: return q == 0;
            case StopRule::Kind::ReachesLevel: return q >= stop.level;
            default: throw model_error("mm1: unsupported stop predicate");
        }
    }

private:
    MM1Params p_;
};

// Single exact step of the full chain through the public transition list:
// returns the dwell, the chosen transition, and the normalized next state.
struct FullStep {
    double dwell;
    Transition transition;
    FullState next;
};
FullStep step_full(const FullState& x, const ModelParams& p, Rng& rng);

struct AuxStep {
    double dwell;
    Transition transition;
    AuxState next;
};
AuxStep step_aux(const AuxState& x, const ModelParams& p, Rng& rng);

} // namespace sixsim
