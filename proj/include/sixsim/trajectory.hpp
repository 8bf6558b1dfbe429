#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "sixsim/engine.hpp"
#include "sixsim/model.hpp"

namespace sixsim {

enum class ModelKind { Full, Auxiliary, LimitChain, BirthDeath, Mm1 };

const char* to_string(ModelKind kind);

// Net state change of one event, including any promoter refills bundled with
// it. Promoter changes are bitmasks (J <= 16).
struct TrajEvent {
    double time;
    TransitionLabel label;
    std::int8_t j = -1; // rRNA type whose r changed, -1 if none
    std::int8_t dr = 0;
    std::int8_t df = 0;
    std::int8_t ds = 0;
    std::int8_t dz = 0;
    std::uint16_t u_set = 0;
    std::uint16_t u_clear = 0;
};

// A sample path stored as the initial state plus per-event deltas, with full
// snapshots every 2^16 events so that any prefix can be replayed cheaply.
// Scalar processes embed their value in the f component; the limit chain
// uses (s, z).
struct Trajectory {
    ModelKind model = ModelKind::Full;
    std::uint64_t seed = 0;
    FullState initial;
    std::vector<TrajEvent> events;
    std::vector<std::pair<std::uint64_t, FullState>> snapshots;
    double t_end = 0;
    StopReason stop_reason = StopReason::Horizon;
    FullState final_state;

    static constexpr std::uint64_t kSnapshotStride = 1u << 16;
};

class truncation_error : public model_error {
public:
    truncation_error(const std::string& msg, Trajectory partial)
        : model_error(msg), partial_trajectory(std::move(partial)) {}
    Trajectory partial_trajectory;
};

// Exact simulation up to the stop rule. Exceeding the event budget raises
// truncation_error carrying the partial path.
Trajectory simulate_full(const FullState& initial, const ModelParams& p, const StopRule& stop,
                         std::uint64_t seed, std::uint64_t budget = kDefaultEventBudget);
Trajectory simulate_aux(const AuxState& initial, const ModelParams& p, const StopRule& stop,
                        std::uint64_t seed, std::uint64_t budget = kDefaultEventBudget);
Trajectory simulate_limit_chain(const LimitChainParams& p, const LimitChainState& initial,
                                const StopRule& stop, std::uint64_t seed,
                                std::uint64_t budget = kDefaultEventBudget);
Trajectory simulate_bd(const BirthDeathParams& p, const StopRule& stop, std::uint64_t seed,
                       std::uint64_t budget = kDefaultEventBudget);
Trajectory simulate_mm1(const MM1Params& p, const StopRule& stop, std::uint64_t seed,
                        std::uint64_t budget = kDefaultEventBudget);

// State right-continuous at each grid time (an event at exactly t counts).
// `times` must be nondecreasing and within [0, t_end].
std::vector<FullState> sample_on_grid(const Trajectory& traj, const std::vector<double>& times);

// Walks the piecewise-constant path: fn(t0, t1, state) for every maximal
// interval on which the state is constant, ending at t_end.
void for_each_segment(const Trajectory& traj,
                      const std::function<void(double, double, const FullState&)>& fn);

// Grid export: time, f, s, z, u_1..u_J, r_1..r_J, m (columns shrink to what
// the model kind carries).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const ModelParams* p,
                          const std::vector<double>& grid);

// Event-log export: one JSON record per line (time, label, state delta).
void write_event_log_ndjson(std::ostream& os, const Trajectory& traj);

} // namespace sixsim
