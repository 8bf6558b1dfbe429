#include "sixsim/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace sixsim {

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Full: return "full";
        case ModelKind::Auxiliary: return "auxiliary";
        case ModelKind::LimitChain: return "limit-chain";
        case ModelKind::BirthDeath: return "birth-death";
        case ModelKind::Mm1: return "mm1";
    }
    return "unknown";
}

namespace {

FullState embed(const AuxState& x) {
    FullState out;
    out.f = x.f;
    out.s = x.s;
    out.z = x.z;
    return out;
}

FullState embed(const LimitChainState& x) {
    FullState out;
    out.s = x.s;
    out.z = x.z;
    return out;
}

FullState embed(std::int64_t y) {
    FullState out;
    out.f = y;
    return out;
}

FullState embed(const FullState& x) { return x; }

// Builds the event log by diffing successive states; allocation-free per
// event apart from the growing vectors.
template <class State>
class Recorder {
public:
    Recorder(ModelKind kind, std::uint64_t seed, const State& initial, Trajectory& out)
        : out_(out), prev_(initial) {
        out_.model = kind;
        out_.seed = seed;
        out_.initial = embed(initial);
    }

    void segment(double, double, const State&) {}

    void event(double t, TransitionLabel label, const State& after) {
        out_.events.push_back(diff(t, label, prev_, after));
        prev_ = after;
        if (out_.events.size() % Trajectory::kSnapshotStride == 0)
            out_.snapshots.emplace_back(out_.events.size(), embed(after));
    }

    void end(double t, const State& final_state) {
        out_.t_end = t;
        out_.final_state = embed(final_state);
    }

private:
    static TrajEvent diff(double t, TransitionLabel label, const FullState& a,
                          const FullState& b) {
        TrajEvent e{};
        e.time = t;
        e.label = label;
        e.df = static_cast<std::int8_t>(b.f - a.f);
        e.ds = static_cast<std::int8_t>(b.s - a.s);
        e.dz = static_cast<std::int8_t>(b.z - a.z);
        for (std::size_t j = 0; j < a.u.size(); ++j) {
            if (b.u[j] > a.u[j]) e.u_set |= static_cast<std::uint16_t>(1u << j);
            if (b.u[j] < a.u[j]) e.u_clear |= static_cast<std::uint16_t>(1u << j);
            if (b.r[j] != a.r[j]) {
                e.j = static_cast<std::int8_t>(j);
                e.dr = static_cast<std::int8_t>(b.r[j] - a.r[j]);
            }
        }
        return e;
    }

    static TrajEvent diff(double t, TransitionLabel label, const AuxState& a, const AuxState& b) {
        TrajEvent e{};
        e.time = t;
        e.label = label;
        e.df = static_cast<std::int8_t>(b.f - a.f);
        e.ds = static_cast<std::int8_t>(b.s - a.s);
        e.dz = static_cast<std::int8_t>(b.z - a.z);
        return e;
    }

    static TrajEvent diff(double t, TransitionLabel label, const LimitChainState& a,
                          const LimitChainState& b) {
        TrajEvent e{};
        e.time = t;
        e.label = label;
        e.ds = static_cast<std::int8_t>(b.s - a.s);
        e.dz = static_cast<std::int8_t>(b.z - a.z);
        return e;
    }

    static TrajEvent diff(double t, TransitionLabel label, std::int64_t a, std::int64_t b) {
        TrajEvent e{};
        e.time = t;
        e.label = label;
        e.df = static_cast<std::int8_t>(b - a);
        return e;
    }

    Trajectory& out_;
    State prev_;
};

template <class Model>
Trajectory record_run(ModelKind kind, const Model& model, typename Model::State state,
                      const StopRule& stop, std::uint64_t seed, std::uint64_t budget) {
    Trajectory traj;
    Rng rng(seed);
    Recorder<typename Model::State> rec(kind, seed, state, traj);
    const RunResult res = run_chain(model, state, stop, rng, rec, budget);
    traj.stop_reason = res.reason;
    if (res.reason == StopReason::Budget) {
        traj.t_end = res.t_end;
        traj.final_state = embed(state);
        throw truncation_error("simulate: event budget exceeded", std::move(traj));
    }
    return traj;
}

void apply_event(FullState& x, const TrajEvent& e) {
    x.f += e.df;
    x.s += e.ds;
    x.z += e.dz;
    if (e.dr != 0) x.r[static_cast<std::size_t>(e.j)] += e.dr;
    if (e.u_set != 0 || e.u_clear != 0) {
        for (std::size_t j = 0; j < x.u.size(); ++j) {
            if (e.u_set & (1u << j)) x.u[j] = 1;
            if (e.u_clear & (1u << j)) x.u[j] = 0;
        }
    }
}

} // namespace

Trajectory simulate_full(const FullState& initial, const ModelParams& p, const StopRule& stop,
                         std::uint64_t seed, std::uint64_t budget) {
    return record_run(ModelKind::Full, FullChain(p), initial, stop, seed, budget);
}

Trajectory simulate_aux(const AuxState& initial, const ModelParams& p, const StopRule& stop,
                        std::uint64_t seed, std::uint64_t budget) {
    return record_run(ModelKind::Auxiliary, AuxChain(p), initial, stop, seed, budget);
}

Trajectory simulate_limit_chain(const LimitChainParams& p, const LimitChainState& initial,
                                const StopRule& stop, std::uint64_t seed, std::uint64_t budget) {
    return record_run(ModelKind::LimitChain, LimitChain(p), initial, stop, seed, budget);
}

Trajectory simulate_bd(const BirthDeathParams& p, const StopRule& stop, std::uint64_t seed,
                       std::uint64_t budget) {
    return record_run(ModelKind::BirthDeath, BirthDeathChain(p), p.y0, stop, seed, budget);
}

Trajectory simulate_mm1(const MM1Params& p, const StopRule& stop, std::uint64_t seed,
                        std::uint64_t budget) {
    return record_run(ModelKind::Mm1, Mm1Chain(p), p.q0, stop, seed, budget);
}

void for_each_segment(const Trajectory& traj,
                      const std::function<void(double, double, const FullState&)>& fn) {
    FullState state = traj.initial;
    double t = 0;
    for (const TrajEvent& e : traj.events) {
        fn(t, e.time, state);
        apply_event(state, e);
        t = e.time;
    }
    if (traj.t_end > t) fn(t, traj.t_end, state);
}

std::vector<FullState> sample_on_grid(const Trajectory& traj, const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0 || times[i] > traj.t_end)
            throw model_error("sample_on_grid: time outside [0, t_end]");
        if (i > 0 && times[i] < times[i - 1])
            throw model_error("sample_on_grid: times must be nondecreasing");
    }
    std::vector<FullState> out;
    out.reserve(times.size());
    FullState state = traj.initial;
    std::size_t next_event = 0;
    for (double t : times) {
        while (next_event < traj.events.size() && traj.events[next_event].time <= t) {
            apply_event(state, traj.events[next_event]);
            ++next_event;
        }
        out.push_back(state);
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const ModelParams* p,
                          const std::vector<double>& grid) {
    const int J = static_cast<int>(traj.initial.u.size());
    os << "time";
    switch (traj.model) {
        case ModelKind::Full: {
            os << ",f,s,z";
            for (int j = 1; j <= J; ++j) os << ",u_" << j;
            for (int j = 1; j <= J; ++j) os << ",r_" << j;
            os << ",m";
            break;
        }
        case ModelKind::Auxiliary: os << ",f,s,z,m"; break;
        case ModelKind::LimitChain: os << ",s,z"; break;
        case ModelKind::BirthDeath: os << ",y"; break;
        case ModelKind::Mm1: os << ",q"; break;
    }
    os << "\n";

    const auto states = sample_on_grid(traj, grid);
    char buf[32];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", grid[i]);
        os << buf;
        const FullState& x = states[i];
        switch (traj.model) {
            case ModelKind::Full: {
                os << ',' << x.f << ',' << x.s << ',' << x.z;
                for (int j = 0; j < J; ++j) os << ',' << static_cast<int>(x.u[j]);
                for (int j = 0; j < J; ++j) os << ',' << x.r[j];
                os << ',' << (p ? psi(x, *p) : 0);
                break;
            }
            case ModelKind::Auxiliary:
                os << ',' << x.f << ',' << x.s << ',' << x.z << ','
                   << (p ? (p->N - x.f - x.s) : 0);
                break;
            case ModelKind::LimitChain: os << ',' << x.s << ',' << x.z; break;
            case ModelKind::BirthDeath:
            case ModelKind::Mm1: os << ',' << x.f; break;
        }
        os << '\n';
    }
}

void write_event_log_ndjson(std::ostream& os, const Trajectory& traj) {
    char buf[32];
    for (const TrajEvent& e : traj.events) {
        std::snprintf(buf, sizeof buf, "%.17g", e.time);
        os << "{\"time\":" << buf << ",\"label\":\"" << to_string(e.label) << "\",\"delta\":{";
        bool first = true;
        auto field = [&](const char* name, long long v) {
            if (v == 0) return;
            if (!first) os << ',';
            first = false;
            os << '"' << name << "\":" << v;
        };
        field("f", e.df);
        field("s", e.ds);
        field("z", e.dz);
        if (e.dr != 0) {
            if (!first) os << ',';
            first = false;
            os << "\"r_" << (e.j + 1) << "\":" << static_cast<int>(e.dr);
        }
        for (int j = 0; j < 16; ++j) {
            if (e.u_set & (1u << j)) {
                if (!first) os << ',';
                first = false;
                os << "\"u_" << (j + 1) << "\":1";
            }
            if (e.u_clear & (1u << j)) {
                if (!first) os << ',';
                first = false;
                os << "\"u_" << (j + 1) << "\":-1";
            }
        }
        os << "}}\n";
    }
}

FullStep step_full(const FullState& x, const ModelParams& p, Rng& rng) {
    const auto transitions = enumerate_transitions_full(x, p);
    double total = 0;
    for (const auto& t : transitions) total += t.rate;
    if (!(total > 0)) throw absorbing_state_error("step_full: total rate is zero");
    FullStep out;
    out.dwell = rng.exponential(total);
    double u = rng.uniform01() * total;
    std::size_t pick = transitions.size() - 1;
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        u -= transitions[i].rate;
        if (u <= 0) {
            pick = i;
            break;
        }
    }
    out.transition = transitions[pick];
    out.next = x;
    apply_transition(out.next, out.transition);
    normalize_promoters(out.next, rng);
    return out;
}

AuxStep step_aux(const AuxState& x, const ModelParams& p, Rng& rng) {
    const auto transitions = enumerate_transitions_aux(x, p);
    double total = 0;
    for (const auto& t : transitions) total += t.rate;
    if (!(total > 0)) throw absorbing_state_error("step_aux: total rate is zero");
    AuxStep out;
    out.dwell = rng.exponential(total);
    double u = rng.uniform01() * total;
    std::size_t pick = transitions.size() - 1;
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        u -= transitions[i].rate;
        if (u <= 0) {
            pick = i;
            break;
        }
    }
    out.transition = transitions[pick];
    out.next = x;
    apply_transition(out.next, out.transition);
    return out;
}

} // namespace sixsim
