// Throughput comparison of the serial reference replica runner against the
// OpenMP ensemble runner on a fixed reduced-model workload, plus a raw
// events-per-second figure for the two event-loop kernels.

#include <chrono>
#include <cstdio>

#include "sixsim/harness.hpp"
#include "sixsim/observers.hpp"

using namespace sixsim;

namespace {

ModelParams workload_params() {
    ModelParams p;
    p.N = 1000;
    p.J = 2;
    p.alpha_r = {2.0, 2.0};
    p.beta_r = {1.0, 1.0};
    p.C_r = {300, 300};
    p.alpha_m = 1.0;
    p.beta_m = 1.0;
    p.C_m = 2000;
    p.beta_6 = 1.0;
    p.delta_6 = 1.0;
    p.lambda = 1.0;
    p.eta = 1.0;
    return p;
}

std::uint64_t one_aux_replica(const ModelParams& p, std::uint64_t seed, double horizon) {
    AuxChain chain(p);
    AuxState state{0, 0, 0};
    Rng rng(seed);
    NullObserver obs;
    return run_chain(chain, state, StopRule::time_horizon(horizon), rng, obs).n_events;
}

std::uint64_t one_full_replica(const ModelParams& p, std::uint64_t seed, double horizon) {
    FullChain chain(p);
    FullState state;
    state.u.assign(static_cast<std::size_t>(p.J), 1);
    state.r.assign(static_cast<std::size_t>(p.J), 0);
    state.f = p.N - p.J;
    Rng rng(seed);
    NullObserver obs;
    return run_chain(chain, state, StopRule::time_horizon(horizon), rng, obs).n_events;
}

template <class Fn>
double timed(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main() {
    const ModelParams p = workload_params();
    const int replicas = 16;
    const double horizon = 40.0;
    const std::uint64_t seed = 9000;

    std::uint64_t serial_events = 0, parallel_events = 0;
    const double t_serial = timed([&] {
        const auto counts = run_replicas_serial(replicas, seed, [&](int, std::uint64_t s) {
            return one_aux_replica(p, s, horizon);
        });
        for (auto c : counts) serial_events += c;
    });
    const double t_parallel = timed([&] {
        const auto counts =
            run_replicas_parallel(replicas, seed, 0, [&](int, std::uint64_t s) {
                return one_aux_replica(p, s, horizon);
            });
        for (auto c : counts) parallel_events += c;
    });

    if (serial_events != parallel_events) {
        std::printf("MISMATCH: serial and parallel ensembles diverged\n");
        return 1;
    }

    std::printf("replica ensemble: %d replicas of the reduced model, horizon %.0f\n",
                replicas, horizon);
    std::printf("  serial reference : %8.3f s   %10.2f Mevents/s\n", t_serial,
                static_cast<double>(serial_events) / t_serial / 1e6);
    std::printf("  openmp ensemble  : %8.3f s   %10.2f Mevents/s   speedup %.2fx\n",
                t_parallel, static_cast<double>(parallel_events) / t_parallel / 1e6,
                t_serial / t_parallel);

    std::uint64_t full_events = 0;
    const double t_full = timed([&] { full_events = one_full_replica(p, seed, 60.0); });
    std::printf("single full-model path: %llu events in %.3f s (%.0f ns/event)\n",
                static_cast<unsigned long long>(full_events), t_full,
                t_full / static_cast<double>(full_events) * 1e9);

    std::uint64_t aux_events = 0;
    const double t_aux = timed([&] { aux_events = one_aux_replica(p, seed, 60.0); });
    std::printf("single reduced-model path: %llu events in %.3f s (%.0f ns/event)\n",
                static_cast<unsigned long long>(aux_events), t_aux,
                t_aux / static_cast<double>(aux_events) * 1e9);
    return 0;
}
