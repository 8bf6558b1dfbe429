#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sixsim/fluid.hpp"
#include "sixsim/occupation.hpp"
#include "sixsim/scenario.hpp"

namespace sixsim {

// ---------------------------------------------------------------------------
// Replica ensembles. Replica k runs with seed = base_seed ^ k on its own
// stream; results land in a vector indexed by replica, so the reduction order
// is fixed no matter how the work was scheduled. The serial runner is the
// reference the parallel one is tested (and benchmarked) against.
// ---------------------------------------------------------------------------

template <class Fn>
auto run_replicas_serial(int replicas, std::uint64_t base_seed, Fn&& fn)
    -> std::vector<decltype(fn(0, std::uint64_t{}))> {
    using T = decltype(fn(0, std::uint64_t{}));
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(replicas));
    for (int k = 0; k < replicas; ++k)
        out.push_back(fn(k, base_seed ^ static_cast<std::uint64_t>(k)));
    return out;
}

template <class Fn>
auto run_replicas_parallel(int replicas, std::uint64_t base_seed, int threads, Fn&& fn)
    -> std::vector<decltype(fn(0, std::uint64_t{}))> {
    using T = decltype(fn(0, std::uint64_t{}));
    std::vector<std::optional<T>> slots(static_cast<std::size_t>(replicas));
    std::exception_ptr first_error; // exceptions must not unwind across the omp region
#ifdef _OPENMP
    if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int k = 0; k < replicas; ++k) {
        try {
            slots[static_cast<std::size_t>(k)].emplace(
                fn(k, base_seed ^ static_cast<std::uint64_t>(k)));
        } catch (...) {
#pragma omp critical(sixsim_replica_error)
            if (!first_error) first_error = std::current_exception();
        }
    }
#else
    (void)threads;
    for (int k = 0; k < replicas; ++k) {
        try {
            slots[static_cast<std::size_t>(k)].emplace(
                fn(k, base_seed ^ static_cast<std::uint64_t>(k)));
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
#endif
    if (first_error) std::rethrow_exception(first_error);
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(replicas));
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

template <class Fn>
auto run_replicas(int replicas, std::uint64_t base_seed, int threads, Fn&& fn)
    -> std::vector<decltype(fn(0, std::uint64_t{}))> {
    if (threads == 1) return run_replicas_serial(replicas, base_seed, std::forward<Fn>(fn));
    return run_replicas_parallel(replicas, base_seed, threads, std::forward<Fn>(fn));
}

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

struct ReplicaSummary {
    int replica = 0;
    std::uint64_t seed = 0;
    double stop_time = 0; // scenario units
    StopReason reason = StopReason::Horizon;
    std::uint64_t events = 0;
};

struct ScenarioRunResult {
    std::int64_t N = 0;
    std::vector<double> grid; // scenario units
    std::vector<ReplicaSummary> replicas;
    // grid_samples[component][replica][grid index]
    std::map<std::string, std::vector<std::vector<std::int64_t>>> grid_samples;
    // pooled over replicas
    std::map<std::string, Occupation1D> occupations;
    std::map<std::string, Occupation2D> occupations2d;
    // fluid overlay when the scenario admits one (auxiliary, accelerated,
    // c_m < 1, delta_6 > 0)
    bool has_fluid = false;
    OdeSolution fluid;
    std::vector<double> sup_f_error; // per replica, when fluid is present
};

// Runs every replica of the scenario (optionally at an overriding N), applies
// the built-in estimators, and writes artifacts when out_dir is nonempty:
// scenario_normalized.toml, summary.csv, trajectories/, events/.
ScenarioRunResult run_scenario(const Scenario& sc, const std::string& out_dir = "",
                               std::int64_t N_override = 0);

struct TrendVerdict {
    std::string metric;
    std::vector<double> values; // per N
    std::string direction;      // decreasing | increasing | flat | insufficient
    double ratio_max_min = 0;
};

struct SweepResult {
    std::vector<std::int64_t> N_values;
    std::vector<ScenarioRunResult> runs;
    std::vector<TrendVerdict> trends;
};

SweepResult sweep_N(const Scenario& sc, const std::vector<std::int64_t>& N_values,
                    const std::string& out_dir = "");

// CSV / JSON / SVG rendering of a finished run or sweep.
void emit_report(const Scenario& sc, const SweepResult& result, const std::string& out_dir,
                 bool csv = true, bool json = true, bool svg = true);

void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

} // namespace sixsim
