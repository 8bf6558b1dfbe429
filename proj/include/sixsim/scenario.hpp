#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sixsim/engine.hpp"
#include "sixsim/model.hpp"
#include "sixsim/toml_lite.hpp"
#include "sixsim/trajectory.hpp"

namespace sixsim {

// Parameter template of a scenario. Capacities may be given as fractions of
// N (required for N-sweeps) or as absolute counts.
struct ParamsSpec {
    std::int64_t N = 0;
    int J = 1;
    std::vector<double> alpha_r{1.0};
    std::vector<double> beta_r{2.0};
    std::vector<double> c_r_frac;        // one of c_r_frac / C_r_abs
    std::vector<std::int64_t> C_r_abs;
    bool c_r_is_fraction = true;
    double c_m_frac = 0;
    std::int64_t C_m_abs = 0;
    bool c_m_is_fraction = true;
    double alpha_m = 1, beta_m = 1;
    double beta_6 = 1, delta_6 = 1;
    double lambda = 1, eta = 1;

    ModelParams resolve(std::int64_t N_value) const;
};

// Initial-state recipe; component values may be fractions of N or counts.
struct InitialSpec {
    std::string recipe = "explicit"; // all-free | saturated-rrna | explicit
    std::optional<double> f_fraction, s_fraction, z_fraction;
    std::optional<std::int64_t> f_count, s_count, z_count, g_count;
};

struct StopSpec {
    std::string kind = "time-horizon";
    double time = 0;              // scenario time units (scaled when accelerated)
    double level_fraction = 0;    // for free-below
};

struct GridSpec {
    bool present = false;
    double start = 0, stop = 0;
    int points = 0;
    std::vector<std::string> components; // f, s, z, m, g, r_total, deficit_max
};

struct OccupationSpec {
    bool present = false;
    double window_start = 0, window_end = 0;
    std::vector<std::string> observables; // f, s, z, g, sz, gz
};

struct Scenario {
    std::string name = "unnamed";
    ModelKind model = ModelKind::Full;
    bool accelerated = false; // horizons/grids/windows are in units of N*t
    int replicas = 1;
    std::uint64_t base_seed = 1;
    int threads = 0; // 0: library default
    std::uint64_t event_budget = kDefaultEventBudget;

    ParamsSpec params;                 // full / auxiliary
    LimitChainParams chain{1, 1, 1, 1, 1};
    BirthDeathParams bd{1, 1, 0};
    MM1Params mm1{0.5, 1, 0};
    InitialSpec initial;
    StopSpec stop;
    GridSpec grid;
    OccupationSpec occupation;
    bool write_trajectories = false;
    bool write_events = false;

    static Scenario load(const std::string& path); // .toml or .json
    static Scenario from_table(const toml::Table& t);

    // Every default made explicit; serialize(normalized()) re-parses to the
    // same scenario.
    toml::Table normalized() const;

    void validate() const;

    // Raw-time factor for horizons/grids/windows (N when accelerated).
    double time_scale(std::int64_t N_value) const;

    StopRule resolve_stop(std::int64_t N_value) const;
    FullState initial_full(const ModelParams& p) const;
    AuxState initial_aux(const ModelParams& p) const;
    LimitChainState initial_chain() const;

    std::vector<double> grid_times() const; // scenario units
};

// Uniform grid helper: `points` values from start to stop inclusive.
std::vector<double> linspace(double start, double stop, int points);

} // namespace sixsim
