#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sixsim/engine.hpp"
#include "sixsim/occupation.hpp"

namespace sixsim {

// Small sample statistics used by the reference-process checks.
double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);
// Empirical q-quantile (nearest-rank on the sorted copy).
double quantile(std::vector<double> xs, double q);
std::int64_t quantile(std::vector<std::int64_t> xs, double q);

// I.i.d. samples of the hitting time of 0 from y0 (replica k seeded with
// seed ^ k).
std::vector<double> hitting_time_zero(const BirthDeathParams& p, int replicas,
                                      std::uint64_t seed);

// I.i.d. samples of the first time the population exceeds p_level, from 0.
std::vector<double> first_passage_up(const BirthDeathParams& p, std::int64_t p_level,
                                     int replicas, std::uint64_t seed);

// Dwell-law of a birth-death run over [burn_in, burn_in + window] from y0.
Occupation1D bd_occupation(const BirthDeathParams& p, double burn_in, double window,
                           std::uint64_t seed);

// Dwell-law of an M/M/1 queue-length run over [burn_in, burn_in + window].
Occupation1D mm1_occupation(const MM1Params& p, double burn_in, double window,
                            std::uint64_t seed);

// CSV export of i.i.d. hitting/passage samples: one (replica, value) row each.
void write_samples_csv(std::ostream& os, const std::vector<double>& samples);

// Quantile-dominance audit: at every grid point, the fraction of model
// samples above the bound ensemble's q_bound-quantile must stay below
// (1 - q_model) plus a 3-sigma Monte-Carlo band.
struct DominanceReport {
    std::vector<double> grid;
    std::vector<std::int64_t> bound_quantile; // per grid point
    std::vector<double> exceed_fraction;      // model mass above it
    double allowance = 0;                     // (1 - q_model) + MC band
    int violations = 0;
    bool pass = false;
};

DominanceReport dominance_check(const std::vector<std::vector<std::int64_t>>& model_samples,
                                const std::vector<std::vector<std::int64_t>>& bound_samples,
                                const std::vector<double>& grid, double q_model = 0.99,
                                double q_bound = 0.995);

} // namespace sixsim
