#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "sixsim/model.hpp"

namespace sixsim {

struct Trajectory;
struct OdeSolution;

// Dwell-time-weighted empirical distribution of an integer observable over a
// time window. Piecewise-constant integration is exact: the weights always
// partition the covered window length.
template <class Key>
class OccupationMeasure {
public:
    OccupationMeasure(double window_start, double window_end)
        : start_(window_start), end_(window_end) {
        if (!(window_end > window_start))
            throw model_error("occupation: empty window");
    }

    void add(double t0, double t1, const Key& value) {
        const double lo = t0 > start_ ? t0 : start_;
        const double hi = t1 < end_ ? t1 : end_;
        if (hi <= lo) return;
        weights_[value] += hi - lo;
    }

    // Direct dwell credit, for accumulators that window on their own.
    void add_weight(const Key& value, double dwell) { weights_[value] += dwell; }

    static OccupationMeasure from_weights(const std::map<Key, double>& weights, double total) {
        OccupationMeasure m(0.0, total);
        for (const auto& [k, w] : weights) m.weights_[k] += w;
        return m;
    }

    // Pools another measure of the same observable (e.g. an independent
    // replica); window lengths add.
    void merge(const OccupationMeasure& other) {
        for (const auto& [k, w] : other.weights_) weights_[k] += w;
        length_ += other.window_length();
    }

    const std::map<Key, double>& weights() const { return weights_; }
    double window_start() const { return start_; }
    double window_end() const { return end_; }
    double window_length() const { return end_ - start_ + length_; }

    double accumulated() const {
        double t = 0;
        for (const auto& [k, w] : weights_) t += w;
        return t;
    }

    double fraction(const Key& value) const {
        auto it = weights_.find(value);
        return it == weights_.end() ? 0.0 : it->second / window_length();
    }

private:
    double start_, end_;
    double length_ = 0; // extra length gained through merges
    std::map<Key, double> weights_;
};

using Occupation1D = OccupationMeasure<std::int64_t>;
using Occupation2D = OccupationMeasure<std::pair<std::int64_t, std::int64_t>>;

struct FitReport {
    double statistic = 0;  // total-variation distance
    double threshold = 0;
    bool pass = false;
    double sample_size = 0; // effective dwell time behind the statistic
};

// Poisson pmf by stable upward recursion, truncated once the cumulative mass
// reaches 1 - 1e-12.
std::vector<double> poisson_pmf(double mu);

// Geometric pmf p(k) = (1 - r) r^k, same truncation rule.
std::vector<double> geometric_pmf(double ratio);

// Total variation between a dwell-weighted empirical law and a reference pmf
// (tail-completed: mass beyond the truncated pmf counts in full).
double tv_distance(const Occupation1D& empirical, const std::vector<double>& pmf);

// Same against a product reference pmf on pairs.
double tv_distance(const Occupation2D& empirical, const std::vector<double>& pmf_x,
                   const std::vector<double>& pmf_y);

// Total variation between two empirical laws.
double tv_distance(const Occupation1D& a, const Occupation1D& b);
double tv_distance(const Occupation2D& a, const Occupation2D& b);

// Dwell-time occupation extracted from a stored trajectory.
Occupation1D occupation_from_trajectory(const Trajectory& traj,
                                        const std::function<std::int64_t(const FullState&)>& observable,
                                        double window_start, double window_end);
Occupation2D occupation2d_from_trajectory(
    const Trajectory& traj,
    const std::function<std::pair<std::int64_t, std::int64_t>(const FullState&)>& observable,
    double window_start, double window_end);

// Per-time-cell comparison of a joint (G, Z) occupation against the product
// of two Poisson laws whose parameters follow the fluid solution at the cell
// midpoint: mu_G = rho_m c_m / fbar, mu_Z = rho_1 (1 - c_m - fbar) / fbar.
// Cells with dwell below min_dwell are skipped (reported unfit, not failed).
std::vector<FitReport> product_poisson_conditional_test(const std::vector<Occupation2D>& cells,
                                                        const OdeSolution& fluid,
                                                        double rho_m, double rho_1, double c_m,
                                                        double threshold,
                                                        double min_dwell = 1e-9);

struct DiracReport {
    std::vector<double> sup_error; // per replica: sup over grid |F/N - fbar|
    double mean_sup = 0;
    double max_sup = 0;
    bool pass = false;
};

// Fluid-limit time-marginal check: per replica, sup over the grid of
// |F(scaled t)/N - fbar(t)|.
DiracReport dirac_time_marginal_check(const std::vector<std::vector<std::int64_t>>& f_samples,
                                      std::int64_t N, const std::vector<double>& grid,
                                      const OdeSolution& fluid, double tolerance);

// Joint dwell-law comparison between a model (S, Z) occupation and an
// independent limit-chain run of equal window.
FitReport limit_chain_equivalence_test(const Occupation2D& model_sz,
                                       const Occupation2D& chain_sz, double threshold);

} // namespace sixsim
