#include "sixsim/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "sixsim/observers.hpp"

namespace sixsim {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw model_error("mean: empty sample");
    double t = 0;
    for (double x : xs) t += x;
    return t / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) throw model_error("sample_stddev: need at least two samples");
    const double m = mean(xs);
    double t = 0;
    for (double x : xs) t += (x - m) * (x - m);
    return std::sqrt(t / static_cast<double>(xs.size() - 1));
}

namespace {
template <class T>
T quantile_impl(std::vector<T> xs, double q) {
    if (xs.empty()) throw model_error("quantile: empty sample");
    if (!(q >= 0) || !(q <= 1)) throw model_error("quantile: q must lie in [0, 1]");
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (rank > 0) --rank;
    return xs[std::min(rank, n - 1)];
}
} // namespace

double quantile(std::vector<double> xs, double q) { return quantile_impl(std::move(xs), q); }
std::int64_t quantile(std::vector<std::int64_t> xs, double q) {
    return quantile_impl(std::move(xs), q);
}

std::vector<double> hitting_time_zero(const BirthDeathParams& p, int replicas,
                                      std::uint64_t seed) {
    if (p.y0 == 0) return std::vector<double>(static_cast<std::size_t>(replicas), 0.0);
    const BirthDeathChain chain(p);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(replicas));
    for (int k = 0; k < replicas; ++k) {
        Rng rng(seed ^ static_cast<std::uint64_t>(k));
        std::int64_t y = p.y0;
        NullObserver obs;
        const auto res = run_chain(chain, y, StopRule::hits_zero(), rng, obs);
        if (res.reason != StopReason::Predicate)
            throw model_error("hitting_time_zero: event budget exhausted before absorption");
        out.push_back(res.t_end);
    }
    return out;
}

std::vector<double> first_passage_up(const BirthDeathParams& p, std::int64_t p_level,
                                     int replicas, std::uint64_t seed) {
    if (p_level < 1) throw model_error("first_passage_up: level must be >= 1");
    const BirthDeathChain chain(p);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(replicas));
    for (int k = 0; k < replicas; ++k) {
        Rng rng(seed ^ static_cast<std::uint64_t>(k));
        std::int64_t y = 0;
        NullObserver obs;
        const auto res = run_chain(chain, y, StopRule::reaches_level(p_level), rng, obs);
        if (res.reason != StopReason::Predicate)
            throw model_error("first_passage_up: event budget exhausted before passage");
        out.push_back(res.t_end);
    }
    return out;
}

Occupation1D bd_occupation(const BirthDeathParams& p, double burn_in, double window,
                           std::uint64_t seed) {
    const BirthDeathChain chain(p);
    Rng rng(seed);
    std::int64_t y = p.y0;
    auto identity = [](const std::int64_t& v) { return v; };
    OccupationObserver<std::int64_t, decltype(identity)> occ(burn_in, burn_in + window, identity);
    run_chain(chain, y, StopRule::time_horizon(burn_in + window), rng, occ);
    return occ.measure();
}

Occupation1D mm1_occupation(const MM1Params& p, double burn_in, double window,
                            std::uint64_t seed) {
    const Mm1Chain chain(p);
    Rng rng(seed);
    std::int64_t q = p.q0;
    auto identity = [](const std::int64_t& v) { return v; };
    OccupationObserver<std::int64_t, decltype(identity)> occ(burn_in, burn_in + window, identity);
    run_chain(chain, q, StopRule::time_horizon(burn_in + window), rng, occ);
    return occ.measure();
}

void write_samples_csv(std::ostream& os, const std::vector<double>& samples) {
    os << "replica,value\n";
    char buf[32];
    for (std::size_t k = 0; k < samples.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12g", samples[k]);
        os << k << ',' << buf << '\n';
    }
}

DominanceReport dominance_check(const std::vector<std::vector<std::int64_t>>& model_samples,
                                const std::vector<std::vector<std::int64_t>>& bound_samples,
                                const std::vector<double>& grid, double q_model,
                                double q_bound) {
    if (model_samples.empty() || bound_samples.empty())
        throw model_error("dominance_check: empty ensembles");
    const std::size_t n_grid = grid.size();
    for (const auto& row : model_samples)
        if (row.size() != n_grid) throw model_error("dominance_check: grid mismatch (model)");
    for (const auto& row : bound_samples)
        if (row.size() != n_grid) throw model_error("dominance_check: grid mismatch (bound)");

    DominanceReport rep;
    rep.grid = grid;
    const double n_model = static_cast<double>(model_samples.size());
    const double tail = 1.0 - q_model;
    rep.allowance = tail + 3.0 * std::sqrt(tail * (1.0 - tail) / n_model);

    for (std::size_t i = 0; i < n_grid; ++i) {
        std::vector<std::int64_t> bound_col;
        bound_col.reserve(bound_samples.size());
        for (const auto& row : bound_samples) bound_col.push_back(row[i]);
        const std::int64_t qb = quantile(std::move(bound_col), q_bound);

        std::size_t above = 0;
        for (const auto& row : model_samples)
            if (row[i] > qb) ++above;
        const double frac = static_cast<double>(above) / n_model;

        rep.bound_quantile.push_back(qb);
        rep.exceed_fraction.push_back(frac);
        if (frac > rep.allowance) ++rep.violations;
    }
    rep.pass = rep.violations == 0;
    return rep;
}

} // namespace sixsim
