#include "sixsim/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sixsim/fluid.hpp"
#include "sixsim/trajectory.hpp"

namespace sixsim {

namespace {
constexpr double kPmfTailCutoff = 1e-12;
}

std::vector<double> poisson_pmf(double mu) {
    if (!(mu >= 0)) throw model_error("poisson_pmf: mu must be nonnegative");
    std::vector<double> pmf;
    double p = std::exp(-mu);
    double cum = p;
    pmf.push_back(p);
    // upward recursion p(k+1) = p(k) mu / (k+1)
    for (std::int64_t k = 0; cum < 1.0 - kPmfTailCutoff; ++k) {
        p *= mu / static_cast<double>(k + 1);
        pmf.push_back(p);
        cum += p;
        if (k > 100000) break;
    }
    return pmf;
}

std::vector<double> geometric_pmf(double ratio) {
    if (!(ratio >= 0) || ratio >= 1)
        throw model_error("geometric_pmf: ratio must lie in [0, 1)");
    std::vector<double> pmf;
    double p = 1.0 - ratio;
    double cum = 0;
    while (cum < 1.0 - kPmfTailCutoff) {
        pmf.push_back(p);
        cum += p;
        p *= ratio;
        if (pmf.size() > 1000000) break;
    }
    return pmf;
}

double tv_distance(const Occupation1D& empirical, const std::vector<double>& pmf) {
    const double total = empirical.window_length();
    if (!(total > 0)) throw model_error("tv_distance: empty occupation");
    double pmf_mass = 0;
    for (double q : pmf) pmf_mass += q;

    double sum = 0;
    for (const auto& [k, w] : empirical.weights()) {
        const double p = w / total;
        if (k >= 0 && k < static_cast<std::int64_t>(pmf.size())) continue;
        sum += p; // empirical mass outside the truncated pmf support
    }
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(pmf.size()); ++k)
        sum += std::abs(empirical.fraction(k) - pmf[static_cast<std::size_t>(k)]);
    sum += 1.0 - pmf_mass; // reference tail beyond the truncation
    return 0.5 * sum;
}

double tv_distance(const Occupation2D& empirical, const std::vector<double>& pmf_x,
                   const std::vector<double>& pmf_y) {
    const double total = empirical.window_length();
    if (!(total > 0)) throw model_error("tv_distance: empty occupation");
    double mass_x = 0, mass_y = 0;
    for (double q : pmf_x) mass_x += q;
    for (double q : pmf_y) mass_y += q;

    const auto in_range = [&](std::int64_t i, std::int64_t j) {
        return i >= 0 && j >= 0 && i < static_cast<std::int64_t>(pmf_x.size()) &&
               j < static_cast<std::int64_t>(pmf_y.size());
    };

    double sum = 0;
    for (const auto& [key, w] : empirical.weights())
        if (!in_range(key.first, key.second)) sum += w / total;
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pmf_x.size()); ++i) {
        for (std::int64_t j = 0; j < static_cast<std::int64_t>(pmf_y.size()); ++j) {
            const double q =
                pmf_x[static_cast<std::size_t>(i)] * pmf_y[static_cast<std::size_t>(j)];
            sum += std::abs(empirical.fraction({i, j}) - q);
        }
    }
    sum += 1.0 - mass_x * mass_y;
    return 0.5 * sum;
}

double tv_distance(const Occupation1D& a, const Occupation1D& b) {
    const double ta = a.window_length(), tb = b.window_length();
    if (!(ta > 0) || !(tb > 0)) throw model_error("tv_distance: empty occupation");
    std::set<std::int64_t> keys;
    for (const auto& [k, w] : a.weights()) keys.insert(k);
    for (const auto& [k, w] : b.weights()) keys.insert(k);
    double sum = 0;
    for (auto k : keys) sum += std::abs(a.fraction(k) - b.fraction(k));
    return 0.5 * sum;
}

double tv_distance(const Occupation2D& a, const Occupation2D& b) {
    const double ta = a.window_length(), tb = b.window_length();
    if (!(ta > 0) || !(tb > 0)) throw model_error("tv_distance: empty occupation");
    std::set<std::pair<std::int64_t, std::int64_t>> keys;
    for (const auto& [k, w] : a.weights()) keys.insert(k);
    for (const auto& [k, w] : b.weights()) keys.insert(k);
    double sum = 0;
    for (const auto& k : keys) sum += std::abs(a.fraction(k) - b.fraction(k));
    return 0.5 * sum;
}

Occupation1D occupation_from_trajectory(
    const Trajectory& traj, const std::function<std::int64_t(const FullState&)>& observable,
    double window_start, double window_end) {
    Occupation1D acc(window_start, window_end);
    for_each_segment(traj, [&](double t0, double t1, const FullState& x) {
        acc.add(t0, t1, observable(x));
    });
    return acc;
}

Occupation2D occupation2d_from_trajectory(
    const Trajectory& traj,
    const std::function<std::pair<std::int64_t, std::int64_t>(const FullState&)>& observable,
    double window_start, double window_end) {
    Occupation2D acc(window_start, window_end);
    for_each_segment(traj, [&](double t0, double t1, const FullState& x) {
        acc.add(t0, t1, observable(x));
    });
    return acc;
}

std::vector<FitReport> product_poisson_conditional_test(const std::vector<Occupation2D>& cells,
                                                        const OdeSolution& fluid,
                                                        double rho_m, double rho_1, double c_m,
                                                        double threshold, double min_dwell) {
    std::vector<FitReport> out;
    out.reserve(cells.size());
    for (const auto& cell : cells) {
        FitReport rep;
        rep.threshold = threshold;
        rep.sample_size = cell.accumulated();
        if (rep.sample_size < min_dwell) {
            rep.statistic = 0;
            rep.pass = false;
            out.push_back(rep);
            continue;
        }
        const double mid = 0.5 * (cell.window_start() + cell.window_end());
        const double fbar = fluid.eval(0, mid);
        const double mu_g = rho_m * c_m / fbar;
        const double mu_z = rho_1 * (1.0 - c_m - fbar) / fbar;
        rep.statistic = tv_distance(cell, poisson_pmf(mu_g), poisson_pmf(std::max(mu_z, 0.0)));
        rep.pass = rep.statistic < rep.threshold;
        out.push_back(rep);
    }
    return out;
}

DiracReport dirac_time_marginal_check(const std::vector<std::vector<std::int64_t>>& f_samples,
                                      std::int64_t N, const std::vector<double>& grid,
                                      const OdeSolution& fluid, double tolerance) {
    DiracReport rep;
    rep.sup_error.reserve(f_samples.size());
    for (const auto& replica : f_samples) {
        if (replica.size() != grid.size())
            throw model_error("dirac check: sample/grid size mismatch");
        double sup = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double fbar = fluid.eval(0, grid[i]);
            const double err =
                std::abs(static_cast<double>(replica[i]) / static_cast<double>(N) - fbar);
            sup = std::max(sup, err);
        }
        rep.sup_error.push_back(sup);
        rep.mean_sup += sup;
        rep.max_sup = std::max(rep.max_sup, sup);
    }
    if (!rep.sup_error.empty()) rep.mean_sup /= static_cast<double>(rep.sup_error.size());
    rep.pass = !rep.sup_error.empty() && rep.mean_sup < tolerance;
    return rep;
}

FitReport limit_chain_equivalence_test(const Occupation2D& model_sz, const Occupation2D& chain_sz,
                                       double threshold) {
    FitReport rep;
    rep.threshold = threshold;
    rep.statistic = tv_distance(model_sz, chain_sz);
    rep.sample_size = model_sz.accumulated();
    rep.pass = rep.statistic < threshold;
    return rep;
}

} // namespace sixsim
