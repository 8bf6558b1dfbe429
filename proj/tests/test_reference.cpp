#include <doctest.h>

#include <cmath>

#include "sixsim/observers.hpp"
#include "sixsim/occupation.hpp"
#include "sixsim/reference.hpp"
#include "sixsim/trajectory.hpp"

using namespace sixsim;

TEST_CASE("birth-death dwell law converges to the Poisson stationary law") {
    const BirthDeathParams p{1.0, 1.0, 1};
    const Occupation1D occ = bd_occupation(p, /*burn_in=*/20.0, /*window=*/500000.0, 8101);
    CHECK(tv_distance(occ, poisson_pmf(1.0)) < 0.02);

    const BirthDeathParams p2{2.0, 1.0, 0};
    const Occupation1D occ2 = bd_occupation(p2, 20.0, 200000.0, 8102);
    double mean_v = 0;
    for (const auto& [k, w] : occ2.weights())
        mean_v += static_cast<double>(k) * w / occ2.window_length();
    CHECK(mean_v == doctest::Approx(2.0).epsilon(0.025));
}

TEST_CASE("birth-death path with zero horizon stays put") {
    const Trajectory t = simulate_bd({1.0, 1.0, 0}, StopRule::time_horizon(0.0), 3);
    CHECK(t.events.empty());
    CHECK(t.final_state.f == 0);
}

TEST_CASE("hitting time of zero: degenerate and near-pure-death cases") {
    CHECK(hitting_time_zero({1.0, 1.0, 0}, 10, 1).size() == 10);
    for (double h : hitting_time_zero({1.0, 1.0, 0}, 10, 1)) CHECK(h == 0.0);

    // single individual, negligible birth rate: one exponential death
    const auto samples = hitting_time_zero({1e-6, 1.0, 1}, 2000, 8103);
    CHECK(mean(samples) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("hitting time of zero scales logarithmically") {
    const int reps = 800;
    const auto h3 = hitting_time_zero({1.0, 1.0, 1000}, reps, 8104);
    const auto h4 = hitting_time_zero({1.0, 1.0, 10000}, reps, 8105);
    const double r3 = mean(h3) / std::log(1000.0);
    const double r4 = mean(h4) / std::log(10000.0);
    CHECK(std::abs(r3 / r4 - 1.0) < 0.10);
}

TEST_CASE("first passage up: pure birth and dominated-birth regimes") {
    // negligible deaths, level 1: a single exponential jump
    const auto t1 = first_passage_up({2.0, 1e-9, 0}, 1, 2000, 8106);
    CHECK(mean(t1) == doctest::Approx(0.5).epsilon(0.05));

    // births dominate: the passage is a sum of p short exponentials
    const auto tp = first_passage_up({100.0, 1.0, 0}, 3, 2000, 8107);
    CHECK(mean(tp) == doctest::Approx(0.03).epsilon(0.12));

    // rescaled statistic rho^p T_p / p! is finite and stable across replica counts
    const BirthDeathParams p{1.0, 1.0, 0};
    const std::int64_t level = 4;
    const auto all = first_passage_up(p, level, 3000, 8108);
    const double scale = 1.0 / 24.0; // rho^p / p! with rho = 1, p = 4
    std::vector<double> first_half(all.begin(), all.begin() + 1500);
    const double m_half = mean(first_half) * scale;
    const double m_full = mean(all) * scale;
    CHECK(std::isfinite(m_full));
    CHECK(m_full > 0);
    CHECK(std::abs(m_half / m_full - 1.0) < 0.2);
}

TEST_CASE("mm1 queue length: stationary law and mean") {
    const MM1Params half{0.5, 1.0, 0};
    CHECK(half.stable());
    const Occupation1D occ = mm1_occupation(half, 50.0, 400000.0, 8109);
    CHECK(occ.fraction(0) == doctest::Approx(0.5).epsilon(0.04));
    CHECK(tv_distance(occ, geometric_pmf(0.5)) < 0.03);

    const Trajectory t = simulate_mm1(half, StopRule::time_horizon(0.0), 4);
    CHECK(t.events.empty());

    const MM1Params heavy{0.9, 1.0, 0};
    const Occupation1D occ2 = mm1_occupation(heavy, 2000.0, 500000.0, 8110);
    double mean_q = 0;
    for (const auto& [k, w] : occ2.weights())
        mean_q += static_cast<double>(k) * w / occ2.window_length();
    CHECK(mean_q == doctest::Approx(9.0).epsilon(0.10));
}

TEST_CASE("growth proxy: the reference process stays far below log-squared") {
    // from an empty start, the running maximum over a horizon of length N
    // stays under ln(N)^2 essentially always at desk scale
    for (const std::int64_t N : {1000, 10000}) {
        const double bound = std::pow(std::log(static_cast<double>(N)), 2);
        int ok = 0;
        const int reps = 40;
        for (int k = 0; k < reps; ++k) {
            BirthDeathChain chain({1.0, 1.0, 0});
            std::int64_t y = 0;
            Rng rng(8200 ^ static_cast<std::uint64_t>(N + k));
            auto id = [](const std::int64_t& v) { return v; };
            MaxObserver<std::int64_t, decltype(id)> max_y(id);
            run_chain(chain, y, StopRule::time_horizon(static_cast<double>(N)), rng, max_y);
            if (static_cast<double>(max_y.max_value()) <= bound) ++ok;
        }
        CHECK(ok >= 38); // >= 95% of replicas
    }
}

TEST_CASE("quantile helper uses nearest rank") {
    std::vector<std::int64_t> xs{5, 1, 4, 2, 3};
    CHECK(quantile(xs, 0.0) == 1);
    CHECK(quantile(xs, 0.5) == 3);
    CHECK(quantile(xs, 1.0) == 5);
}

TEST_CASE("dominance audit: trivial domination and planted violations") {
    const std::vector<double> grid{0.0, 1.0, 2.0};
    std::vector<std::vector<std::int64_t>> zeros(200, std::vector<std::int64_t>(3, 0));
    std::vector<std::vector<std::int64_t>> bound(200, std::vector<std::int64_t>(3, 0));
    Rng rng(8111);
    for (auto& row : bound)
        for (auto& v : row) v = static_cast<std::int64_t>(rng.uniform_below(5));

    const DominanceReport ok = dominance_check(zeros, bound, grid);
    CHECK(ok.pass);
    CHECK(ok.violations == 0);

    std::vector<std::vector<std::int64_t>> above(200, std::vector<std::int64_t>(3, 100));
    const DominanceReport bad = dominance_check(above, bound, grid);
    CHECK_FALSE(bad.pass);
    CHECK(bad.violations == 3);
}
