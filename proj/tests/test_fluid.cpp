#include <doctest.h>

#include <cmath>
#include <functional>

#include "sixsim/fluid.hpp"
#include "sixsim/observers.hpp"
#include "sixsim/trajectory.hpp"

using namespace sixsim;

namespace {

// adaptive Simpson quadrature, used as the independent route to the
// free-fraction ODE through its separable implicit form
double simpson(const std::function<double(double)>& f, double a, double b, double eps,
               int depth) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    const double c1 = 0.5 * (a + c), c2 = 0.5 * (c + b);
    const double left = (c - a) / 6.0 * (fa + 4.0 * f(c1) + fc);
    const double right = (b - c) / 6.0 * (fc + 4.0 * f(c2) + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, c, eps / 2, depth - 1) + simpson(f, c, b, eps / 2, depth - 1);
}

// time to flow from f0 down (or up) to f, from dt = u du / (gain - drain u)
double implicit_time(double f0, double f, double drain, double gain) {
    auto integrand = [&](double u) { return u / (gain - drain * u); };
    return simpson(integrand, f0, f, 1e-12, 40);
}

} // namespace

TEST_CASE("sequestration drain: zero initial data stays at zero") {
    const SubFluidParams p{1, 1, 1, 1, 1, 2.0};
    const OdeSolution sol = integrate_subcritical(0.0, 0.0, p, 5.0, 1e-3);
    for (double v : sol.components[0]) CHECK(v == 0.0);
    for (double v : sol.components[1]) CHECK(v == 0.0);
}

TEST_CASE("sequestration drain: s + z never increases and drains to zero") {
    const SubFluidParams p{1, 1, 1, 1, 1, 2.0};
    const OdeSolution sol = integrate_subcritical(0.3, 0.2, p, 30.0, 1e-3);
    double prev = 0.5;
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        const double s = sol.components[0][i], z = sol.components[1][i];
        CHECK(s >= -1e-12);
        CHECK(z >= -1e-12);
        CHECK(s + z <= prev + 1e-12);
        prev = s + z;
    }
    CHECK(sol.back(0) + sol.back(1) < 1e-4);
}

TEST_CASE("sequestration drain: step-halving agreement at t = 10") {
    const SubFluidParams p{1, 1, 1, 1, 1, 2.0};
    CHECK(step_halving_error_subcritical(0.3, 0.2, p, 10.0, 0.01) < 1e-6);
}

TEST_CASE("free-fraction flow: equilibrium start stays put") {
    const SuperFluidParams p{1.0, 1.0, 1.0, 0.5};
    const double f_inf = equilibrium_free_fraction(p);
    CHECK(f_inf == doctest::Approx(0.25));
    const OdeSolution sol = integrate_supercritical(f_inf, p, 10.0, 1e-3);
    for (double v : sol.components[0]) CHECK(v == doctest::Approx(f_inf).epsilon(1e-10));
}

TEST_CASE("free-fraction flow matches the separable-form quadrature") {
    const SuperFluidParams p{1.0, 1.0, 1.0, 0.5};
    const double drain = p.delta_6 * (p.rho_6 + p.rho_1);      // 2
    const double gain = p.delta_6 * p.rho_1 * (1.0 - p.c_m);   // 0.5
    const OdeSolution sol = integrate_supercritical(0.4, p, 20.0, 1e-3);

    // decreasing toward 0.25, never crossing
    double prev = 0.4;
    for (double v : sol.components[0]) {
        CHECK(v <= prev + 1e-12);
        CHECK(v >= 0.25 - 1e-9);
        prev = v;
    }
    CHECK(sol.back(0) == doctest::Approx(0.25).epsilon(1e-6));

    // invert the implicit solution by bisection at a few probe times
    for (const double t_probe : {1.0, 5.0, 20.0}) {
        double lo = 0.25 + 1e-13, hi = 0.4;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (implicit_time(0.4, mid, drain, gain) < t_probe)
                hi = mid;
            else
                lo = mid;
        }
        const double f_oracle = 0.5 * (lo + hi);
        CHECK(std::abs(sol.eval(0, t_probe) - f_oracle) < 1e-4);
    }
}

TEST_CASE("free-fraction flow: starts below equilibrium rise toward it") {
    const SuperFluidParams p{1.0, 1.0, 1.0, 0.5};
    const OdeSolution sol = integrate_supercritical(0.1, p, 15.0, 1e-3);
    double prev = 0.1;
    for (double v : sol.components[0]) {
        CHECK(v >= prev - 1e-12);
        CHECK(v <= 0.25 + 1e-9);
        prev = v;
    }
    CHECK(sol.back(0) == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("free-fraction flow rejects inadmissible inputs") {
    const SuperFluidParams p{1.0, 1.0, 1.0, 0.5};
    CHECK_THROWS_AS(integrate_supercritical(0.0, p, 1.0, 1e-3), model_error);
    CHECK_THROWS_AS(integrate_supercritical(0.6, p, 1.0, 1e-3), model_error);
    const SuperFluidParams bad{1.0, 1.0, 0.0, 0.5};
    CHECK_THROWS_AS(integrate_supercritical(0.4, bad, 1.0, 1e-3), model_error);

    ModelParams mp;
    mp.N = 10;
    mp.J = 1;
    mp.alpha_r = {1.0};
    mp.beta_r = {2.0};
    mp.C_r = {1};
    mp.alpha_m = mp.beta_m = mp.beta_6 = mp.lambda = mp.eta = 1.0;
    mp.delta_6 = 0.0; // no degradation: this fluid limit does not apply
    mp.C_m = 5;
    CHECK_THROWS_AS(SuperFluidParams::from(mp, ScaledParams::from(mp)), model_error);
}

TEST_CASE("free-fraction ODE is consistent with its integral form") {
    // fbar(t) = f0 - delta_6 (rho_6 + rho_1) t + delta_6 rho_1 (1 - c_m) int 1/fbar
    const SuperFluidParams p{1.0, 2.0, 0.5, 0.25};
    const OdeSolution sol = integrate_supercritical(0.5, p, 8.0, 1e-3);
    const double drain = p.delta_6 * (p.rho_6 + p.rho_1);
    const double gain = p.delta_6 * p.rho_1 * (1.0 - p.c_m);
    double integral = 0;
    double worst = 0;
    for (std::size_t i = 1; i < sol.times.size(); ++i) {
        const double h = sol.times[i] - sol.times[i - 1];
        integral += 0.5 * h * (1.0 / sol.components[0][i - 1] + 1.0 / sol.components[0][i]);
        const double rhs = 0.5 - drain * sol.times[i] + gain * integral;
        worst = std::max(worst, std::abs(sol.components[0][i] - rhs));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("free-fraction step-halving validation") {
    const SuperFluidParams p{1.0, 1.0, 1.0, 0.5};
    CHECK(step_halving_error_supercritical(0.4, p, 5.0, 1e-3) < 1e-6);
}

TEST_CASE("limit chain: enabled transitions and swap rates") {
    const LimitChainParams p{1.0, 1.0, 1.0, 1.0, 1.0};
    LimitChain chain(p);
    double rates[LimitChain::kMaxSlots];

    const LimitChainState origin{0, 0};
    CHECK(chain.fill_rates(origin, rates) == doctest::Approx(1.0)); // only creation
    CHECK(rates[2] == doctest::Approx(1.0));

    const LimitChainState mid{2, 3};
    chain.fill_rates(mid, rates);
    CHECK(rates[0] == doctest::Approx(3.0)); // z swaps into s
    CHECK(rates[1] == doctest::Approx(2.0)); // s swaps back
    CHECK(rates[3] == doctest::Approx(3.0));
}

TEST_CASE("limit chain is positive recurrent in the Lyapunov window") {
    const LimitChainParams p{1.0, 1.0, 1.0, 1.0, 1.0};
    const Interval window = lyapunov_window(p);
    CHECK(window.lo == doctest::Approx(1.0));
    CHECK(window.hi == doctest::Approx(2.0));
    const double a = 0.5 * (window.lo + window.hi);

    LimitChain chain(p);
    LimitChainState state{0, 0};
    Rng rng(2718);
    struct HTrack : NullObserver {
        double a;
        double weighted = 0, total = 0;
        std::int64_t max_sz = 0;
        double drift_sum = 0;
        std::int64_t drift_n = 0;
        LimitChainState prev{0, 0};
        bool have_prev = false;
        void segment(double t0, double t1, const LimitChainState& x) {
            weighted += (a * static_cast<double>(x.s) + static_cast<double>(x.z)) * (t1 - t0);
            total += t1 - t0;
            max_sz = std::max(max_sz, x.s + x.z);
            prev = x;
            have_prev = true;
        }
        void event(double, TransitionLabel, const LimitChainState& x) {
            if (have_prev && prev.s + prev.z >= 6) {
                drift_sum += a * static_cast<double>(x.s - prev.s) +
                             static_cast<double>(x.z - prev.z);
                ++drift_n;
            }
        }
    } track;
    track.a = a;
    run_chain(chain, state, StopRule::time_horizon(1e18), rng, track, 1000000);

    CHECK(track.weighted / track.total < 50.0); // time-average of H_a stays bounded
    REQUIRE(track.drift_n > 100);
    CHECK(track.drift_sum / static_cast<double>(track.drift_n) < 0.0);
}

TEST_CASE("lyapunov window degenerates without degradation") {
    CHECK(lyapunov_window({1.0, 1.0, 1.0, 1.0, 0.0}).empty());
    const Interval w = lyapunov_window({2.0, 2.0, 1.0, 1.0, 0.5});
    CHECK(w.lo == doctest::Approx(1.0));
    CHECK(w.hi == doctest::Approx(1.125));
}

TEST_CASE("conditional fast-variable parameters") {
    // boundary: no sequestered mass at x = 1 - c_m
    CHECK(conditional_poisson_params(0.5, 1.0, 1.0, 0.5).mu_z == doctest::Approx(0.0));
    CHECK(conditional_poisson_params(0.25, 1.0, 1.0, 0.5).mu_g == doctest::Approx(2.0));

    // at the equilibrium fraction the free-6S parameter is exactly rho_6
    const SuperFluidParams p{1.0, 1.0, 1.0, 0.5};
    const double f_inf = equilibrium_free_fraction(p);
    const ConditionalPoisson cp = conditional_poisson_params(f_inf, 1.0, p.rho_1, p.c_m);
    CHECK(cp.mu_z == doctest::Approx(p.rho_6).epsilon(1e-12));

    CHECK_THROWS_AS(conditional_poisson_params(0.0, 1.0, 1.0, 0.5), model_error);
    CHECK_THROWS_AS(conditional_poisson_params(0.7, 1.0, 1.0, 0.5), model_error);
}

TEST_CASE("limit-chain trajectories embed into the shared format") {
    const LimitChainParams p{2.0, 1.0, 1.0, 1.0, 1.0};
    const Trajectory t = simulate_limit_chain(p, {0, 0}, StopRule::time_horizon(100.0), 17);
    CHECK(t.model == ModelKind::LimitChain);
    CHECK_FALSE(t.events.empty());
    const TrajEvent& first = t.events.front();
    CHECK(first.label == TransitionLabel::SixSCreate); // from (0,0) only creation fires
    CHECK(first.dz == 1);
}
