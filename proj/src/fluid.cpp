#include "sixsim/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace sixsim {

namespace {

constexpr double kSingularFloor = 1e-6;

// Classic RK4 with a fixed step; F: (const double* y, double* dy).
template <int Dim, class F>
OdeSolution rk4(const double (&y0)[Dim], double t_end, double step, F&& deriv) {
    if (!(step > 0)) throw model_error("ode: step must be positive");
    if (!(t_end >= 0)) throw model_error("ode: t_end must be nonnegative");
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / step - 1e-12));

    OdeSolution sol;
    sol.step = step;
    sol.times.reserve(n_steps + 1);
    sol.components.assign(Dim, {});
    for (int c = 0; c < Dim; ++c) sol.components[c].reserve(n_steps + 1);

    double y[Dim], k1[Dim], k2[Dim], k3[Dim], k4[Dim], tmp[Dim];
    for (int c = 0; c < Dim; ++c) y[c] = y0[c];

    auto record = [&](double t) {
        sol.times.push_back(t);
        for (int c = 0; c < Dim; ++c) sol.components[c].push_back(y[c]);
    };
    record(0.0);

    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * step;
        const double h = std::min(step, t_end - t);
        deriv(y, k1);
        for (int c = 0; c < Dim; ++c) tmp[c] = y[c] + 0.5 * h * k1[c];
        deriv(tmp, k2);
        for (int c = 0; c < Dim; ++c) tmp[c] = y[c] + 0.5 * h * k2[c];
        deriv(tmp, k3);
        for (int c = 0; c < Dim; ++c) tmp[c] = y[c] + h * k3[c];
        deriv(tmp, k4);
        for (int c = 0; c < Dim; ++c)
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        record(t + h);
    }
    return sol;
}

} // namespace

double OdeSolution::eval(std::size_t c, double t) const {
    const auto& ts = times;
    const auto& v = components.at(c);
    if (ts.empty()) throw model_error("ode eval: empty solution");
    if (t <= ts.front()) return v.front();
    if (t >= ts.back()) return v.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const auto i = static_cast<std::size_t>(it - ts.begin());
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return v[i - 1] + w * (v[i] - v[i - 1]);
}

SubFluidParams SubFluidParams::from(const ModelParams& p, const ScaledParams& s) {
    if (!s.c_m.greater_than_one())
        throw model_error("subcritical fluid limit requires c_m > 1");
    return {p.alpha_m, p.beta_m, p.lambda, p.eta, p.delta_6, s.c_m.value()};
}

OdeSolution integrate_subcritical(double s0, double z0, const SubFluidParams& p, double t_end,
                                  double step) {
    if (!(p.c_m > 1)) throw model_error("integrate_subcritical: requires c_m > 1");
    if (s0 < 0 || z0 < 0 || s0 + z0 >= 1)
        throw model_error("integrate_subcritical: requires s0, z0 >= 0 and s0 + z0 < 1");
    const double y0[2] = {s0, z0};
    auto sol = rk4<2>(y0, t_end, step, [&](const double* y, double* dy) {
        const double s = y[0], z = y[1];
        const double num = p.beta_m - (p.beta_m - p.eta) * s;
        const double den = p.alpha_m * (p.c_m - 1.0 + s) + p.lambda * z;
        const double ds = -p.eta * s + p.lambda * z * num / den;
        dy[0] = ds;
        dy[1] = -p.delta_6 * z - ds; // from (s + z)' = -delta_6 z
    });
    return sol;
}

SuperFluidParams SuperFluidParams::from(const ModelParams& p, const ScaledParams& s) {
    if (!(p.delta_6 > 0))
        throw model_error("supercritical fluid limit: delta_6 = 0 is unsupported");
    if (!s.c_m.less_than_one())
        throw model_error("supercritical fluid limit requires c_m < 1");
    return {p.eta / p.lambda, p.beta_6 / p.delta_6, p.delta_6, s.c_m.value()};
}

OdeSolution integrate_supercritical(double f0, const SuperFluidParams& p, double t_end,
                                    double step) {
    if (!(p.delta_6 > 0)) throw model_error("integrate_supercritical: requires delta_6 > 0");
    if (!(p.c_m < 1)) throw model_error("integrate_supercritical: requires c_m < 1");
    if (!(f0 > 0) || !(f0 < 1.0 - p.c_m))
        throw model_error("integrate_supercritical: f0 must lie in (0, 1 - c_m)");
    const double drain = p.delta_6 * (p.rho_6 + p.rho_1);
    const double gain = p.delta_6 * p.rho_1 * (1.0 - p.c_m);
    const double y0[1] = {f0};
    return rk4<1>(y0, t_end, step, [&](const double* y, double* dy) {
        if (y[0] < kSingularFloor)
            throw model_error("integrate_supercritical: free fraction hit the singular floor");
        dy[0] = -drain + gain / y[0];
    });
}

double equilibrium_free_fraction(const SuperFluidParams& p) {
    if (!(p.delta_6 > 0) || !(p.c_m < 1))
        throw model_error("equilibrium_free_fraction: requires delta_6 > 0 and c_m < 1");
    return p.rho_1 * (1.0 - p.c_m) / (p.rho_6 + p.rho_1);
}

namespace {

double halving_gap(const OdeSolution& coarse, const OdeSolution& fine) {
    double gap = 0;
    for (std::size_t i = 0; i < coarse.times.size(); ++i) {
        for (std::size_t c = 0; c < coarse.components.size(); ++c) {
            const double a = coarse.components[c][i];
            const double b = fine.eval(c, coarse.times[i]);
            gap = std::max(gap, std::abs(a - b));
        }
    }
    return gap;
}

} // namespace

double step_halving_error_subcritical(double s0, double z0, const SubFluidParams& p,
                                      double t_end, double step) {
    return halving_gap(integrate_subcritical(s0, z0, p, t_end, step),
                       integrate_subcritical(s0, z0, p, t_end, step / 2));
}

double step_halving_error_supercritical(double f0, const SuperFluidParams& p, double t_end,
                                        double step) {
    return halving_gap(integrate_supercritical(f0, p, t_end, step),
                       integrate_supercritical(f0, p, t_end, step / 2));
}

Interval lyapunov_window(const LimitChainParams& p) {
    p.validate();
    if (p.delta_6 == 0) return {1.0, 1.0};
    return {1.0, 1.0 + p.delta_6 / (p.lambda * p.rho_m)};
}

ConditionalPoisson conditional_poisson_params(double x, double rho_m, double rho_1, double c_m) {
    if (!(x > 0)) throw model_error("conditional_poisson_params: x must be positive");
    if (x > 1.0 - c_m + 1e-12)
        throw model_error("conditional_poisson_params: x must not exceed 1 - c_m");
    return {rho_m * c_m / x, rho_1 * std::max(1.0 - c_m - x, 0.0) / x};
}

void write_ode_csv(std::ostream& os, const OdeSolution& sol,
                   const std::vector<std::string>& names) {
    os << "time";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    char buf[32];
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", sol.times[i]);
        os << buf;
        for (std::size_t c = 0; c < sol.components.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.12g", sol.components[c][i]);
            os << ',' << buf;
        }
        os << '\n';
    }
}

} // namespace sixsim
