#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sixsim/engine.hpp"
#include "sixsim/model.hpp"

namespace sixsim {

// Fixed-step numerical solution of a fluid limit: a uniform time grid and one
// value track per component.
struct OdeSolution {
    std::vector<double> times;
    std::vector<std::vector<double>> components; // components[c][i] at times[i]
    double step = 0;
    std::string method = "rk4";

    // Linear interpolation of component c at time t (grid steps are small
    // enough that this is far below the Monte-Carlo noise it is compared to).
    double eval(std::size_t c, double t) const;

    double back(std::size_t c) const { return components[c].back(); }
};

// Drain dynamics of the sequestered/free-6S fractions when mRNA slots
// outnumber polymerases (c_m > 1):
//   s' = -eta s + lambda z (beta_m - (beta_m - eta) s) / (alpha_m (c_m - 1 + s) + lambda z)
//   (s + z)' = -delta_6 z
struct SubFluidParams {
    double alpha_m = 0;
    double beta_m = 0;
    double lambda = 0;
    double eta = 0;
    double delta_6 = 0;
    double c_m = 0;

    static SubFluidParams from(const ModelParams& p, const ScaledParams& s);
};

OdeSolution integrate_subcritical(double s0, double z0, const SubFluidParams& p, double t_end,
                                  double step);

// Free-fraction dynamics on the accelerated timescale when polymerases
// outnumber mRNA slots (c_m < 1):
//   fbar' = -delta_6 (rho_6 + rho_1) + delta_6 rho_1 (1 - c_m) / fbar
struct SuperFluidParams {
    double rho_1 = 0;
    double rho_6 = 0;
    double delta_6 = 0;
    double c_m = 0;

    // Requires delta_6 > 0 and c_m < 1; the delta_6 = 0 regime has no fluid
    // limit in this form and is rejected.
    static SuperFluidParams from(const ModelParams& p, const ScaledParams& s);
};

OdeSolution integrate_supercritical(double f0, const SuperFluidParams& p, double t_end,
                                    double step);

// Equilibrium of the free-fraction ODE: rho_1 (1 - c_m) / (rho_6 + rho_1).
double equilibrium_free_fraction(const SuperFluidParams& p);

// Max pointwise gap between solutions at step h and h/2, on the h grid.
double step_halving_error_subcritical(double s0, double z0, const SubFluidParams& p,
                                      double t_end, double step);
double step_halving_error_supercritical(double f0, const SuperFluidParams& p, double t_end,
                                        double step);

struct Interval {
    double lo = 0;
    double hi = 0;
    bool empty() const { return !(hi > lo); }
};

// Window of Lyapunov exponents a for H_a(s, z) = a s + z on the limit chain:
// (1, 1 + delta_6 / (lambda rho_m)); empty when delta_6 = 0.
Interval lyapunov_window(const LimitChainParams& p);

struct ConditionalPoisson {
    double mu_g = 0; // empty mRNA slots
    double mu_z = 0; // free 6S
};

// Fast-variable law conditioned on the free fraction x:
// (rho_m c_m / x, rho_1 (1 - c_m - x) / x), rho_m = beta_m/alpha_m, rho_1 = eta/lambda.
ConditionalPoisson conditional_poisson_params(double x, double rho_m, double rho_1, double c_m);

// CSV export: time column plus one column per component.
void write_ode_csv(std::ostream& os, const OdeSolution& sol,
                   const std::vector<std::string>& names);

} // namespace sixsim
