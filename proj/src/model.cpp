#include "sixsim/model.hpp"

#include <cstddef>

namespace sixsim {

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw model_error("ModelParams: " + msg); };
    if (N < 1) fail("N must be a positive integer");
    if (J < 1) fail("J must be a positive integer");
    if (static_cast<int>(alpha_r.size()) != J || static_cast<int>(beta_r.size()) != J ||
        static_cast<int>(C_r.size()) != J)
        fail("alpha_r, beta_r, C_r must all have length J");
    if (J > 16) fail("at most 16 rRNA types supported");
    for (int j = 0; j < J; ++j) {
        if (!(alpha_r[j] > 0)) fail("alpha_r must be strictly positive");
        if (!(beta_r[j] > 0)) fail("beta_r must be strictly positive");
        if (C_r[j] < 1) fail("C_r must be positive integers");
        if (C_r[j] > N) fail("C_r[j] must not exceed N");
    }
    if (!(alpha_m > 0)) fail("alpha_m must be strictly positive");
    if (!(beta_m > 0)) fail("beta_m must be strictly positive");
    if (C_m < 1) fail("C_m must be a positive integer");
    if (!(beta_6 > 0)) fail("beta_6 must be strictly positive");
    if (!(delta_6 >= 0)) fail("delta_6 must be nonnegative");
    if (!(lambda > 0)) fail("lambda must be strictly positive");
    if (!(eta > 0)) fail("eta must be strictly positive");
}

ScaledParams ScaledParams::from(const ModelParams& p) {
    p.validate();
    ScaledParams s;
    std::int64_t cr_sum = 0;
    s.c_r.reserve(static_cast<std::size_t>(p.J));
    for (int j = 0; j < p.J; ++j) {
        s.c_r.push_back({p.C_r[j], p.N});
        cr_sum += p.C_r[j];
    }
    s.c_m = {p.C_m, p.N};
    s.c_r_total = {cr_sum, p.N};
    s.A_N = p.N - p.J - cr_sum;
    s.gamma = {s.A_N, p.N};
    return s;
}

bool check_saturation(const ModelParams& p, const ScaledParams& s) {
    if (static_cast<int>(s.c_r.size()) != p.J)
        throw model_error("check_saturation: scaled params inconsistent with params");
    const bool left = s.c_m.less_than_one() && s.c_r_total.less_than_one();
    const bool right = (s.c_r_total + s.c_m).greater_than_one();
    return left && right;
}

PhaseClass classify_phase(const ModelParams& p) {
    p.validate();
    PhaseClass out;
    int above = 0, below = 0;
    std::vector<int> super;
    for (int j = 0; j < p.J; ++j) {
        if (p.alpha_r[j] == p.beta_r[j])
            throw boundary_error("classify_phase: alpha_r/beta_r is exactly 1 for type " +
                                 std::to_string(j + 1));
        if (p.alpha_r[j] > p.beta_r[j]) {
            ++above;
            super.push_back(j);
        } else {
            ++below;
        }
    }
    if (above == p.J) {
        out.tag = Phase::Exponential;
    } else if (below == p.J) {
        out.tag = Phase::Stationary;
    } else {
        out.tag = Phase::Mixed;
        out.supercritical_set = std::move(super);
    }
    return out;
}

DerivedConstants derived_constants(const ModelParams& p, const ScaledParams& s) {
    DerivedConstants d;
    const double c_m = s.c_m.value();
    const double c_r = s.c_r_total.value();

    d.rho_1 = {true, p.eta / p.lambda, ""};
    d.rho_m_super = {true, p.beta_m / p.alpha_m, ""};

    if (p.delta_6 > 0)
        d.rho_6 = {true, p.beta_6 / p.delta_6, ""};
    else
        d.rho_6 = {false, 0, "delta_6 = 0"};

    if (s.c_m.greater_than_one())
        d.rho_m_aux_sub = {true, p.beta_m / (p.alpha_m * (c_m - 1.0)), ""};
    else
        d.rho_m_aux_sub = {false, 0, "requires c_m > 1"};

    if ((s.c_m + s.c_r_total).greater_than_one())
        d.rho_m_exp = {true, p.beta_m * (1.0 - c_r) / (p.alpha_m * (c_m + c_r - 1.0)), ""};
    else
        d.rho_m_exp = {false, 0, "requires c_m + c_r_total > 1"};

    if (p.delta_6 > 0 && s.c_m.less_than_one()) {
        const double rho_1 = d.rho_1.value;
        const double rho_6 = d.rho_6.value;
        d.f_infinity = {true, rho_1 * (1.0 - c_m) / (rho_6 + rho_1), ""};
    } else {
        d.f_infinity = {false, 0,
                        p.delta_6 > 0 ? "requires c_m < 1" : "delta_6 = 0"};
    }
    return d;
}

std::int64_t psi(const FullState& x, const ModelParams& p) {
    const std::int64_t m = p.N - x.f - x.s - x.promoter_sum() - x.elongation_sum();
    if (m < 0)
        throw invalid_state_error("psi: component counts exceed N");
    return m;
}

void validate_state(const FullState& x, const ModelParams& p) {
    if (static_cast<int>(x.u.size()) != p.J || static_cast<int>(x.r.size()) != p.J)
        throw invalid_state_error("state: u and r must have length J");
    if (x.f < 0 || x.s < 0 || x.z < 0)
        throw invalid_state_error("state: negative component");
    for (int j = 0; j < p.J; ++j) {
        if (x.u[j] > 1) throw invalid_state_error("state: u[j] must be 0 or 1");
        if (x.r[j] < 0 || x.r[j] > p.C_r[j])
            throw invalid_state_error("state: r[j] outside [0, C_r[j]]");
        if (x.f > 0 && x.u[j] == 0)
            throw invalid_state_error("state: free polymerase with an empty promoter");
    }
    const std::int64_t m = psi(x, p);
    if (m > p.C_m)
        throw invalid_state_error("state: mRNA elongation count exceeds C_m");
}

std::int64_t aux_empty_slots(const AuxState& x, const ModelParams& p) {
    return p.C_m - (p.N - x.f - x.s);
}

void validate_aux_state(const AuxState& x, const ModelParams& p) {
    if (x.f < 0 || x.s < 0 || x.z < 0)
        throw invalid_state_error("aux state: negative component");
    if (x.f + x.s > p.N)
        throw invalid_state_error("aux state: f + s exceeds N");
    const std::int64_t busy = p.N - x.f - x.s;
    if (busy > p.C_m)
        throw invalid_state_error("aux state: mRNA elongation count exceeds C_m");
}

} // namespace sixsim
