#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sixsim {

class model_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when phase classification hits an initiation/completion ratio of
// exactly 1: the phase conditions are strict inequalities and do not cover
// the boundary, so we refuse to classify instead of guessing.
class boundary_error : public model_error {
public:
    using model_error::model_error;
};

class invalid_state_error : public model_error {
public:
    using model_error::model_error;
};

// All rate constants and capacities of the sequestration model. N, the total
// polymerase count, doubles as the scaling parameter of every limit check.
struct ModelParams {
    std::int64_t N = 0;             // total polymerase count
    int J = 0;                      // number of rRNA types
    std::vector<double> alpha_r;    // rRNA initiation rates, per type
    std::vector<double> beta_r;     // rRNA completion rates, per type
    std::vector<std::int64_t> C_r;  // rRNA elongation capacities, per type
    double alpha_m = 0;             // mRNA binding rate (per free polymerase and slot)
    double beta_m = 0;              // mRNA release rate (per busy slot)
    std::int64_t C_m = 0;           // number of mRNA slots
    double beta_6 = 0;              // 6S creation rate
    double delta_6 = 0;             // free-6S degradation rate (may be 0)
    double lambda = 0;              // sequestration rate (per free polymerase and free 6S)
    double eta = 0;                 // desequestration rate (per sequestered polymerase)

    void validate() const; // throws model_error on a malformed parameter set
};

// Exact ratio of nonnegative integers. Capacity fractions C/N are kept in
// this form so that comparisons against 1 in the saturation and criticality
// checks are exact, never float-rounded.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator<(const Ratio& a, const Ratio& b) {
        return a.num * b.den < b.num * a.den;
    }
    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num * b.den == b.num * a.den;
    }
    friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }

    friend Ratio operator+(const Ratio& a, const Ratio& b) {
        if (a.den == b.den) return {a.num + b.num, a.den};
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }

    bool less_than_one() const { return num < den; }
    bool greater_than_one() const { return num > den; }
};

// Capacity fractions of a finite-N parameter set, plus the polymerase count
// left over once every rRNA slot and promoter is filled.
struct ScaledParams {
    std::vector<Ratio> c_r;  // C_r[j] / N
    Ratio c_m;               // C_m / N
    Ratio c_r_total;         // sum of c_r
    std::int64_t A_N = 0;    // N - J - sum(C_r): polymerases free for mRNA + sequestration
    Ratio gamma;             // A_N / N

    static ScaledParams from(const ModelParams& p);
};

// Both inequalities of the saturation window, exactly:
//   max(c_m, sum c_r) < 1 < sum c_r + c_m.
bool check_saturation(const ModelParams& p, const ScaledParams& s);

enum class Phase { Exponential, Stationary, Mixed };

struct PhaseClass {
    Phase tag = Phase::Mixed;
    // Types with alpha_r/beta_r > 1 (0-based); populated only for Mixed.
    std::vector<int> supercritical_set;
};

// Exponential iff every alpha_r[j]/beta_r[j] > 1, Stationary iff every one
// is < 1, Mixed otherwise. A ratio of exactly 1 throws boundary_error.
PhaseClass classify_phase(const ModelParams& p);

// A derived constant that may be undefined for a given parameter set; the
// reason travels with the absence so downstream users fail loudly.
struct DerivedValue {
    bool defined = false;
    double value = 0;
    std::string reason; // why absent, empty when defined

    double get() const {
        if (!defined) throw model_error("derived constant undefined: " + reason);
        return value;
    }
};

struct DerivedConstants {
    DerivedValue rho_1;          // eta / lambda
    DerivedValue rho_6;          // beta_6 / delta_6        (needs delta_6 > 0)
    DerivedValue rho_m_aux_sub;  // beta_m/(alpha_m (c_m-1)) (needs c_m > 1)
    DerivedValue rho_m_exp;      // beta_m (1-c_r)/(alpha_m (c_m+c_r-1)) (needs c_m+c_r > 1)
    DerivedValue rho_m_super;    // beta_m / alpha_m
    DerivedValue f_infinity;     // rho_1 (1-c_m)/(rho_6+rho_1) (needs delta_6>0, c_m<1)
};

DerivedConstants derived_constants(const ModelParams& p, const ScaledParams& s);

// State of the full chain: free/sequestered polymerases, free 6S, and per
// rRNA type the promoter flag u[j] and elongation count r[j]. The number of
// polymerases in mRNA elongation is implicit (see psi).
struct FullState {
    std::int64_t f = 0;
    std::int64_t s = 0;
    std::int64_t z = 0;
    std::vector<std::uint8_t> u;
    std::vector<std::int64_t> r;

    std::int64_t promoter_sum() const {
        std::int64_t t = 0;
        for (auto v : u) t += v;
        return t;
    }
    std::int64_t elongation_sum() const {
        std::int64_t t = 0;
        for (auto v : r) t += v;
        return t;
    }

    bool operator==(const FullState&) const = default;
};

// Polymerases currently in mRNA elongation: N - f - s - sum(u_j + r_j).
// Throws invalid_state_error when the bookkeeping would go negative.
std::int64_t psi(const FullState& x, const ModelParams& p);

// Full membership check for the state space: component bounds, the
// "free polymerase implies all promoters occupied" constraint, and
// psi in [0, C_m].
void validate_state(const FullState& x, const ModelParams& p);

// State of the reduced model without rRNA dynamics.
struct AuxState {
    std::int64_t f = 0;
    std::int64_t s = 0;
    std::int64_t z = 0;

    bool operator==(const AuxState&) const = default;
};

// Empty mRNA slots: C_m - (N - f - s).
std::int64_t aux_empty_slots(const AuxState& x, const ModelParams& p);

void validate_aux_state(const AuxState& x, const ModelParams& p);

} // namespace sixsim
