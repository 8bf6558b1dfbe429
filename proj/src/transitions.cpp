#include "sixsim/transitions.hpp"

namespace sixsim {

const char* to_string(TransitionLabel label) {
    switch (label) {
        case TransitionLabel::RrnaInitFree: return "rrna-init-free";
        case TransitionLabel::RrnaInitEmptying: return "rrna-init-emptying";
        case TransitionLabel::RrnaCompleteToFree: return "rrna-complete-to-free";
        case TransitionLabel::RrnaCompleteToPromoter: return "rrna-complete-to-promoter";
        case TransitionLabel::MrnaBind: return "mrna-bind";
        case TransitionLabel::MrnaRelease: return "mrna-release";
        case TransitionLabel::SixSCreate: return "sixs-create";
        case TransitionLabel::SixSDegrade: return "sixs-degrade";
        case TransitionLabel::Sequester: return "sequester";
        case TransitionLabel::Desequester: return "desequester";
        case TransitionLabel::Birth: return "birth";
        case TransitionLabel::Death: return "death";
        case TransitionLabel::Arrival: return "arrival";
        case TransitionLabel::Service: return "service";
        case TransitionLabel::SwapToSequestered: return "swap-to-sequestered";
        case TransitionLabel::SwapToFree: return "swap-to-free";
    }
    return "unknown";
}

std::vector<Transition> enumerate_transitions_full(const FullState& x, const ModelParams& p) {
    validate_state(x, p);
    std::vector<Transition> out;
    out.reserve(static_cast<std::size_t>(4 * p.J + 6));

    const std::int64_t occupied = x.promoter_sum();
    const int empty_promoters = p.J - static_cast<int>(occupied);
    const std::int64_t m = psi(x, p);

    for (int j = 0; j < p.J; ++j) {
        const auto jj = static_cast<std::int8_t>(j);
        if (x.f > 0 && x.r[j] < p.C_r[j]) {
            Transition t{TransitionLabel::RrnaInitFree, jj, -1, p.alpha_r[j]};
            t.df = -1;
            t.dr = +1;
            out.push_back(t);
        }
        if (x.f == 0 && x.u[j] == 1 && x.r[j] < p.C_r[j]) {
            Transition t{TransitionLabel::RrnaInitEmptying, jj, jj, p.alpha_r[j]};
            t.du = -1;
            t.dr = +1;
            out.push_back(t);
        }
        if (x.r[j] > 0) {
            if (empty_promoters == 0) {
                Transition t{TransitionLabel::RrnaCompleteToFree, jj, -1, p.beta_r[j]};
                t.df = +1;
                t.dr = -1;
                out.push_back(t);
            } else {
                for (int i = 0; i < p.J; ++i) {
                    if (x.u[i] != 0) continue;
                    Transition t{TransitionLabel::RrnaCompleteToPromoter, jj,
                                 static_cast<std::int8_t>(i),
                                 p.beta_r[j] / empty_promoters};
                    t.du = +1;
                    t.dr = -1;
                    out.push_back(t);
                }
            }
        }
    }

    if (x.f > 0 && m < p.C_m) {
        Transition t{TransitionLabel::MrnaBind, -1, -1,
                     p.alpha_m * static_cast<double>(x.f) * static_cast<double>(p.C_m - m)};
        t.df = -1;
        out.push_back(t);
    }
    if (m > 0) {
        Transition t{TransitionLabel::MrnaRelease, -1, -1, p.beta_m * static_cast<double>(m)};
        t.df = +1;
        out.push_back(t);
    }
    {
        Transition t{TransitionLabel::SixSCreate, -1, -1, p.beta_6};
        t.dz = +1;
        out.push_back(t);
    }
    if (x.z > 0 && p.delta_6 > 0) {
        Transition t{TransitionLabel::SixSDegrade, -1, -1,
                     p.delta_6 * static_cast<double>(x.z)};
        t.dz = -1;
        out.push_back(t);
    }
    if (x.f > 0 && x.z > 0) {
        Transition t{TransitionLabel::Sequester, -1, -1,
                     p.lambda * static_cast<double>(x.f) * static_cast<double>(x.z)};
        t.df = -1;
        t.ds = +1;
        t.dz = -1;
        out.push_back(t);
    }
    if (x.s > 0) {
        Transition t{TransitionLabel::Desequester, -1, -1, p.eta * static_cast<double>(x.s)};
        t.df = +1;
        t.ds = -1;
        t.dz = +1;
        out.push_back(t);
    }
    return out;
}

std::vector<Transition> enumerate_transitions_aux(const AuxState& x, const ModelParams& p) {
    validate_aux_state(x, p);
    std::vector<Transition> out;
    out.reserve(6);

    const std::int64_t busy = p.N - x.f - x.s;
    const std::int64_t empty = p.C_m - busy;

    if (x.f > 0 && empty > 0) {
        Transition t{TransitionLabel::MrnaBind, -1, -1,
                     p.alpha_m * static_cast<double>(empty) * static_cast<double>(x.f)};
        t.df = -1;
        out.push_back(t);
    }
    if (busy > 0) {
        Transition t{TransitionLabel::MrnaRelease, -1, -1,
                     p.beta_m * static_cast<double>(busy)};
        t.df = +1;
        out.push_back(t);
    }
    {
        Transition t{TransitionLabel::SixSCreate, -1, -1, p.beta_6};
        t.dz = +1;
        out.push_back(t);
    }
    if (x.z > 0 && p.delta_6 > 0) {
        Transition t{TransitionLabel::SixSDegrade, -1, -1,
                     p.delta_6 * static_cast<double>(x.z)};
        t.dz = -1;
        out.push_back(t);
    }
    if (x.f > 0 && x.z > 0) {
        Transition t{TransitionLabel::Sequester, -1, -1,
                     p.lambda * static_cast<double>(x.f) * static_cast<double>(x.z)};
        t.df = -1;
        t.ds = +1;
        t.dz = -1;
        out.push_back(t);
    }
    if (x.s > 0) {
        Transition t{TransitionLabel::Desequester, -1, -1, p.eta * static_cast<double>(x.s)};
        t.df = +1;
        t.ds = -1;
        t.dz = +1;
        out.push_back(t);
    }
    return out;
}

void apply_transition(FullState& x, const Transition& t) {
    x.f += t.df;
    x.s += t.ds;
    x.z += t.dz;
    if (t.dr != 0) x.r[static_cast<std::size_t>(t.j)] += t.dr;
    if (t.du != 0)
        x.u[static_cast<std::size_t>(t.promoter)] =
            static_cast<std::uint8_t>(x.u[static_cast<std::size_t>(t.promoter)] + t.du);
}

void apply_transition(AuxState& x, const Transition& t) {
    x.f += t.df;
    x.s += t.ds;
    x.z += t.dz;
}

void normalize_promoters(FullState& x, Rng& rng) {
    const int J = static_cast<int>(x.u.size());
    while (x.f > 0) {
        int empties[16];
        int n = 0;
        for (int i = 0; i < J; ++i)
            if (x.u[i] == 0) empties[n++] = i;
        if (n == 0) return;
        const int pick = (n == 1) ? empties[0]
                                  : empties[rng.uniform_below(static_cast<std::uint64_t>(n))];
        x.u[pick] = 1;
        x.f -= 1;
    }
}

} // namespace sixsim
