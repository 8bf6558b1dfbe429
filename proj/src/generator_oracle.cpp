#include "sixsim/generator_oracle.hpp"

#include <cmath>
#include <deque>

#include "sixsim/transitions.hpp"

namespace sixsim {

std::uint64_t GeneratorOracle::pack(const FullState& x) {
    // desk-scale chains only: each count fits in 8 bits
    std::uint64_t key = 0;
    auto push = [&](std::int64_t v) {
        if (v < 0 || v > 255) throw model_error("generator oracle: state out of packing range");
        key = (key << 8) | static_cast<std::uint64_t>(v);
    };
    push(x.f);
    push(x.s);
    push(x.z);
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < x.u.size(); ++j) mask |= static_cast<std::uint64_t>(x.u[j]) << j;
    key = (key << 8) | mask;
    for (auto rj : x.r) push(rj);
    return key;
}

GeneratorOracle build_generator_oracle(const ModelParams& p, const FullState& initial,
                                       std::int64_t z_cap) {
    validate_state(initial, p);
    GeneratorOracle oracle;
    oracle.z_cap = z_cap;

    std::deque<std::size_t> frontier;
    auto visit = [&](const FullState& x) -> std::size_t {
        const auto key = GeneratorOracle::pack(x);
        auto it = oracle.index.find(key);
        if (it != oracle.index.end()) return it->second;
        const std::size_t id = oracle.states.size();
        oracle.index.emplace(key, id);
        oracle.states.push_back(x);
        frontier.push_back(id);
        return id;
    };
    visit(initial);

    struct Edge {
        std::size_t from, to;
        double rate;
    };
    std::vector<Edge> edges;

    while (!frontier.empty()) {
        const std::size_t from = frontier.front();
        frontier.pop_front();
        const FullState x = oracle.states[from];
        for (const Transition& t : enumerate_transitions_full(x, p)) {
            if (t.label == TransitionLabel::SixSCreate && x.z >= z_cap)
                continue; // truncation boundary
            FullState next = x;
            apply_transition(next, t);
            // the high-affinity refill is deterministic only when at most one
            // promoter is empty; larger chains are outside this oracle's scope
            if (next.f > 0) {
                int empties = 0, which = -1;
                for (int j = 0; j < p.J; ++j)
                    if (next.u[j] == 0) {
                        ++empties;
                        which = j;
                    }
                if (empties > 1)
                    throw model_error(
                        "generator oracle: ambiguous promoter refill (use J = 1 chains)");
                if (empties == 1) {
                    next.u[static_cast<std::size_t>(which)] = 1;
                    next.f -= 1;
                }
            }
            validate_state(next, p);
            edges.push_back({from, visit(next), t.rate});
        }
    }

    const std::size_t n = oracle.states.size();
    std::vector<std::vector<double>> Q(n, std::vector<double>(n, 0.0));
    for (const Edge& e : edges) {
        Q[e.from][e.to] += e.rate;
        Q[e.from][e.from] -= e.rate;
    }
    oracle.stationary = stationary_vector(std::move(Q));
    return oracle;
}

std::vector<double> stationary_vector(std::vector<std::vector<double>> Q) {
    const std::size_t n = Q.size();
    if (n == 0) throw model_error("stationary_vector: empty generator");

    // solve A pi = b with A = Q^T, last row replaced by the normalization
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i][j] = Q[j][i];
    for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1.0;
    A[n - 1][n] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        if (std::abs(A[pivot][col]) < 1e-14)
            throw model_error("stationary_vector: singular system (chain not irreducible?)");
        std::swap(A[col], A[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = A[r][col] / A[col][col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c <= n; ++c) A[r][c] -= factor * A[col][c];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
    return pi;
}

} // namespace sixsim
