#include <doctest.h>

#include "sixsim/model.hpp"
#include "sixsim/rng.hpp"

using namespace sixsim;

namespace {

ModelParams base_params() {
    ModelParams p;
    p.N = 10;
    p.J = 2;
    p.alpha_r = {2.0, 3.0};
    p.beta_r = {1.0, 1.0};
    p.C_r = {3, 3};
    p.alpha_m = 1.0;
    p.beta_m = 1.0;
    p.C_m = 6;
    p.beta_6 = 1.0;
    p.delta_6 = 1.0;
    p.lambda = 1.0;
    p.eta = 1.0;
    return p;
}

} // namespace

TEST_CASE("phase classification follows the strict rate comparisons") {
    ModelParams p = base_params();
    CHECK(classify_phase(p).tag == Phase::Exponential);

    p.alpha_r = {0.5, 0.9};
    CHECK(classify_phase(p).tag == Phase::Stationary);

    p.alpha_r = {2.0, 0.5};
    const PhaseClass mixed = classify_phase(p);
    CHECK(mixed.tag == Phase::Mixed);
    CHECK(mixed.supercritical_set == std::vector<int>{0});

    p.alpha_r = {1.0, 2.0}; // ratio exactly 1 is a boundary case, not a phase
    CHECK_THROWS_AS(classify_phase(p), boundary_error);
}

TEST_CASE("saturation window checks both inequalities exactly") {
    ModelParams p = base_params();
    p.C_r = {3, 3};
    p.C_m = 6; // c_r = (0.3, 0.3), c_m = 0.6
    CHECK(check_saturation(p, ScaledParams::from(p)));

    p.C_r = {5, 6};
    p.C_m = 2; // sum c_r = 1.1 >= 1
    CHECK_FALSE(check_saturation(p, ScaledParams::from(p)));

    p.C_r = {2, 2};
    p.C_m = 3; // sum + c_m = 0.7 < 1
    CHECK_FALSE(check_saturation(p, ScaledParams::from(p)));

    p.C_r = {4, 4};
    p.C_m = 10; // c_m = N exactly: left inequality is strict
    CHECK_FALSE(check_saturation(p, ScaledParams::from(p)));
}

TEST_CASE("mRNA elongation count from the conservation identity") {
    ModelParams p = base_params();
    FullState x;
    x.f = 2;
    x.s = 1;
    x.z = 0;
    x.u = {1, 1};
    x.r = {2, 1};
    CHECK(psi(x, p) == 2); // N - f - s - sum(u_j + r_j) = 10 - 2 - 1 - 2 - 3
    x.u = {1, 0};
    CHECK(psi(x, p) == 3);

    ModelParams p5 = base_params();
    p5.N = 5;
    p5.C_r = {2, 2};
    p5.C_m = 5;
    FullState y;
    y.s = 5;
    y.u = {0, 0};
    y.r = {0, 0};
    CHECK(psi(y, p5) == 0);

    ModelParams p4 = base_params();
    p4.N = 4;
    p4.C_r = {1, 1};
    p4.C_m = 2;
    FullState bad;
    bad.f = 4;
    bad.s = 1;
    bad.u = {0, 0};
    bad.r = {0, 0};
    CHECK_THROWS_AS(psi(bad, p4), invalid_state_error);
}

TEST_CASE("derived constants with absence reasons") {
    ModelParams p = base_params();
    p.C_m = 5; // c_m = 0.5
    const DerivedConstants d = derived_constants(p, ScaledParams::from(p));
    CHECK(d.rho_1.get() == doctest::Approx(1.0));
    CHECK(d.rho_6.get() == doctest::Approx(1.0));
    CHECK(d.f_infinity.get() == doctest::Approx(0.25));
    CHECK_FALSE(d.rho_m_aux_sub.defined); // needs c_m > 1
    CHECK_THROWS_AS(d.rho_m_aux_sub.get(), model_error);

    ModelParams sub = base_params();
    sub.C_m = 20; // c_m = 2
    const DerivedConstants ds = derived_constants(sub, ScaledParams::from(sub));
    CHECK(ds.rho_m_aux_sub.get() == doctest::Approx(1.0));
    CHECK_FALSE(ds.f_infinity.defined);

    ModelParams expo = base_params();
    expo.C_m = 6;
    expo.C_r = {3, 3}; // c_m = 0.6, c_r_total = 0.6 -> rho_m_exp = 0.4 / 0.2 = 2
    const DerivedConstants de = derived_constants(expo, ScaledParams::from(expo));
    CHECK(de.rho_m_exp.get() == doctest::Approx(2.0));

    ModelParams nodeg = base_params();
    nodeg.delta_6 = 0;
    const DerivedConstants dn = derived_constants(nodeg, ScaledParams::from(nodeg));
    CHECK_FALSE(dn.rho_6.defined);
    CHECK(dn.rho_6.reason == "delta_6 = 0");
}

TEST_CASE("classification is total and deterministic on random valid params") {
    Rng rng(7001);
    for (int trial = 0; trial < 500; ++trial) {
        ModelParams p = base_params();
        for (int j = 0; j < p.J; ++j) {
            p.alpha_r[j] = 0.1 + rng.uniform01() * 3.0;
            p.beta_r[j] = 0.1 + rng.uniform01() * 3.0;
            if (p.alpha_r[j] == p.beta_r[j]) p.alpha_r[j] += 0.25;
        }
        const PhaseClass a = classify_phase(p);
        const PhaseClass b = classify_phase(p);
        CHECK(a.tag == b.tag);
        CHECK(a.supercritical_set == b.supercritical_set);
    }
}

TEST_CASE("saturation monotonicity under capacity increases") {
    Rng rng(7002);
    for (int trial = 0; trial < 500; ++trial) {
        ModelParams p = base_params();
        p.N = 20;
        p.C_r = {1 + static_cast<std::int64_t>(rng.uniform_below(10)),
                 1 + static_cast<std::int64_t>(rng.uniform_below(10))};
        p.C_m = 1 + static_cast<std::int64_t>(rng.uniform_below(30));
        const ScaledParams s0 = ScaledParams::from(p);
        const bool right_before = (s0.c_r_total + s0.c_m).greater_than_one();
        const bool left_before = s0.c_m.less_than_one() && s0.c_r_total.less_than_one();

        ModelParams q = p;
        const int which = static_cast<int>(rng.uniform_below(3));
        if (which == 2)
            q.C_m += 1;
        else if (q.C_r[static_cast<std::size_t>(which)] < q.N)
            q.C_r[static_cast<std::size_t>(which)] += 1;
        const ScaledParams s1 = ScaledParams::from(q);
        const bool right_after = (s1.c_r_total + s1.c_m).greater_than_one();
        const bool left_after = s1.c_m.less_than_one() && s1.c_r_total.less_than_one();

        if (right_before) CHECK(right_after);       // right flips only false -> true
        if (!left_before) CHECK_FALSE(left_after);  // left flips only true -> false
    }
}

TEST_CASE("mass conservation identity on random valid states") {
    ModelParams p = base_params();
    Rng rng(7003);
    for (int trial = 0; trial < 1000; ++trial) {
        FullState x;
        x.u = {static_cast<std::uint8_t>(rng.uniform_below(2)),
               static_cast<std::uint8_t>(rng.uniform_below(2))};
        x.r = {static_cast<std::int64_t>(rng.uniform_below(
                   static_cast<std::uint64_t>(p.C_r[0] + 1))),
               static_cast<std::int64_t>(rng.uniform_below(
                   static_cast<std::uint64_t>(p.C_r[1] + 1)))};
        const std::int64_t budget = p.N - x.promoter_sum() - x.elongation_sum();
        if (budget < 0) continue;
        const bool all_u = x.u[0] == 1 && x.u[1] == 1;
        const std::int64_t m = static_cast<std::int64_t>(
            rng.uniform_below(static_cast<std::uint64_t>(std::min(budget, p.C_m) + 1)));
        const std::int64_t rest = budget - m;
        x.f = all_u ? static_cast<std::int64_t>(
                          rng.uniform_below(static_cast<std::uint64_t>(rest + 1)))
                    : 0;
        x.s = rest - x.f;
        x.z = static_cast<std::int64_t>(rng.uniform_below(8));
        validate_state(x, p);
        CHECK(psi(x, p) + x.f + x.s + x.promoter_sum() + x.elongation_sum() == p.N);
        CHECK(psi(x, p) == m);
    }
}

TEST_CASE("scaled params keep capacity fractions exact") {
    ModelParams p = base_params();
    p.N = 3;
    p.C_r = {1, 1};
    p.C_m = 1; // c_m = 1/3, sum c_r = 2/3: the boundary must not float-drift
    const ScaledParams s = ScaledParams::from(p);
    CHECK((s.c_r_total + s.c_m) == Ratio{3, 3});
    CHECK_FALSE((s.c_r_total + s.c_m).greater_than_one());
    CHECK(s.A_N == 3 - 2 - 2);
    CHECK_FALSE(check_saturation(p, s)); // sum + c_m = 1 exactly
}

TEST_CASE("parameter validation rejects malformed sets") {
    ModelParams p = base_params();
    p.alpha_r[0] = 0;
    CHECK_THROWS_AS(p.validate(), model_error);

    ModelParams q = base_params();
    q.C_r[0] = q.N + 1;
    CHECK_THROWS_AS(q.validate(), model_error);

    ModelParams r = base_params();
    r.delta_6 = -1;
    CHECK_THROWS_AS(r.validate(), model_error);

    ModelParams ok = base_params();
    ok.delta_6 = 0; // degradation may vanish
    CHECK_NOTHROW(ok.validate());
}
