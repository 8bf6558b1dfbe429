#include "sixsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sixsim {

namespace {

ModelKind model_kind_from(const std::string& s) {
    if (s == "full") return ModelKind::Full;
    if (s == "auxiliary") return ModelKind::Auxiliary;
    if (s == "limit-chain") return ModelKind::LimitChain;
    if (s == "birth-death") return ModelKind::BirthDeath;
    if (s == "mm1") return ModelKind::Mm1;
    throw model_error("scenario: unknown model '" + s + "'");
}

toml::Value json_to_value(const nlohmann::json& j) {
    using nlohmann::json;
    switch (j.type()) {
        case json::value_t::object: {
            toml::Table t;
            for (const auto& [k, v] : j.items()) t.emplace(k, json_to_value(v));
            return toml::Value(std::move(t));
        }
        case json::value_t::array: {
            toml::Array a;
            for (const auto& v : j) a.push_back(json_to_value(v));
            return toml::Value(std::move(a));
        }
        case json::value_t::string: return toml::Value(j.get<std::string>());
        case json::value_t::boolean: return toml::Value(j.get<bool>());
        case json::value_t::number_integer:
        case json::value_t::number_unsigned: return toml::Value(j.get<std::int64_t>());
        case json::value_t::number_float: return toml::Value(j.get<double>());
        default: throw model_error("scenario: unsupported JSON value type");
    }
}

std::int64_t round_fraction(double frac, std::int64_t N) {
    return static_cast<std::int64_t>(std::llround(frac * static_cast<double>(N)));
}

} // namespace

ModelParams ParamsSpec::resolve(std::int64_t N_value) const {
    ModelParams p;
    p.N = N_value;
    p.J = J;
    p.alpha_r = alpha_r;
    p.beta_r = beta_r;
    if (c_r_is_fraction) {
        if (static_cast<int>(c_r_frac.size()) != J)
            throw model_error("scenario: c_r must have length J");
        for (double c : c_r_frac) p.C_r.push_back(round_fraction(c, N_value));
    } else {
        p.C_r = C_r_abs;
    }
    p.C_m = c_m_is_fraction ? round_fraction(c_m_frac, N_value) : C_m_abs;
    p.alpha_m = alpha_m;
    p.beta_m = beta_m;
    p.beta_6 = beta_6;
    p.delta_6 = delta_6;
    p.lambda = lambda;
    p.eta = eta;
    p.validate();
    return p;
}

Scenario Scenario::load(const std::string& path) {
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        std::ifstream in(path);
        if (!in) throw model_error("scenario: cannot open '" + path + "'");
        nlohmann::json j;
        in >> j;
        return from_table(json_to_value(j).as_table());
    }
    return from_table(toml::parse_file(path));
}

Scenario Scenario::from_table(const toml::Table& t) {
    using namespace toml;
    Scenario sc;
    sc.name = get_string_or(t, "name", "unnamed");
    sc.model = model_kind_from(get_string(t, "model"));
    const std::string ts = get_string_or(t, "timescale", "raw");
    if (ts != "raw" && ts != "accelerated")
        throw model_error("scenario: timescale must be 'raw' or 'accelerated'");
    sc.accelerated = ts == "accelerated";
    sc.replicas = static_cast<int>(get_int_or(t, "replicas", 1));
    sc.base_seed = static_cast<std::uint64_t>(get_int_or(t, "base_seed", 1));
    sc.threads = static_cast<int>(get_int_or(t, "threads", 0));
    sc.event_budget =
        static_cast<std::uint64_t>(get_int_or(t, "event_budget",
                                              static_cast<std::int64_t>(kDefaultEventBudget)));

    if (sc.model == ModelKind::Full || sc.model == ModelKind::Auxiliary) {
        const Table* pt = get_table(t, "params");
        if (!pt) throw model_error("scenario: [params] block is required");
        ParamsSpec& ps = sc.params;
        ps.N = get_int(*pt, "N");
        ps.J = static_cast<int>(get_int_or(*pt, "J", 1));
        ps.alpha_r = find(*pt, "alpha_r") ? get_double_array(*pt, "alpha_r")
                                          : std::vector<double>(ps.J, 1.0);
        ps.beta_r = find(*pt, "beta_r") ? get_double_array(*pt, "beta_r")
                                        : std::vector<double>(ps.J, 2.0);
        if (find(*pt, "c_r")) {
            ps.c_r_is_fraction = true;
            ps.c_r_frac = get_double_array(*pt, "c_r");
        } else if (find(*pt, "C_r")) {
            ps.c_r_is_fraction = false;
            ps.C_r_abs = get_int_array(*pt, "C_r");
        } else {
            ps.c_r_is_fraction = false;
            ps.C_r_abs.assign(static_cast<std::size_t>(ps.J), 1);
        }
        if (find(*pt, "c_m")) {
            ps.c_m_is_fraction = true;
            ps.c_m_frac = get_double(*pt, "c_m");
        } else {
            ps.c_m_is_fraction = false;
            ps.C_m_abs = get_int(*pt, "C_m");
        }
        ps.alpha_m = get_double(*pt, "alpha_m");
        ps.beta_m = get_double(*pt, "beta_m");
        ps.beta_6 = get_double(*pt, "beta_6");
        ps.delta_6 = get_double(*pt, "delta_6");
        ps.lambda = get_double(*pt, "lambda");
        ps.eta = get_double(*pt, "eta");
    } else if (sc.model == ModelKind::LimitChain) {
        const Table* ct = get_table(t, "chain");
        if (!ct) throw model_error("scenario: [chain] block is required");
        sc.chain.rho_m = get_double(*ct, "rho_m");
        sc.chain.lambda = get_double(*ct, "lambda");
        sc.chain.eta = get_double(*ct, "eta");
        sc.chain.beta_6 = get_double(*ct, "beta_6");
        sc.chain.delta_6 = get_double(*ct, "delta_6");
    } else if (sc.model == ModelKind::BirthDeath) {
        const Table* bt = get_table(t, "bd");
        if (!bt) throw model_error("scenario: [bd] block is required");
        sc.bd.kappa_i = get_double(*bt, "kappa_i");
        sc.bd.kappa_o = get_double(*bt, "kappa_o");
        sc.bd.y0 = get_int_or(*bt, "y0", 0);
    } else {
        const Table* mt = get_table(t, "mm1");
        if (!mt) throw model_error("scenario: [mm1] block is required");
        sc.mm1.arrival = get_double(*mt, "arrival");
        sc.mm1.service = get_double(*mt, "service");
        sc.mm1.q0 = get_int_or(*mt, "q0", 0);
    }

    if (const toml::Table* it = get_table(t, "initial")) {
        sc.initial.recipe = get_string_or(*it, "recipe", "explicit");
        auto opt_double = [&](const char* key) -> std::optional<double> {
            if (!find(*it, key)) return std::nullopt;
            return get_double(*it, key);
        };
        auto opt_int = [&](const char* key) -> std::optional<std::int64_t> {
            if (!find(*it, key)) return std::nullopt;
            return get_int(*it, key);
        };
        sc.initial.f_fraction = opt_double("f_fraction");
        sc.initial.s_fraction = opt_double("s_fraction");
        sc.initial.z_fraction = opt_double("z_fraction");
        sc.initial.f_count = opt_int("f_count");
        sc.initial.s_count = opt_int("s_count");
        sc.initial.z_count = opt_int("z_count");
        sc.initial.g_count = opt_int("g_count");
    }

    if (const toml::Table* st = get_table(t, "stop")) {
        sc.stop.kind = get_string(*st, "kind");
        sc.stop.time = get_double_or(*st, "time", 0.0);
        sc.stop.level_fraction = get_double_or(*st, "level_fraction", 0.0);
    } else {
        throw model_error("scenario: [stop] block is required");
    }

    if (const toml::Table* ot = get_table(t, "output")) {
        sc.write_trajectories = get_bool_or(*ot, "trajectories", false);
        sc.write_events = get_bool_or(*ot, "events", false);
        if (const toml::Table* gt = get_table(*ot, "grid")) {
            sc.grid.present = true;
            sc.grid.start = get_double(*gt, "start");
            sc.grid.stop = get_double(*gt, "stop");
            sc.grid.points = static_cast<int>(get_int(*gt, "points"));
            if (find(*gt, "components"))
                for (const auto& v : find(*gt, "components")->as_array())
                    sc.grid.components.push_back(v.as_string());
        }
        if (const toml::Table* qt = get_table(*ot, "occupation")) {
            sc.occupation.present = true;
            const auto w = get_double_array(*qt, "window");
            if (w.size() != 2) throw model_error("scenario: occupation window must be [a, b]");
            sc.occupation.window_start = w[0];
            sc.occupation.window_end = w[1];
            if (find(*qt, "observables"))
                for (const auto& v : find(*qt, "observables")->as_array())
                    sc.occupation.observables.push_back(v.as_string());
        }
    }

    sc.validate();
    return sc;
}

toml::Table Scenario::normalized() const {
    using toml::Array;
    using toml::Table;
    using toml::Value;
    Table t;
    t.emplace("name", name);
    t.emplace("model", std::string(to_string(model)));
    t.emplace("timescale", std::string(accelerated ? "accelerated" : "raw"));
    t.emplace("replicas", static_cast<std::int64_t>(replicas));
    t.emplace("base_seed", static_cast<std::int64_t>(base_seed));
    t.emplace("threads", static_cast<std::int64_t>(threads));
    t.emplace("event_budget", static_cast<std::int64_t>(event_budget));

    if (model == ModelKind::Full || model == ModelKind::Auxiliary) {
        Table pt;
        pt.emplace("N", params.N);
        pt.emplace("J", static_cast<std::int64_t>(params.J));
        Array ar, br;
        for (double v : params.alpha_r) ar.push_back(Value(v));
        for (double v : params.beta_r) br.push_back(Value(v));
        pt.emplace("alpha_r", std::move(ar));
        pt.emplace("beta_r", std::move(br));
        if (params.c_r_is_fraction) {
            Array cr;
            for (double v : params.c_r_frac) cr.push_back(Value(v));
            pt.emplace("c_r", std::move(cr));
        } else {
            Array cr;
            for (auto v : params.C_r_abs) cr.push_back(Value(v));
            pt.emplace("C_r", std::move(cr));
        }
        if (params.c_m_is_fraction)
            pt.emplace("c_m", params.c_m_frac);
        else
            pt.emplace("C_m", params.C_m_abs);
        pt.emplace("alpha_m", params.alpha_m);
        pt.emplace("beta_m", params.beta_m);
        pt.emplace("beta_6", params.beta_6);
        pt.emplace("delta_6", params.delta_6);
        pt.emplace("lambda", params.lambda);
        pt.emplace("eta", params.eta);
        t.emplace("params", std::move(pt));
    } else if (model == ModelKind::LimitChain) {
        Table ct;
        ct.emplace("rho_m", chain.rho_m);
        ct.emplace("lambda", chain.lambda);
        ct.emplace("eta", chain.eta);
        ct.emplace("beta_6", chain.beta_6);
        ct.emplace("delta_6", chain.delta_6);
        t.emplace("chain", std::move(ct));
    } else if (model == ModelKind::BirthDeath) {
        Table bt;
        bt.emplace("kappa_i", bd.kappa_i);
        bt.emplace("kappa_o", bd.kappa_o);
        bt.emplace("y0", bd.y0);
        t.emplace("bd", std::move(bt));
    } else {
        Table mt;
        mt.emplace("arrival", mm1.arrival);
        mt.emplace("service", mm1.service);
        mt.emplace("q0", mm1.q0);
        t.emplace("mm1", std::move(mt));
    }

    Table it;
    it.emplace("recipe", initial.recipe);
    auto put_opt_d = [&](const char* k, const std::optional<double>& v) {
        if (v) it.emplace(k, *v);
    };
    auto put_opt_i = [&](const char* k, const std::optional<std::int64_t>& v) {
        if (v) it.emplace(k, *v);
    };
    put_opt_d("f_fraction", initial.f_fraction);
    put_opt_d("s_fraction", initial.s_fraction);
    put_opt_d("z_fraction", initial.z_fraction);
    put_opt_i("f_count", initial.f_count);
    put_opt_i("s_count", initial.s_count);
    put_opt_i("z_count", initial.z_count);
    put_opt_i("g_count", initial.g_count);
    t.emplace("initial", std::move(it));

    Table st;
    st.emplace("kind", stop.kind);
    st.emplace("time", stop.time);
    st.emplace("level_fraction", stop.level_fraction);
    t.emplace("stop", std::move(st));

    Table ot;
    ot.emplace("trajectories", write_trajectories);
    ot.emplace("events", write_events);
    if (grid.present) {
        Table gt;
        gt.emplace("start", grid.start);
        gt.emplace("stop", grid.stop);
        gt.emplace("points", static_cast<std::int64_t>(grid.points));
        Array comps;
        for (const auto& c : grid.components) comps.push_back(Value(c));
        gt.emplace("components", std::move(comps));
        ot.emplace("grid", std::move(gt));
    }
    if (occupation.present) {
        Table qt;
        qt.emplace("window", Array{Value(occupation.window_start), Value(occupation.window_end)});
        Array obs;
        for (const auto& o : occupation.observables) obs.push_back(Value(o));
        qt.emplace("observables", std::move(obs));
        ot.emplace("occupation", std::move(qt));
    }
    t.emplace("output", std::move(ot));
    return t;
}

void Scenario::validate() const {
    if (replicas < 1) throw model_error("scenario: replicas must be >= 1");
    if (stop.kind != "time-horizon" && stop.kind != "free-below" &&
        stop.kind != "free-hits-zero" && stop.kind != "all-rrna-full" &&
        stop.kind != "all-rrna-empty")
        throw model_error("scenario: unknown stop kind '" + stop.kind + "'");
    if (stop.kind == "time-horizon" && !(stop.time >= 0))
        throw model_error("scenario: stop time must be nonnegative");
    if (accelerated && model != ModelKind::Full && model != ModelKind::Auxiliary)
        throw model_error("scenario: accelerated timescale needs an N-indexed model");
    if (grid.present && grid.points < 1)
        throw model_error("scenario: grid needs at least one point");
    if (occupation.present && !(occupation.window_end > occupation.window_start))
        throw model_error("scenario: occupation window must be nonempty");
    if (initial.recipe != "all-free" && initial.recipe != "saturated-rrna" &&
        initial.recipe != "explicit")
        throw model_error("scenario: unknown initial recipe '" + initial.recipe + "'");
    if (model == ModelKind::Full || model == ModelKind::Auxiliary) {
        // the recipe must resolve to a valid state for the template N
        const ModelParams p = params.resolve(params.N);
        if (model == ModelKind::Full)
            validate_state(initial_full(p), p);
        else
            validate_aux_state(initial_aux(p), p);
    }
}

double Scenario::time_scale(std::int64_t N_value) const {
    return accelerated ? static_cast<double>(N_value) : 1.0;
}

StopRule Scenario::resolve_stop(std::int64_t N_value) const {
    if (stop.kind == "time-horizon")
        return StopRule::time_horizon(stop.time * time_scale(N_value));
    if (stop.kind == "free-below")
        return StopRule::free_below(static_cast<std::int64_t>(
            std::floor(stop.level_fraction * static_cast<double>(N_value))));
    if (stop.kind == "free-hits-zero") return StopRule::free_hits_zero();
    if (stop.kind == "all-rrna-full") return StopRule::all_rrna_full();
    return StopRule::all_rrna_empty();
}

namespace {

std::int64_t resolve_component(const std::optional<double>& frac,
                               const std::optional<std::int64_t>& count, std::int64_t N,
                               const char* what) {
    if (frac && count)
        throw model_error(std::string("initial: give either a fraction or a count for ") + what);
    if (frac) return round_fraction(*frac, N);
    if (count) return *count;
    return 0;
}

} // namespace

FullState Scenario::initial_full(const ModelParams& p) const {
    FullState x;
    x.u.assign(static_cast<std::size_t>(p.J), 1);
    x.r.assign(static_cast<std::size_t>(p.J), 0);
    if (initial.recipe == "all-free") {
        // every promoter grabs a polymerase right away
        x.f = p.N - p.J;
        return x;
    }
    if (initial.recipe == "saturated-rrna") {
        for (int j = 0; j < p.J; ++j) x.r[static_cast<std::size_t>(j)] = p.C_r[j];
    }
    x.f = resolve_component(initial.f_fraction, initial.f_count, p.N, "f");
    x.s = resolve_component(initial.s_fraction, initial.s_count, p.N, "s");
    x.z = resolve_component(initial.z_fraction, initial.z_count, p.N, "z");
    // remainder goes into mRNA elongation; overflow beyond C_m is parked as
    // sequestered so the recipe stays valid at every N of a sweep
    const std::int64_t m = p.N - x.f - x.s - x.promoter_sum() - x.elongation_sum();
    if (m > p.C_m) x.s += m - p.C_m;
    return x;
}

AuxState Scenario::initial_aux(const ModelParams& p) const {
    AuxState x;
    x.f = resolve_component(initial.f_fraction, initial.f_count, p.N, "f");
    x.z = resolve_component(initial.z_fraction, initial.z_count, p.N, "z");
    if (initial.g_count) {
        if (initial.s_fraction || initial.s_count)
            throw model_error("initial: give either s or g, not both");
        const std::int64_t busy = p.C_m - *initial.g_count;
        x.s = p.N - x.f - busy;
        if (x.s < 0)
            throw model_error("initial: g_count leaves a negative sequestered count");
    } else {
        x.s = resolve_component(initial.s_fraction, initial.s_count, p.N, "s");
    }
    return x;
}

LimitChainState Scenario::initial_chain() const {
    LimitChainState x;
    x.s = initial.s_count.value_or(0);
    x.z = initial.z_count.value_or(0);
    return x;
}

std::vector<double> Scenario::grid_times() const {
    if (!grid.present) return {};
    return linspace(grid.start, grid.stop, grid.points);
}

std::vector<double> linspace(double start, double stop, int points) {
    if (points < 1) throw model_error("linspace: need at least one point");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        out.push_back(start);
        return out;
    }
    const double h = (stop - start) / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) out.push_back(start + h * static_cast<double>(i));
    out.back() = stop;
    return out;
}

} // namespace sixsim
