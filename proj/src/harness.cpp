#include "sixsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sixsim/observers.hpp"
#include "sixsim/svg.hpp"

namespace sixsim {

namespace {

using Json = nlohmann::ordered_json;

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::Horizon: return "horizon";
        case StopReason::Predicate: return "predicate";
        case StopReason::Budget: return "budget";
    }
    return "unknown";
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

template <class State>
std::function<std::int64_t(const State&)> make_extractor(const std::string& name,
                                                         const ModelParams& p);

template <>
std::function<std::int64_t(const FullState&)> make_extractor(const std::string& name,
                                                             const ModelParams& p) {
    const std::int64_t N = p.N, C_m = p.C_m;
    const std::vector<std::int64_t> C_r = p.C_r;
    if (name == "f") return [](const FullState& x) { return x.f; };
    if (name == "s") return [](const FullState& x) { return x.s; };
    if (name == "z") return [](const FullState& x) { return x.z; };
    if (name == "m")
        return [N](const FullState& x) {
            return N - x.f - x.s - x.promoter_sum() - x.elongation_sum();
        };
    if (name == "g")
        return [N, C_m](const FullState& x) {
            return C_m - (N - x.f - x.s - x.promoter_sum() - x.elongation_sum());
        };
    if (name == "r_total") return [](const FullState& x) { return x.elongation_sum(); };
    if (name == "deficit_max")
        return [C_r](const FullState& x) {
            std::int64_t d = 0;
            for (std::size_t j = 0; j < C_r.size(); ++j)
                d = std::max(d, C_r[j] - x.r[j]);
            return d;
        };
    if (name.rfind("r_", 0) == 0) {
        const int j = std::stoi(name.substr(2)) - 1;
        return [j](const FullState& x) { return x.r[static_cast<std::size_t>(j)]; };
    }
    if (name.rfind("u_", 0) == 0) {
        const int j = std::stoi(name.substr(2)) - 1;
        return [j](const FullState& x) {
            return static_cast<std::int64_t>(x.u[static_cast<std::size_t>(j)]);
        };
    }
    throw model_error("unknown full-model observable '" + name + "'");
}

template <>
std::function<std::int64_t(const AuxState&)> make_extractor(const std::string& name,
                                                            const ModelParams& p) {
    const std::int64_t N = p.N, C_m = p.C_m;
    if (name == "f") return [](const AuxState& x) { return x.f; };
    if (name == "s") return [](const AuxState& x) { return x.s; };
    if (name == "z") return [](const AuxState& x) { return x.z; };
    if (name == "m") return [N](const AuxState& x) { return N - x.f - x.s; };
    if (name == "g") return [N, C_m](const AuxState& x) { return C_m - (N - x.f - x.s); };
    throw model_error("unknown auxiliary-model observable '" + name + "'");
}

template <class State>
std::function<std::pair<std::int64_t, std::int64_t>(const State&)> make_pair_extractor(
    const std::string& name, const ModelParams& p) {
    using Pair = std::pair<std::int64_t, std::int64_t>;
    if (name == "sz")
        return [](const State& x) { return Pair{x.s, x.z}; };
    if (name == "gz") {
        auto g = make_extractor<State>("g", p);
        return [g](const State& x) { return Pair{g(x), x.z}; };
    }
    throw model_error("unknown joint observable '" + name + "'");
}

// the canonical trajectory columns of each model kind
std::vector<std::string> canonical_components(ModelKind kind, int J) {
    switch (kind) {
        case ModelKind::Full: {
            std::vector<std::string> out{"f", "s", "z"};
            for (int j = 1; j <= J; ++j) out.push_back("u_" + std::to_string(j));
            for (int j = 1; j <= J; ++j) out.push_back("r_" + std::to_string(j));
            out.push_back("m");
            return out;
        }
        case ModelKind::Auxiliary: return {"f", "s", "z", "m"};
        case ModelKind::LimitChain: return {"s", "z"};
        case ModelKind::BirthDeath: return {"y"};
        case ModelKind::Mm1: return {"q"};
    }
    return {};
}

std::vector<std::string> default_components(ModelKind kind) {
    switch (kind) {
        case ModelKind::Full: return {"f", "s", "z", "m"};
        case ModelKind::Auxiliary: return {"f", "s", "z", "m"};
        case ModelKind::LimitChain: return {"s", "z"};
        case ModelKind::BirthDeath: return {"y"};
        case ModelKind::Mm1: return {"q"};
    }
    return {};
}

struct RepOut {
    ReplicaSummary summary;
    std::vector<std::vector<std::int64_t>> grid_rows; // [component][grid index]
    std::vector<Occupation1D> occ1;
    std::vector<Occupation2D> occ2;
    std::string events_ndjson;
};

// Composite observer: grid sampling plus any occupation accumulators.
template <class State>
struct ScenarioObserver {
    MultiGridSampler<State> grid;
    std::vector<OccupationObserver<State, std::function<std::int64_t(const State&)>>> occ1;
    std::vector<OccupationObserver2D<
        State, std::function<std::pair<std::int64_t, std::int64_t>(const State&)>>>
        occ2;

    void segment(double t0, double t1, const State& s) {
        grid.segment(t0, t1, s);
        for (auto& o : occ1) o.segment(t0, t1, s);
        for (auto& o : occ2) o.segment(t0, t1, s);
    }
    void event(double, TransitionLabel, const State&) {}
    void end(double t, const State& s) { grid.end(t, s); }
};

template <class Chain>
RepOut run_replica_generic(const Scenario& sc, const std::vector<std::string>& comps,
                           const Chain& chain, typename Chain::State initial,
                           const ModelParams* params, std::int64_t N, int replica,
                           std::uint64_t seed) {
    using State = typename Chain::State;
    const double scale = sc.time_scale(N);

    ScenarioObserver<State> obs;
    if (sc.grid.present) {
        std::vector<double> raw_grid;
        for (double t : sc.grid_times()) raw_grid.push_back(t * scale);
        std::vector<std::function<std::int64_t(const State&)>> extractors;
        for (const auto& c : comps) {
            if constexpr (std::is_same_v<State, FullState> || std::is_same_v<State, AuxState>) {
                extractors.push_back(make_extractor<State>(c, *params));
            } else if constexpr (std::is_same_v<State, LimitChainState>) {
                if (c == "s")
                    extractors.push_back([](const State& x) { return x.s; });
                else if (c == "z")
                    extractors.push_back([](const State& x) { return x.z; });
                else
                    throw model_error("unknown limit-chain observable '" + c + "'");
            } else {
                extractors.push_back([](const State& x) { return static_cast<std::int64_t>(x); });
            }
        }
        obs.grid = MultiGridSampler<State>(std::move(raw_grid), std::move(extractors));
    }
    if (sc.occupation.present) {
        const double w0 = sc.occupation.window_start * scale;
        const double w1 = sc.occupation.window_end * scale;
        for (const auto& name : sc.occupation.observables) {
            const bool joint = name == "sz" || name == "gz";
            if constexpr (std::is_same_v<State, FullState> || std::is_same_v<State, AuxState>) {
                if (joint)
                    obs.occ2.emplace_back(w0, w1, make_pair_extractor<State>(name, *params));
                else
                    obs.occ1.emplace_back(w0, w1, make_extractor<State>(name, *params));
            } else if constexpr (std::is_same_v<State, LimitChainState>) {
                if (joint && name == "sz") {
                    obs.occ2.emplace_back(w0, w1, [](const State& x) {
                        return std::pair<std::int64_t, std::int64_t>{x.s, x.z};
                    });
                } else if (name == "s") {
                    obs.occ1.emplace_back(w0, w1, [](const State& x) { return x.s; });
                } else if (name == "z") {
                    obs.occ1.emplace_back(w0, w1, [](const State& x) { return x.z; });
                } else {
                    throw model_error("unknown limit-chain observable '" + name + "'");
                }
            } else {
                obs.occ1.emplace_back(w0, w1, [](const State& x) {
                    return static_cast<std::int64_t>(x);
                });
            }
        }
    }

    Rng rng(seed);
    State state = initial;
    const StopRule stop = sc.resolve_stop(N);
    const RunResult res = run_chain(chain, state, stop, rng, obs, sc.event_budget);
    if (res.reason == StopReason::Budget)
        throw model_error("replica " + std::to_string(replica) +
                          ": event budget exceeded at t = " + std::to_string(res.t_end));

    RepOut out;
    out.summary = {replica, seed, res.t_end / scale, res.reason, res.n_events};
    if (sc.grid.present) out.grid_rows = obs.grid.take_values();
    for (auto& o : obs.occ1) out.occ1.push_back(o.measure());
    for (auto& o : obs.occ2) out.occ2.push_back(o.measure());
    return out;
}

RepOut run_one_replica(const Scenario& sc, const std::vector<std::string>& comps,
                       std::int64_t N, int replica, std::uint64_t seed) {
    switch (sc.model) {
        case ModelKind::Full: {
            const ModelParams p = sc.params.resolve(N);
            return run_replica_generic(sc, comps, FullChain(p), sc.initial_full(p), &p, N,
                                       replica, seed);
        }
        case ModelKind::Auxiliary: {
            const ModelParams p = sc.params.resolve(N);
            return run_replica_generic(sc, comps, AuxChain(p), sc.initial_aux(p), &p, N,
                                       replica, seed);
        }
        case ModelKind::LimitChain:
            return run_replica_generic(sc, comps, LimitChain(sc.chain), sc.initial_chain(),
                                       nullptr, N, replica, seed);
        case ModelKind::BirthDeath:
            return run_replica_generic(sc, comps, BirthDeathChain(sc.bd), sc.bd.y0, nullptr, N,
                                       replica, seed);
        case ModelKind::Mm1:
            return run_replica_generic(sc, comps, Mm1Chain(sc.mm1), sc.mm1.q0, nullptr, N,
                                       replica, seed);
    }
    throw model_error("run_one_replica: unreachable");
}

std::string render_events_ndjson(const Scenario& sc, std::int64_t N, std::uint64_t seed) {
    std::ostringstream os;
    const StopRule stop = sc.resolve_stop(N);
    Trajectory traj;
    switch (sc.model) {
        case ModelKind::Full: {
            const ModelParams p = sc.params.resolve(N);
            traj = simulate_full(sc.initial_full(p), p, stop, seed, sc.event_budget);
            break;
        }
        case ModelKind::Auxiliary: {
            const ModelParams p = sc.params.resolve(N);
            traj = simulate_aux(sc.initial_aux(p), p, stop, seed, sc.event_budget);
            break;
        }
        case ModelKind::LimitChain:
            traj = simulate_limit_chain(sc.chain, sc.initial_chain(), stop, seed,
                                        sc.event_budget);
            break;
        case ModelKind::BirthDeath:
            traj = simulate_bd(sc.bd, stop, seed, sc.event_budget);
            break;
        case ModelKind::Mm1:
            traj = simulate_mm1(sc.mm1, stop, seed, sc.event_budget);
            break;
    }
    write_event_log_ndjson(os, traj);
    return os.str();
}

} // namespace

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw model_error("cannot create directory '" + path + "': " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw model_error("cannot write '" + path + "'");
    out << content;
}

ScenarioRunResult run_scenario(const Scenario& sc, const std::string& out_dir,
                               std::int64_t N_override) {
    sc.validate();
    const std::int64_t N =
        (sc.model == ModelKind::Full || sc.model == ModelKind::Auxiliary)
            ? (N_override > 0 ? N_override : sc.params.N)
            : 1;

    const int J = sc.params.J;
    std::vector<std::string> comps = sc.grid.components.empty()
                                         ? default_components(sc.model)
                                         : sc.grid.components;
    if (sc.write_trajectories && sc.grid.present) {
        // trajectory files carry the canonical columns; sample whatever the
        // scenario asked for on top of them
        std::vector<std::string> merged = canonical_components(sc.model, J);
        for (const auto& c : comps)
            if (std::find(merged.begin(), merged.end(), c) == merged.end())
                merged.push_back(c);
        comps = std::move(merged);
    }

    std::vector<RepOut> reps;
    try {
        reps = run_replicas(sc.replicas, sc.base_seed, sc.threads,
                            [&](int k, std::uint64_t seed) {
                                return run_one_replica(sc, comps, N, k, seed);
                            });
    } catch (const std::exception& e) {
        throw model_error("scenario '" + sc.name + "': replica failed: " + e.what());
    }

    ScenarioRunResult result;
    result.N = N;
    result.grid = sc.grid_times();
    for (std::size_t c = 0; sc.grid.present && c < comps.size(); ++c)
        result.grid_samples.emplace(comps[c], std::vector<std::vector<std::int64_t>>());
    std::vector<std::string> names1, names2;
    for (const auto& name : sc.occupation.observables)
        (name == "sz" || name == "gz" ? names2 : names1).push_back(name);
    for (const auto& rep : reps) {
        result.replicas.push_back(rep.summary);
        for (std::size_t c = 0; c < rep.grid_rows.size(); ++c)
            result.grid_samples[comps[c]].push_back(rep.grid_rows[c]);
        for (std::size_t i = 0; i < rep.occ1.size(); ++i) {
            auto [it, inserted] = result.occupations.try_emplace(names1[i], rep.occ1[i]);
            if (!inserted) it->second.merge(rep.occ1[i]);
        }
        for (std::size_t i = 0; i < rep.occ2.size(); ++i) {
            auto [it, inserted] = result.occupations2d.try_emplace(names2[i], rep.occ2[i]);
            if (!inserted) it->second.merge(rep.occ2[i]);
        }
    }

    // Fluid overlay for accelerated auxiliary scenarios with c_m < 1.
    if (sc.model == ModelKind::Auxiliary && sc.accelerated && sc.grid.present &&
        result.grid_samples.count("f")) {
        const ModelParams p = sc.params.resolve(N);
        const ScaledParams scl = ScaledParams::from(p);
        if (p.delta_6 > 0 && scl.c_m.less_than_one()) {
            const double f0 =
                static_cast<double>(sc.initial_aux(p).f) / static_cast<double>(N);
            if (f0 > 0 && f0 < 1.0 - scl.c_m.value()) {
                const double t_end = sc.grid.stop;
                result.fluid = integrate_supercritical(f0, SuperFluidParams::from(p, scl), t_end,
                                                       t_end / 5000.0);
                result.has_fluid = true;
                for (const auto& row : result.grid_samples["f"]) {
                    double sup = 0;
                    for (std::size_t i = 0; i < row.size(); ++i) {
                        const double fbar = result.fluid.eval(0, result.grid[i]);
                        sup = std::max(sup, std::abs(static_cast<double>(row[i]) /
                                                         static_cast<double>(N) -
                                                     fbar));
                    }
                    result.sup_f_error.push_back(sup);
                }
            }
        }
    }

    if (!out_dir.empty()) {
        ensure_directory(out_dir);
        write_text_file(out_dir + "/scenario_normalized.toml", toml::serialize(sc.normalized()));

        std::ostringstream csv;
        csv << "N,replica,seed,stop_time,stop_reason,events";
        const bool have_sup = !result.sup_f_error.empty();
        if (have_sup) csv << ",sup_f_error";
        csv << '\n';
        for (std::size_t k = 0; k < result.replicas.size(); ++k) {
            const auto& r = result.replicas[k];
            csv << N << ',' << r.replica << ',' << r.seed << ',' << fmt_double(r.stop_time)
                << ',' << to_string(r.reason) << ',' << r.events;
            if (have_sup) csv << ',' << fmt_double(result.sup_f_error[k]);
            csv << '\n';
        }
        write_text_file(out_dir + "/summary.csv", csv.str());

        if (sc.write_trajectories && sc.grid.present) {
            ensure_directory(out_dir + "/trajectories");
            const auto canon = canonical_components(sc.model, J);
            for (std::size_t k = 0; k < result.replicas.size(); ++k) {
                std::ostringstream os;
                os << "time";
                for (const auto& c : canon) os << ',' << c;
                os << '\n';
                const auto n_pts = result.grid_samples.begin()->second[k].size();
                for (std::size_t i = 0; i < n_pts; ++i) {
                    os << fmt_double(result.grid[i]);
                    for (const auto& c : canon) os << ',' << result.grid_samples[c][k][i];
                    os << '\n';
                }
                write_text_file(out_dir + "/trajectories/" + sc.name + "_rep" +
                                    std::to_string(k) + ".csv",
                                os.str());
            }
        }
        if (!result.occupations.empty() || !result.occupations2d.empty()) {
            ensure_directory(out_dir + "/occupations");
            for (const auto& [name, measure] : result.occupations) {
                std::ostringstream os;
                os << "value,dwell_fraction\n";
                for (const auto& [k, w] : measure.weights())
                    os << k << ',' << fmt_double(w / measure.window_length()) << '\n';
                write_text_file(out_dir + "/occupations/" + name + ".csv", os.str());
            }
            for (const auto& [name, measure] : result.occupations2d) {
                std::ostringstream os;
                os << "value_a,value_b,dwell_fraction\n";
                for (const auto& [k, w] : measure.weights())
                    os << k.first << ',' << k.second << ','
                       << fmt_double(w / measure.window_length()) << '\n';
                write_text_file(out_dir + "/occupations/" + name + ".csv", os.str());
            }
        }
        if (sc.write_events) {
            ensure_directory(out_dir + "/events");
            for (std::size_t k = 0; k < result.replicas.size(); ++k)
                write_text_file(out_dir + "/events/" + sc.name + "_rep" + std::to_string(k) +
                                    ".ndjson",
                                render_events_ndjson(sc, N, result.replicas[k].seed));
        }
    }
    return result;
}

SweepResult sweep_N(const Scenario& sc, const std::vector<std::int64_t>& N_values,
                    const std::string& out_dir) {
    if (N_values.empty()) throw model_error("sweep_N: empty N list");
    for (std::size_t i = 1; i < N_values.size(); ++i)
        if (N_values[i] <= N_values[i - 1])
            throw model_error("sweep_N: N list must be increasing");
    if (sc.model == ModelKind::Full || sc.model == ModelKind::Auxiliary) {
        // capacities that scale with N must be given as fractions; the rRNA
        // block only matters for the full model
        if (!sc.params.c_m_is_fraction ||
            (sc.model == ModelKind::Full && !sc.params.c_r_is_fraction))
            throw model_error("sweep_N: sweeping requires fractional capacities (c_m, c_r)");
    }

    SweepResult sweep;
    sweep.N_values = N_values;
    for (std::int64_t N : N_values) sweep.runs.push_back(run_scenario(sc, "", N));

    auto add_trend = [&](const std::string& metric, std::vector<double> values) {
        TrendVerdict t;
        t.metric = metric;
        t.values = std::move(values);
        if (t.values.size() < 2) {
            t.direction = "insufficient";
        } else {
            bool dec = true, inc = true;
            for (std::size_t i = 1; i < t.values.size(); ++i) {
                dec = dec && t.values[i] < t.values[i - 1];
                inc = inc && t.values[i] > t.values[i - 1];
            }
            t.direction = dec ? "decreasing" : inc ? "increasing" : "mixed";
        }
        double lo = t.values[0], hi = t.values[0];
        for (double v : t.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        t.ratio_max_min = lo > 0 ? hi / lo : 0.0;
        sweep.trends.push_back(std::move(t));
    };

    if (sc.stop.kind != "time-horizon") {
        std::vector<double> stop_over_n;
        for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
            double m = 0;
            for (const auto& r : sweep.runs[i].replicas) m += r.stop_time;
            m /= static_cast<double>(sweep.runs[i].replicas.size());
            stop_over_n.push_back(m / static_cast<double>(N_values[i]));
        }
        add_trend("mean_stop_time_over_N", std::move(stop_over_n));
    }
    if (!sweep.runs.empty() && sweep.runs.front().has_fluid) {
        std::vector<double> sup_err;
        for (const auto& run : sweep.runs) {
            double m = 0;
            for (double v : run.sup_f_error) m += v;
            sup_err.push_back(run.sup_f_error.empty()
                                  ? 0.0
                                  : m / static_cast<double>(run.sup_f_error.size()));
        }
        add_trend("mean_sup_f_error", std::move(sup_err));
    }
    if (sc.grid.present) {
        for (const auto& [comp, rows0] : sweep.runs.front().grid_samples) {
            std::vector<double> finals;
            bool complete = true;
            for (const auto& run : sweep.runs) {
                const auto& rows = run.grid_samples.at(comp);
                double m = 0;
                std::size_t n = 0;
                for (const auto& row : rows) {
                    if (row.empty()) continue;
                    m += static_cast<double>(row.back());
                    ++n;
                }
                if (n == 0) {
                    complete = false;
                    break;
                }
                finals.push_back(m / static_cast<double>(n) /
                                 static_cast<double>(run.N));
            }
            if (complete) add_trend("mean_final_" + comp + "_over_N", std::move(finals));
        }
    }

    if (!out_dir.empty()) emit_report(sc, sweep, out_dir);
    return sweep;
}

void emit_report(const Scenario& sc, const SweepResult& result, const std::string& out_dir,
                 bool csv, bool json, bool svg) {
    ensure_directory(out_dir);

    if (csv) {
        std::ostringstream os;
        os << "N,replica,seed,stop_time,stop_reason,events,sup_f_error\n";
        for (std::size_t i = 0; i < result.runs.size(); ++i) {
            const auto& run = result.runs[i];
            for (std::size_t k = 0; k < run.replicas.size(); ++k) {
                const auto& r = run.replicas[k];
                os << run.N << ',' << r.replica << ',' << r.seed << ','
                   << fmt_double(r.stop_time) << ',' << to_string(r.reason) << ',' << r.events
                   << ','
                   << (k < run.sup_f_error.size() ? fmt_double(run.sup_f_error[k]) : "")
                   << '\n';
            }
        }
        write_text_file(out_dir + "/summary.csv", os.str());
    }

    if (json) {
        Json doc;
        doc["scenario"] = sc.name;
        doc["model"] = to_string(sc.model);
        Json trends = Json::array();
        for (const auto& t : result.trends) {
            Json jt;
            jt["metric"] = t.metric;
            jt["values"] = t.values;
            jt["direction"] = t.direction;
            jt["ratio_max_min"] = t.ratio_max_min;
            trends.push_back(jt);
        }
        doc["trends"] = trends;
        Json occ = Json::object();
        for (const auto& run : result.runs) {
            for (const auto& [name, measure] : run.occupations) {
                Json hist = Json::object();
                for (const auto& [k, w] : measure.weights())
                    hist[std::to_string(k)] = w / measure.window_length();
                occ["N" + std::to_string(run.N) + "_" + name] = hist;
            }
        }
        doc["occupations"] = occ;
        write_text_file(out_dir + "/verdicts.json", doc.dump(2) + "\n");
    }

    if (svg) {
        ensure_directory(out_dir + "/plots");
        for (const auto& run : result.runs) {
            if (run.has_fluid && run.grid_samples.count("f") &&
                !run.grid_samples.at("f").empty()) {
                SvgPlot plot(sc.name + " scaled free polymerases, N=" + std::to_string(run.N),
                             "scaled time", "F/N");
                std::vector<double> mean_path(run.grid.size(), 0.0);
                const auto& rows = run.grid_samples.at("f");
                std::size_t n_rows = 0;
                for (const auto& row : rows) {
                    if (row.size() != run.grid.size()) continue;
                    for (std::size_t i = 0; i < row.size(); ++i)
                        mean_path[i] += static_cast<double>(row[i]) /
                                        static_cast<double>(run.N);
                    ++n_rows;
                }
                if (n_rows > 0) {
                    for (auto& v : mean_path) v /= static_cast<double>(n_rows);
                    plot.add_line(run.grid, mean_path, "#1f77b4", false, "simulation mean");
                    std::vector<double> fbar;
                    for (double t : run.grid) fbar.push_back(run.fluid.eval(0, t));
                    plot.add_line(run.grid, fbar, "#d62728", true, "fluid limit");
                    write_text_file(out_dir + "/plots/fluid_overlay_N" +
                                        std::to_string(run.N) + ".svg",
                                    plot.render());
                }
            }
            for (const auto& [name, measure] : run.occupations) {
                SvgPlot plot(sc.name + " occupation of " + name + ", N=" +
                                 std::to_string(run.N),
                             name, "dwell fraction");
                std::vector<double> xs, ys;
                double mean_v = 0;
                for (const auto& [k, w] : measure.weights()) {
                    xs.push_back(static_cast<double>(k));
                    ys.push_back(w / measure.window_length());
                    mean_v += static_cast<double>(k) * w / measure.window_length();
                }
                plot.add_bars(xs, ys, "#1f77b4", "empirical");
                const auto pmf = poisson_pmf(std::max(mean_v, 1e-12));
                std::vector<double> px, py;
                for (std::size_t k = 0; k < pmf.size() && k < 64; ++k) {
                    px.push_back(static_cast<double>(k));
                    py.push_back(pmf[k]);
                }
                plot.add_line(px, py, "#d62728", true, "Poisson(mean)");
                write_text_file(out_dir + "/plots/occupation_" + name + "_N" +
                                    std::to_string(run.N) + ".svg",
                                plot.render());
            }
        }
        for (const auto& t : result.trends) {
            SvgPlot plot(sc.name + " trend: " + t.metric, "N", t.metric);
            std::vector<double> xs;
            for (auto n : result.N_values) xs.push_back(static_cast<double>(n));
            plot.add_line(xs, t.values, "#1f77b4", false, t.metric);
            write_text_file(out_dir + "/plots/trend_" + t.metric + ".svg", plot.render());
        }
    }
}

} // namespace sixsim
