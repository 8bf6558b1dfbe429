#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sixsim/fluid.hpp"
#include "sixsim/harness.hpp"
#include "sixsim/model.hpp"
#include "sixsim/scenario.hpp"
#include "sixsim/verify.hpp"

#ifndef SIXSIM_SCENARIO_DIR
#define SIXSIM_SCENARIO_DIR "scenarios"
#endif

namespace {

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::int64_t seed, int replicas, int threads, bool trajectories,
                 bool events) {
    sixsim::Scenario sc = sixsim::Scenario::load(scenario_path);
    if (seed >= 0) sc.base_seed = static_cast<std::uint64_t>(seed);
    if (replicas > 0) sc.replicas = replicas;
    if (threads > 0) sc.threads = threads;
    if (trajectories) sc.write_trajectories = true;
    if (events) sc.write_events = true;
    const auto result = sixsim::run_scenario(sc, out_dir);
    std::cout << "scenario '" << sc.name << "': " << result.replicas.size()
              << " replicas at N=" << result.N << "\n";
    for (const auto& r : result.replicas)
        std::cout << "  replica " << r.replica << ": stop_time=" << r.stop_time
                  << " events=" << r.events << "\n";
    if (!out_dir.empty()) std::cout << "artifacts written to " << out_dir << "\n";
    return 0;
}

int cmd_fluid(const std::string& kind, double f0, double s0, double z0, double c_m,
              double alpha_m, double beta_m, double lambda, double eta, double beta_6,
              double delta_6, double t_end, double step, const std::string& out_path) {
    sixsim::OdeSolution sol;
    std::vector<std::string> names;
    if (kind == "subcritical") {
        sixsim::SubFluidParams p{alpha_m, beta_m, lambda, eta, delta_6, c_m};
        sol = sixsim::integrate_subcritical(s0, z0, p, t_end, step);
        names = {"s", "z"};
    } else if (kind == "supercritical") {
        sixsim::SuperFluidParams p{eta / lambda, beta_6 / delta_6, delta_6, c_m};
        sol = sixsim::integrate_supercritical(f0, p, t_end, step);
        names = {"f"};
        std::cout << "equilibrium free fraction: "
                  << sixsim::equilibrium_free_fraction(p) << "\n";
    } else {
        std::cerr << "unknown fluid kind '" << kind << "'\n";
        return 1;
    }
    if (out_path.empty()) {
        std::ostringstream os;
        sixsim::write_ode_csv(os, sol, names);
        std::cout << os.str();
    } else {
        std::ofstream out(out_path);
        sixsim::write_ode_csv(out, sol, names);
        std::cout << "wrote " << out_path << " (" << sol.times.size() << " rows)\n";
    }
    return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::vector<std::int64_t>& N_list,
              const std::string& out_dir, std::int64_t seed, int replicas, int threads) {
    sixsim::Scenario sc = sixsim::Scenario::load(scenario_path);
    if (seed >= 0) sc.base_seed = static_cast<std::uint64_t>(seed);
    if (replicas > 0) sc.replicas = replicas;
    if (threads > 0) sc.threads = threads;
    const auto sweep = sixsim::sweep_N(sc, N_list, out_dir);
    for (const auto& t : sweep.trends) {
        std::cout << t.metric << ":";
        for (double v : t.values) std::cout << " " << v;
        std::cout << "  -> " << t.direction << " (max/min " << t.ratio_max_min << ")\n";
    }
    if (!out_dir.empty()) std::cout << "artifacts written to " << out_dir << "\n";
    return 0;
}

int cmd_verify(const std::string& scenario_dir, const std::string& out_dir,
               const std::vector<int>& criteria, std::int64_t seed, int threads) {
    sixsim::VerifyOptions opt;
    opt.scenario_dir = scenario_dir;
    opt.out_dir = out_dir;
    opt.criteria = criteria;
    opt.threads = threads;
    if (seed >= 0) opt.seed_override = static_cast<std::uint64_t>(seed);
    const auto result = sixsim::run_verification(opt, std::cout);
    if (!out_dir.empty()) std::cout << "verdicts written to " << out_dir << "/verdicts.json\n";
    return result.all_pass ? 0 : 2;
}

int cmd_report(const std::string& scenario_path, const std::string& out_dir,
               std::int64_t seed, int replicas, int threads, bool csv, bool json, bool svg) {
    sixsim::Scenario sc = sixsim::Scenario::load(scenario_path);
    if (seed >= 0) sc.base_seed = static_cast<std::uint64_t>(seed);
    if (replicas > 0) sc.replicas = replicas;
    if (threads > 0) sc.threads = threads;
    sixsim::SweepResult single;
    single.N_values = {sc.params.N};
    single.runs.push_back(sixsim::run_scenario(sc));
    sixsim::emit_report(sc, single, out_dir, csv, json, svg);
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact simulator and verification harness for a polymerase "
                 "sequestration model"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand name

    std::string out_dir;
    std::int64_t seed = -1;
    int replicas = 0;
    int threads = 0;
    app.add_option("--out-dir", out_dir, "output directory for artifacts");
    app.add_option("--seed", seed, "override the scenario base seed");
    app.add_option("--replicas", replicas, "override the scenario replica count");
    app.add_option("--threads", threads, "worker threads (0 = library default)");

    auto* sim = app.add_subcommand("simulate", "run a scenario file");
    std::string scenario_path;
    bool sim_traj = false, sim_events = false;
    sim->add_option("--scenario", scenario_path, "scenario file (.toml or .json)")
        ->required();
    sim->add_flag("--trajectories", sim_traj, "write per-replica grid CSVs");
    sim->add_flag("--events", sim_events, "write per-replica event logs (NDJSON)");

    auto* fluid = app.add_subcommand("fluid", "integrate a fluid-limit ODE");
    std::string fluid_kind = "supercritical";
    double f0 = 0.4, s0 = 0.3, z0 = 0.2, c_m = 0.5;
    double alpha_m = 1, beta_m = 1, lambda = 1, eta = 1, beta_6 = 1, delta_6 = 1;
    double t_end = 10, step = 1e-3;
    std::string fluid_out;
    fluid->add_option("--kind", fluid_kind, "subcritical | supercritical");
    fluid->add_option("--f0", f0, "initial free fraction (supercritical)");
    fluid->add_option("--s0", s0, "initial sequestered fraction (subcritical)");
    fluid->add_option("--z0", z0, "initial free-6S fraction (subcritical)");
    fluid->add_option("--c-m", c_m, "mRNA capacity fraction");
    fluid->add_option("--alpha-m", alpha_m, "mRNA binding rate");
    fluid->add_option("--beta-m", beta_m, "mRNA release rate");
    fluid->add_option("--lambda", lambda, "sequestration rate");
    fluid->add_option("--eta", eta, "desequestration rate");
    fluid->add_option("--beta-6", beta_6, "6S creation rate");
    fluid->add_option("--delta-6", delta_6, "6S degradation rate");
    fluid->add_option("--t-end", t_end, "integration horizon");
    fluid->add_option("--step", step, "RK4 step");
    fluid->add_option("--out", fluid_out, "CSV output path (default: stdout)");

    auto* sweep = app.add_subcommand("sweep", "run a scenario across several N");
    std::string sweep_scenario;
    std::vector<std::int64_t> N_list;
    sweep->add_option("--scenario", sweep_scenario, "scenario file")->required();
    sweep->add_option("--N", N_list, "increasing list of N values")->required();

    auto* verify = app.add_subcommand("verify", "run the verification suite");
    std::string scenario_dir = SIXSIM_SCENARIO_DIR;
    std::vector<int> criteria;
    verify->add_option("--scenario-dir", scenario_dir, "directory with scenario files");
    verify->add_option("--criterion", criteria, "run only these criteria (1-11)");

    auto* report = app.add_subcommand("report", "run a scenario and render reports");
    std::string report_scenario;
    bool no_csv = false, no_json = false, no_svg = false;
    report->add_option("--scenario", report_scenario, "scenario file")->required();
    report->add_flag("--no-csv", no_csv, "skip CSV output");
    report->add_flag("--no-json", no_json, "skip JSON output");
    report->add_flag("--no-svg", no_svg, "skip SVG plots");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(scenario_path, out_dir, seed, replicas, threads, sim_traj,
                                sim_events);
        if (fluid->parsed())
            return cmd_fluid(fluid_kind, f0, s0, z0, c_m, alpha_m, beta_m, lambda, eta, beta_6,
                             delta_6, t_end, step, fluid_out);
        if (sweep->parsed())
            return cmd_sweep(sweep_scenario, N_list, out_dir, seed, replicas, threads);
        if (verify->parsed()) return cmd_verify(scenario_dir, out_dir, criteria, seed, threads);
        if (report->parsed())
            return cmd_report(report_scenario, out_dir.empty() ? "report" : out_dir, seed,
                              replicas, threads, !no_csv, !no_json, !no_svg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
