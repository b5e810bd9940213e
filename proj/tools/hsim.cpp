// hsim: command-line front end for the housing market simulator.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hsim/engine.hpp"
#include "hsim/experiments.hpp"
#include "hsim/output.hpp"
#include "hsim/population.hpp"
#include "hsim/scenario.hpp"

namespace fs = std::filesystem;
using namespace hsim;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string scenario;
    std::uint64_t seed = 1;
    std::string out;
    int households = 0;
    std::vector<std::string> sets;
    int jobs = 0;
    int n = 1000;
};

Overrides parse_sets(const Common& c) {
    Overrides o;
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + kv + "'");
        o[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (c.households > 0) o["n_sim_households"] = std::to_string(c.households);
    return o;
}

int default_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

RunManifest manifest_for(const std::string& command, const Common& c, const Overrides& o,
                         const std::vector<std::string>& argv) {
    RunManifest m;
    m.command = command;
    m.argv = argv;
    m.scenario = c.scenario;
    m.seed = c.seed;
    m.out = c.out;
    m.overrides = o;
    m.jobs = c.jobs;
    return m;
}

void add_scenario_opts(CLI::App* cmd, Common& c) {
    cmd->add_option("--scenario", c.scenario, "Scenario directory or scenario.conf")->required();
    cmd->add_option("--seed", c.seed, "Master seed");
    cmd->add_option("--households", c.households, "Simulated household count (rescales scale_factor)");
    cmd->add_option("--set", c.sets, "Scenario override key=value (repeatable)");
}

void add_ensemble_opts(CLI::App* cmd, Common& c) {
    cmd->add_option("--n", c.n, "Trajectories")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", c.jobs, "Worker threads (does not change results)")->check(CLI::NonNegativeNumber);
}

int run(const std::vector<std::string>& args);

int dispatch(CLI::App& app, const std::vector<std::string>& args) {
    try {
        // CLI11 takes the arguments reversed, without the program name.
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    return kOk;
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Agent-based housing market simulator"};
    app.require_subcommand(1);
    Common c;
    std::string reference, grid = "-0.2:0.8:0.05", field, donor, manifest_path;
    bool crn = false;

    auto* run_cmd = app.add_subcommand("run", "Simulate one trajectory");
    add_scenario_opts(run_cmd, c);
    run_cmd->add_option("--out", c.out, "Output directory")->required();

    auto* ens_cmd = app.add_subcommand("ensemble", "Simulate an ensemble of trajectories");
    add_scenario_opts(ens_cmd, c);
    add_ensemble_opts(ens_cmd, c);
    ens_cmd->add_option("--out", c.out, "Output directory")->required();

    auto* cal_cmd = app.add_subcommand("calibrate", "Grid-search the trend-following aptitude");
    add_scenario_opts(cal_cmd, c);
    add_ensemble_opts(cal_cmd, c);
    cal_cmd->add_option("--reference", reference, "Reference CSV (year_month,mean_price)")->required();
    cal_cmd->add_option("--grid", grid, "lo:hi:step");
    cal_cmd->add_flag("--crn", crn, "Reuse the master seed at every grid point");
    cal_cmd->add_option("--out", c.out, "Output directory")->required();

    auto* what_cmd = app.add_subcommand("whatif", "Alternative history: swap one field from a donor scenario");
    add_scenario_opts(what_cmd, c);
    add_ensemble_opts(what_cmd, c);
    what_cmd->add_option("--field", field, "Field to swap")->required();
    what_cmd->add_option("--donor", donor, "Donor scenario")->required();
    what_cmd->add_option("--out", c.out, "Output directory")->required();

    auto* ref_cmd = app.add_subcommand("reference", "Write an engine-generated reference series");
    add_scenario_opts(ref_cmd, c);
    add_ensemble_opts(ref_cmd, c);
    ref_cmd->add_option("--out", c.out, "Output CSV")->required();

    auto* pop_cmd = app.add_subcommand("population", "Export the synthesized initial population");
    add_scenario_opts(pop_cmd, c);
    pop_cmd->add_option("--out", c.out, "Output directory")->required();

    auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay_cmd->add_option("--manifest", manifest_path, "manifest.json or its directory")->required();
    replay_cmd->add_option("--out", c.out, "New output directory (default: the recorded one)");

    if (const int rc = dispatch(app, args); rc != kOk || app.get_subcommands().empty()) {
        return rc;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    if (command == "replay") {
        fs::path p = manifest_path;
        if (fs::is_directory(p)) p /= "manifest.json";
        const RunManifest m = read_manifest(p);
        if (m.argv.empty()) throw UsageError("manifest has no recorded command line");
        std::vector<std::string> again = m.argv;
        if (!c.out.empty()) {
            for (std::size_t i = 0; i + 1 < again.size(); ++i) {
                if (again[i] == "--out") again[i + 1] = c.out;
            }
        }
        return run(again);
    }

    const Overrides overrides = parse_sets(c);
    const ScenarioConfig config = load_scenario(c.scenario, overrides);
    if (c.jobs == 0) c.jobs = default_jobs();
    RunManifest manifest = manifest_for(command, c, overrides, args);

    if (command == "run") {
        manifest.n_trajectories = 1;
        manifest.jobs = 1;
        const TrajectoryOutput out = run_trajectory(config, c.seed);
        write_trajectory(out, config, c.out);
        write_manifest(manifest, c.out);
        std::printf("%d transactions, %zu reported months -> %s\n", static_cast<int>(out.transactions.size()),
                    out.months.size(), c.out.c_str());
    } else if (command == "ensemble") {
        manifest.n_trajectories = c.n;
        const EnsembleOutput out = run_ensemble(config, c.n, c.seed, c.jobs);
        const EnsembleSummary s = ensemble_stats(out);
        write_ensemble(out, s, c.out);
        write_manifest(manifest, c.out);
        std::printf("%d trajectories, final CV %.4f -> %s\n", out.size(), s.final_cv, c.out.c_str());
    } else if (command == "calibrate") {
        manifest.n_trajectories = app.get_subcommand("calibrate")->count("--n") ? c.n : 64;
        const std::vector<double> points = parse_grid(grid);
        CalibrationOptions opt;
        opt.n_trajectories = manifest.n_trajectories;
        opt.master_seed = c.seed;
        opt.jobs = c.jobs;
        opt.common_random_numbers = crn;
        const CalibrationResult r = calibrate_h(config, ReferenceSeries::load(reference), points, opt);
        write_calibration(r, c.out);
        write_manifest(manifest, c.out);
        std::printf("best h = %g (D = %.6g) over %zu grid points -> %s\n", r.best_h, r.best_distance,
                    points.size(), c.out.c_str());
    } else if (command == "whatif") {
        manifest.n_trajectories = c.n;
        const ScenarioConfig donor_cfg = load_scenario(donor, overrides);
        const ScenarioConfig alt = alternative_history(config, field, donor_cfg);
        save_scenario(alt, fs::path(c.out) / "scenario");
        const EnsembleOutput base_out = run_ensemble(config, c.n, c.seed, c.jobs);
        const EnsembleOutput alt_out = run_ensemble(alt, c.n, c.seed, c.jobs);
        write_ensemble(alt_out, ensemble_stats(alt_out), fs::path(c.out) / "alternative");
        write_ensemble(base_out, ensemble_stats(base_out), fs::path(c.out) / "baseline");
        const auto rows = variability_report({{"baseline", &base_out}, {field + "<-" + donor_cfg.name, &alt_out}});
        write_variability(rows, c.out);
        write_manifest(manifest, c.out);
        for (const auto& r : rows) std::printf("%-40s CV %.4f\n", r.name.c_str(), r.final_cv);
    } else if (command == "reference") {
        manifest.n_trajectories = c.n;
        const EnsembleOutput out = run_ensemble(config, c.n, c.seed, c.jobs);
        reference_from_ensemble(out).save(c.out);
        const fs::path dir = fs::path(c.out).parent_path();
        write_manifest(manifest, dir.empty() ? fs::path(".") : dir);
        std::printf("reference from %d trajectories -> %s\n", out.size(), c.out.c_str());
    } else if (command == "population") {
        Rng rng(c.seed);
        export_population(synthesize_population(config, rng), c.out);
        write_manifest(manifest, c.out);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    try {
        return run(args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ScenarioError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
}
