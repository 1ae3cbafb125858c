#include "imdd/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int finish(const imdd::ExperimentConfig& cfg, const std::vector<imdd::RunResult>& results,
           const std::string& out_dir) {
    imdd::emit_results(cfg, results, out_dir);
    int failed = 0;
    for (const auto& r : results) {
        if (!r.ok) {
            ++failed;
            std::cerr << "run failed (sweep_index=" << r.sweep_index << " seed=" << r.seed
                      << "): " << r.error << "\n";
        }
    }
    std::cout << results.size() - failed << "/" << results.size() << " runs ok, results in "
              << out_dir << "\n";
    return failed == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"IM/DD OOK link simulator and equalizer test harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::vector<std::uint64_t> seed_override;
    std::vector<std::string> stage_override;

    auto add_common = [&](CLI::App* sub, bool stages) {
        sub->add_option("config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_override, "output directory (overrides run.out_dir)");
        sub->add_option("--seed", seed_override, "seed(s) overriding run.seeds");
        if (stages)
            sub->add_option("--stage", stage_override,
                            "spectrum tap points: rx, pnle, dfe, mlse (repeatable)");
    };

    CLI::App* cmd_run = app.add_subcommand("run", "single point (sweep section ignored)");
    add_common(cmd_run, false);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "full sweep x seed grid");
    add_common(cmd_sweep, false);
    CLI::App* cmd_spec = app.add_subcommand("spectrum", "emit stage spectra for one run");
    add_common(cmd_spec, true);
    CLI::App* cmd_validate = app.add_subcommand("validate", "parse and echo the resolved config");
    cmd_validate->add_option("config", config_path, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        imdd::ExperimentConfig cfg = imdd::load_config(config_path);
        if (!seed_override.empty()) cfg.seeds = seed_override;
        if (!out_override.empty()) cfg.out_dir = out_override;

        if (cmd_validate->parsed()) {
            std::cout << imdd::serialize_config(cfg);
            std::cout << "# planned runs: " << cfg.planned_runs() << "\n";
            return 0;
        }
        if (cmd_run->parsed()) {
            cfg.sweep_axis.clear();
            cfg.sweep_values.clear();
            return finish(cfg, imdd::run_experiment(cfg), cfg.out_dir);
        }
        if (cmd_sweep->parsed()) {
            return finish(cfg, imdd::run_experiment(cfg), cfg.out_dir);
        }
        if (cmd_spec->parsed()) {
            cfg.sweep_axis.clear();
            cfg.sweep_values.clear();
            cfg.seeds.resize(1);
            if (!stage_override.empty()) cfg.spectrum_stages = stage_override;
            if (cfg.spectrum_stages.empty()) cfg.spectrum_stages = {"rx", "pnle", "dfe", "mlse"};
            cfg.validate();
            return finish(cfg, imdd::run_experiment(cfg, true), cfg.out_dir);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
