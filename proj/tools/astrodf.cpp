#include "astrodf/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace astrodf::cli;

    CLI::App app{"astrodf: adaptive-sampling trust-region optimizer for noisy black-box functions"};
    app.require_subcommand(1);

    RunOptions run;
    std::string seeds;
    int parallel = 0;
    auto* run_cmd = app.add_subcommand("run", "Run the optimizer for each seed in a config");
    run_cmd->add_option("--config", run.config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run.out_dir, "Output directory");
    auto* seeds_opt = run_cmd->add_option("--seeds", seeds, "Comma-separated seed list");
    auto* parallel_opt = run_cmd->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--override", run.overrides, "key=value setting, repeatable");

    CalibrateOptions cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "Check sampling and model-quality properties numerically");
    cal_cmd->add_option("kind", cal.kind, "stopping | fully-linear | error-bound")
        ->required()
        ->check(CLI::IsMember({"stopping", "fully-linear", "error-bound"}));
    cal_cmd->add_option("--out", cal.out_file, "CSV output file (stdout if omitted)");
    cal_cmd->add_option("--noise", cal.noise, "gaussian | uniform")->capture_default_str();
    cal_cmd->add_option("--sigma", cal.sigma)->capture_default_str();
    cal_cmd->add_option("--kappa", cal.kappa)->capture_default_str();
    cal_cmd->add_option("--delta", cal.delta)->capture_default_str();
    cal_cmd->add_option("--lambdas", cal.lambdas)->capture_default_str();
    cal_cmd->add_option("--reps", cal.reps)->capture_default_str();
    cal_cmd->add_option("--seed", cal.seed)->capture_default_str();
    cal_cmd->add_option("--problem", cal.problem)->capture_default_str();
    cal_cmd->add_option("--dim", cal.dim)->capture_default_str();
    cal_cmd->add_option("--condition", cal.condition)->capture_default_str();
    cal_cmd->add_option("--basis", cal.basis)->capture_default_str();
    cal_cmd->add_option("--center", cal.center, "Comma-separated point");
    cal_cmd->add_option("--radii", cal.radii)->capture_default_str();
    cal_cmd->add_option("--max-spread", cal.max_spread)->capture_default_str();
    cal_cmd->add_option("--trials", cal.trials)->capture_default_str();
    cal_cmd->add_option("--dims", cal.dims)->capture_default_str();
    cal_cmd->add_option("--bases", cal.bases)->capture_default_str();
    cal_cmd->add_option("--error-scale", cal.error_scale)->capture_default_str();
    cal_cmd->add_option("--probes", cal.probes)->capture_default_str();

    SummarizeOptions sum;
    auto* sum_cmd = app.add_subcommand("summarize", "Median/IQR progress across trace files");
    sum_cmd->add_option("traces", sum.patterns, "Trace files or globs")->required();
    sum_cmd->add_option("--out", sum.out_file, "CSV output file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (*run_cmd) {
            if (*seeds_opt) run.seeds = seeds;
            if (*parallel_opt) run.parallel = parallel;
            return cmd_run(run, std::cout, std::cerr);
        }
        if (*cal_cmd) return cmd_calibrate(cal, std::cout, std::cerr);
        if (*sum_cmd) return cmd_summarize(sum, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
