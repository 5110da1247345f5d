#pragma once

#include "astrodf/cli/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace astrodf::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitParse = 2,
    kExitUnknownProblem = 3,
    kExitNoTraces = 4,
    kExitDimensionMismatch = 5,
};

struct RunOptions {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::string> seeds;  // CSV list
    std::optional<int> parallel;
    std::vector<std::string> overrides;  // key=value
};

/// Writes trace_<seed>.csv and summary_<seed>.txt per seed, plus summary.csv
/// and effective_config.cfg, into the output directory.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Resolves the config file plus command-line overrides (exposed for tests).
ExperimentConfig resolve_run_config(const RunOptions& options);

struct CalibrateOptions {
    std::string kind;  // stopping | fully-linear | error-bound
    std::optional<std::string> out_file;

    // stopping
    std::string noise = "gaussian";
    double sigma = 1.0;
    double kappa = 1.0;
    double delta = 1.0;
    std::string lambdas = "100,1000,10000";
    std::uint64_t reps = 500;
    std::uint64_t seed = 1;
    double ratio_n_tolerance = 0.1;
    double msm_low = 0.8;
    double msm_high = 1.25;

    // fully-linear
    std::string problem = "noisy-sphere";
    int dim = 2;
    double condition = 10.0;
    std::string basis = "linear";
    std::optional<std::string> center;  // CSV point, defaults to problem start
    std::string radii = "1,0.5,0.25,0.125";
    double max_spread = 2.0;

    // error-bound
    int trials = 1000;
    std::string dims = "2,3,4";
    std::string bases = "linear,quadratic";
    double error_scale = 0.1;
    int probes = 50;
};

int cmd_calibrate(const CalibrateOptions& options, std::ostream& out, std::ostream& err);

struct SummarizeOptions {
    std::vector<std::string> patterns;  // file paths or globs (* and ? in the file name)
    std::optional<std::string> out_file;
};

/// Median / IQR of f_true and model_grad_norm at decade checkpoints of
/// cumulative oracle calls, across traces.
int cmd_summarize(const SummarizeOptions& options, std::ostream& out, std::ostream& err);

/// Expands the file-name part of `pattern` against its directory; sorted.
std::vector<std::string> expand_glob(const std::string& pattern);

}  // namespace astrodf::cli
