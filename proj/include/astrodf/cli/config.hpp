#pragma once

#include "astrodf/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace astrodf::cli {

/// Raised for malformed config lines or bad values; carries the 1-based line
/// number (0 for command-line overrides) and the offending key.
struct ConfigParseError : ConfigError {
    ConfigParseError(std::size_t line, std::string key, const std::string& message);

    std::size_t line;
    std::string key;
};

struct ExperimentConfig {
    std::string problem = "noisy-sphere";
    ProblemOptions problem_options;
    std::optional<Point> x0;
    SolverConfig solver;
    std::vector<std::uint64_t> seeds{1};
    std::string output_dir = "astrodf-out";
    int parallel = 1;

    /// Checks the seed list and solver parameter ranges.
    void validate() const;
};

/// Flat "key = value" lines, '#' comments, dotted keys for nested settings
/// (problem.dim = 2, solver.eta1 = 0.1, seeds = 1,2,3).
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

/// Applies one key/value pair. Throws ConfigParseError naming the key.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value, std::size_t line = 0);

/// Writes every effective setting (defaults included) in the same format.
void write_experiment_config(std::ostream& out, const ExperimentConfig& config);

std::vector<std::uint64_t> parse_seed_list(const std::string& csv);

}  // namespace astrodf::cli
