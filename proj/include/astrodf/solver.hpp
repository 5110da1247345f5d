#pragma once

#include "astrodf/model.hpp"
#include "astrodf/sampling.hpp"
#include "astrodf/subproblem.hpp"

#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace astrodf {

/// All algorithm parameters. Every field can be overridden from the CLI
/// config file; validate() enforces the parameter ranges.
struct SolverConfig {
    double delta0 = 1.0;      // initial candidate radius
    double delta_max = 1e3;   // radius cap
    double eta1 = 0.1;        // success threshold on rho-hat
    double gamma1 = 1.2;      // expansion (> 1)
    double gamma2 = 0.9;      // contraction (0, 1)
    double w = 0.9;           // contraction-loop shrink factor
    double mu = 1e2;          // radius / model-gradient balance
    double beta = 50.0;       // gradient inflation, 0 < beta < mu
    double kappa_ias = 1.0;   // inner (model construction) sampling constant
    double kappa_oas = 1.0;   // outer (candidate) sampling constant
    LambdaSchedule lambda_schedule;
    double kappa_fcd = 0.5;
    BasisKind basis = BasisKind::quadratic;
    std::uint64_t budget = 100000;
    double delta_min = 1e-6;
    int j_max = 200;
    double kappa_bhm = 1e3;  // monitored only
    std::uint64_t seed = 1;

    bool point_reuse = false;
    double lambda_max = 100.0;  // poisedness ceiling for reused points
    double condition_max = kDefaultConditionMax;
    bool batch_growth = false;
    std::optional<std::uint64_t> sample_cap;

    /// Throws ConfigError naming the offending parameter.
    void validate() const;
};

/// A design point with its replicate statistics and its own random stream.
struct SampledPoint {
    Point x;
    ReplicationStats stats;
    RngStream rng;
};

struct IterationRecord {
    std::uint64_t k = 0;
    Point x;  // incumbent after the update
    double f_bar = 0.0;
    double f_true = 0.0;
    double delta_k = 0.0;
    double rho_hat = 0.0;
    bool success = false;
    double model_grad_norm = 0.0;
    double hessian_norm = 0.0;
    double lambda_hat = 0.0;
    int j_k = 0;
    std::uint64_t n_center = 0;
    std::uint64_t n_candidate = 0;
    std::uint64_t cum_calls = 0;
};

struct SolverState {
    std::uint64_t k = 0;
    SampledPoint incumbent;
    double delta_tilde = 1.0;
    double last_delta = 0.0;
    InterpolationSet sample_set;
    /// Evaluated points eligible for reuse (rejected candidates, old stencil points).
    std::deque<SampledPoint> pool;
    CallBudget budget{0};
    std::uint64_t next_stream = 1;
    std::vector<IterationRecord> trace;

    bool finished = false;
    std::string termination_reason;
    int hessian_warnings = 0;
    std::uint64_t degenerate_iterations = 0;
    std::optional<double> stencil_lambda_hat;

    std::uint64_t cumulative_calls() const { return budget.used(); }
};

SolverState initial_state(const TestProblem& problem, const Point& x0, const SolverConfig& config);

struct ModelConstruction {
    std::optional<LocalModel> model;
    double delta_k = 0.0;
    double radius = 0.0;  // Delta-tilde_k * w^(j_k - 1)
    InterpolationSet set;
    int j_k = 0;
    double lambda_hat = 0.0;
    bool truncated = false;
    bool hit_j_max = false;
    bool below_delta_min = false;
};

/// Contraction loop: rebuild a poised set at radius Delta-tilde * w^(j-1),
/// sample it adaptively, fit, and stop once the radius is within mu times the
/// model gradient norm. The incumbent's statistics persist across j.
ModelConstruction adaptive_model_construction(SolverState& state, const TestProblem& problem,
                                              const SolverConfig& config);

/// Throws std::domain_error when the predicted decrease is not positive.
double success_ratio(double f_bar_center, double f_bar_candidate, const LocalModel& model, const Point& candidate);

double update_trust_region(double rho_hat, double eta1, double delta_k, double gamma1, double gamma2,
                           double delta_max);

/// One outer iteration; appends at most one IterationRecord.
void iterate(SolverState& state, const TestProblem& problem, const SolverConfig& config);

struct RunSummary {
    Point final_x;
    double final_f_bar = 0.0;
    double final_f_true = 0.0;
    double final_grad_norm = 0.0;  // NaN without a true gradient
    std::uint64_t total_calls = 0;
    std::uint64_t iterations = 0;
    std::string termination_reason;
    int hessian_warnings = 0;
};

struct RunResult {
    SolverState state;
    RunSummary summary;
};

/// Iterates until the budget is spent, Delta-tilde drops below delta_min, or
/// the contraction loop stalls below delta_min.
RunResult run(const TestProblem& problem, const Point& x0, const SolverConfig& config);
RunResult run(const TestProblem& problem, const SolverConfig& config);

// Trace I/O ------------------------------------------------------------------

/// Header: k, x_0..x_{d-1}, f_bar, f_true, delta_k, rho_hat, success,
/// model_grad_norm, hessian_norm, lambda_hat, j_k, n_center, n_candidate, cum_calls
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace, int dimension);

/// Parses a trace written by write_trace_csv. Throws ConfigError on bad input.
std::vector<IterationRecord> read_trace_csv(std::istream& in, int& dimension);

/// "key: value" lines: final_x, final_f_bar, total_calls, iterations, termination_reason, ...
void write_summary_block(std::ostream& out, const RunSummary& summary);

}  // namespace astrodf
