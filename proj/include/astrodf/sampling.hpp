#pragma once

#include "astrodf/oracle.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace astrodf {

/// Sample-size floor lambda_k = ceil(lambda0 * (k + 1)^(1 + epsilon)).
struct LambdaSchedule {
    std::uint64_t lambda0 = 2;
    double epsilon = 0.1;
};

std::uint64_t lambda_at(const LambdaSchedule& schedule, std::uint64_t k);

/// Stop once sigma_hat / sqrt(n) <= kappa * delta^2 / sqrt(lambda_k), but
/// never before lambda_k replicates.
struct SamplingRule {
    double kappa = 1.0;
    std::uint64_t lambda_k = 2;
    double delta = 1.0;
    std::optional<std::uint64_t> cap;
    /// Grow by ~10% between rule checks instead of one replicate at a time.
    /// Approximates the exact first-passage time; off by default.
    bool batch_growth = false;

    double threshold() const;
    void validate() const;
};

/// Oracle-call allowance for one solver run.
class CallBudget {
public:
    explicit CallBudget(std::uint64_t limit) : limit_(limit) {}

    bool try_consume() {
        if (used_ >= limit_) return false;
        ++used_;
        return true;
    }
    bool exhausted() const { return used_ >= limit_; }
    std::uint64_t used() const { return used_; }
    std::uint64_t limit() const { return limit_; }

private:
    std::uint64_t limit_;
    std::uint64_t used_ = 0;
};

struct StoppingResult {
    ReplicationStats stats;
    bool truncated = false;  // budget ran out before the rule was met
    bool capped = false;     // hit rule.cap before the rule was met
};

/// Resumes sampling at x from `stats` until the rule is met. The decision to
/// draw another replicate depends only on replicates already drawn.
StoppingResult sample_to_stopping(const Point& x, ReplicationStats stats, const SamplingRule& rule,
                                  const TestProblem& problem, RngStream& rng, CallBudget& budget);

struct StoppingCalibrationRow {
    double lambda = 0.0;
    double mean_n = 0.0;
    double ratio_n = 0.0;       // mean_n * kappa^2 delta^4 / (sigma^2 lambda)
    double mean_sq_mean = 0.0;  // mean of Xbar_N^2
    double ratio_msm = 0.0;     // mean_sq_mean * lambda / kappa^2
};

/// Runs the stopping rule `reps` times per lambda on centred iid noise.
std::vector<StoppingCalibrationRow> calibrate_stopping(const NoiseModel& noise, double kappa, double delta,
                                                       const std::vector<std::uint64_t>& lambda_grid,
                                                       std::uint64_t reps, std::uint64_t seed);

}  // namespace astrodf
