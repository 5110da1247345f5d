#include "astrodf/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace astrodf {

std::uint64_t lambda_at(const LambdaSchedule& schedule, std::uint64_t k) {
    const double raw =
        static_cast<double>(schedule.lambda0) * std::pow(static_cast<double>(k + 1), 1.0 + schedule.epsilon);
    // Guard against pow() landing a hair above an exact integer.
    const double rounded = std::round(raw);
    const double value = std::abs(raw - rounded) <= 1e-9 * rounded ? rounded : std::ceil(raw);
    return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(value));
}

double SamplingRule::threshold() const {
    return kappa * delta * delta / std::sqrt(static_cast<double>(lambda_k));
}

void SamplingRule::validate() const {
    if (!(kappa > 0.0)) throw ConfigError("sampling rule kappa must be > 0");
    if (!(delta > 0.0)) throw ConfigError("sampling rule radius must be > 0");
    if (lambda_k < 2) throw ConfigError("sampling rule lambda_k must be >= 2");
}

StoppingResult sample_to_stopping(const Point& x, ReplicationStats stats, const SamplingRule& rule,
                                  const TestProblem& problem, RngStream& rng, CallBudget& budget) {
    rule.validate();
    const double threshold = rule.threshold();
    const std::uint64_t cap = rule.cap.value_or(std::numeric_limits<std::uint64_t>::max());

    StoppingResult result;
    // standard_error() is +inf below two replicates, so the rule cannot pass early.
    bool rule_met = stats.standard_error() <= threshold;
    while (!(rule_met && stats.count() >= rule.lambda_k)) {
        if (!rule_met && stats.count() >= cap) {
            result.capped = true;
            break;
        }
        std::uint64_t draws = 1;
        if (rule_met) {
            draws = rule.lambda_k - stats.count();
        } else if (rule.batch_growth && stats.count() >= 2) {
            draws = std::max<std::uint64_t>(1, (stats.count() + 9) / 10);
            draws = std::min(draws, cap - stats.count());
        }
        for (std::uint64_t i = 0; i < draws; ++i) {
            if (!budget.try_consume()) {
                result.truncated = true;
                result.stats = stats;
                return result;
            }
            stats.push(observe(problem, x, rng));
        }
        if (!rule_met) rule_met = stats.standard_error() <= threshold;
    }
    result.stats = stats;
    return result;
}

std::vector<StoppingCalibrationRow> calibrate_stopping(const NoiseModel& noise, double kappa, double delta,
                                                       const std::vector<std::uint64_t>& lambda_grid,
                                                       std::uint64_t reps, std::uint64_t seed) {
    for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
        if (lambda_grid[i] <= lambda_grid[i - 1]) throw ConfigError("lambda grid must be increasing");
    }
    if (reps == 0) throw ConfigError("calibration needs at least one replication");

    TestProblem centred;
    centred.name = "centred-noise";
    centred.dimension = 1;
    centred.true_value = [](const Point&) { return 0.0; };
    centred.noise = noise;
    const Point origin = Point::Zero(1);

    std::vector<StoppingCalibrationRow> rows;
    for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
        SamplingRule rule;
        rule.kappa = kappa;
        rule.delta = delta;
        rule.lambda_k = lambda_grid[g];

        double sum_n = 0.0;
        double sum_sq_mean = 0.0;
        for (std::uint64_t r = 0; r < reps; ++r) {
            RngStream rng(seed, g * reps + r);
            CallBudget unlimited(std::numeric_limits<std::uint64_t>::max());
            const auto res = sample_to_stopping(origin, {}, rule, centred, rng, unlimited);
            sum_n += static_cast<double>(res.stats.count());
            sum_sq_mean += res.stats.mean() * res.stats.mean();
        }
        StoppingCalibrationRow row;
        row.lambda = static_cast<double>(rule.lambda_k);
        row.mean_n = sum_n / static_cast<double>(reps);
        row.mean_sq_mean = sum_sq_mean / static_cast<double>(reps);
        // Effective rule constant is kappa * delta^2; reduces to kappa at delta = 1.
        const double kappa_eff = kappa * delta * delta;
        const double sigma2 = noise.sigma * noise.sigma;
        row.ratio_n = sigma2 > 0.0 ? row.mean_n * kappa_eff * kappa_eff / (sigma2 * row.lambda)
                                   : std::numeric_limits<double>::quiet_NaN();
        row.ratio_msm = row.mean_sq_mean * row.lambda / (kappa_eff * kappa_eff);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace astrodf
