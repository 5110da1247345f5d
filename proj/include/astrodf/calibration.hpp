#pragma once

#include "astrodf/model.hpp"

#include <span>
#include <vector>

namespace astrodf {

struct ScalingRow {
    double radius = 0.0;
    double max_error = 0.0;     // max over the ball of |f - m|
    double scaled_error = 0.0;  // max_error / radius^(degree + 1)
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double spread = 0.0;  // max scaled_error / min scaled_error
};

/// Noise-free interpolation of problem.true_value on the default stencil at
/// each radius; the ball error is probed at interior and boundary points.
ScalingReport model_error_scaling(const TestProblem& problem, const Point& center, BasisKind kind,
                                  const std::vector<double>& radii, int probes = 4000, std::uint64_t seed = 7);

struct ErrorBoundTrials {
    int trials = 0;
    int probes = 0;
    int violations = 0;
    double worst_ratio = 0.0;  // max over trials of max|M - m| / (p Lambda-hat max|E|)
    double max_lambda_hat = 0.0;
};

/// Randomized poised sets (perturbed, rotated stencils with random center and
/// radius), random quadratic truth, uniform injected errors of size
/// error_scale. Cycles through `dims` and `kinds`.
ErrorBoundTrials error_bound_trials(int trials, std::span<const int> dims, std::span<const BasisKind> kinds,
                                    double error_scale, int probes = 50, std::uint64_t seed = 11);

}  // namespace astrodf
