#pragma once

#include "astrodf/model.hpp"

namespace astrodf {

struct Step {
    Vector s;
    double predicted_decrease = 0.0;     // M(x) - M(x + s)
    double cauchy_decrease_floor = 0.0;  // right-hand side of the Cauchy test
};

/// kappa_fcd / 2 * ||g|| * min(||g|| / ||H||, delta), with ||g|| / ||H|| = inf
/// when H = 0.
double cauchy_floor(const Vector& g, const Matrix& H, double delta, double kappa_fcd);

/// -(g's + s'Hs / 2)
double predicted_decrease(const Vector& g, const Matrix& H, const Vector& s);

/// Exact minimizer of the model along -g within the ball. Satisfies the
/// Cauchy test with kappa_fcd = 1.
Step cauchy_step(const Vector& g, const Matrix& H, double delta);
Step cauchy_step(const LocalModel& model, double delta);

struct SubproblemOptions {
    double kappa_fcd = 0.5;
};

/// Best of the Cauchy step, the dogleg step (when H is positive definite) and
/// the eigen-based ball minimizer. The winner is verified against the Cauchy
/// floor; any failure falls back to the Cauchy step.
Step solve(const Vector& g, const Matrix& H, double delta, const SubproblemOptions& options = {});
Step solve(const LocalModel& model, double delta, const SubproblemOptions& options = {});

bool check_cauchy(const Vector& g, const Matrix& H, const Step& step, double delta, double kappa_fcd);
bool check_cauchy(const LocalModel& model, const Step& step, double delta, double kappa_fcd);

}  // namespace astrodf
