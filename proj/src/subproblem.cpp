#include "astrodf/subproblem.hpp"

#include "astrodf/ball_quadratic.hpp"

#include <cmath>
#include <limits>

namespace astrodf {

double cauchy_floor(const Vector& g, const Matrix& H, double delta, double kappa_fcd) {
    const double gn = g.norm();
    const double hn = spectral_norm(H);
    const double reach = hn == 0.0 ? delta : std::min(gn / hn, delta);
    return 0.5 * kappa_fcd * gn * reach;
}

double predicted_decrease(const Vector& g, const Matrix& H, const Vector& s) {
    return -quadratic_form_value(g, H, s);
}

Step cauchy_step(const Vector& g, const Matrix& H, double delta) {
    Step step;
    step.cauchy_decrease_floor = cauchy_floor(g, H, delta, 1.0);
    const double gn = g.norm();
    if (gn == 0.0) {
        step.s = Vector::Zero(g.size());
        return step;
    }
    const Vector dir = -g / gn;
    // Curvature along the unit direction.
    const double curv = dir.dot(H * dir);
    const double t = curv <= 0.0 ? delta : std::min(delta, gn / curv);
    step.s = t * dir;
    step.predicted_decrease = predicted_decrease(g, H, step.s);
    return step;
}

Step cauchy_step(const LocalModel& model, double delta) {
    return cauchy_step(model.gradient(), model.hessian(), delta);
}

namespace {

std::optional<Vector> dogleg_step(const Vector& g, const Matrix& H, double delta) {
    const Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Vector newton = llt.solve(-g);
    if (!newton.allFinite()) return std::nullopt;
    if (newton.norm() <= delta) return newton;

    const double gHg = g.dot(H * g);
    if (!(gHg > 0.0)) return std::nullopt;
    const Vector cauchy_point = -(g.squaredNorm() / gHg) * g;
    const double cn = cauchy_point.norm();
    if (cn >= delta) return Vector(cauchy_point * (delta / cn));

    // Walk from the Cauchy point toward the Newton point until the boundary.
    const Vector d = newton - cauchy_point;
    const double a = d.squaredNorm();
    const double b = 2.0 * cauchy_point.dot(d);
    const double c = cauchy_point.squaredNorm() - delta * delta;
    const double tau = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
    return Vector(cauchy_point + tau * d);
}

void clip_to_ball(Vector& s, double delta) {
    const double n = s.norm();
    if (n > delta) s *= delta / n;
}

}  // namespace

Step solve(const Vector& g, const Matrix& H, double delta, const SubproblemOptions& options) {
    const Step cauchy = cauchy_step(g, H, delta);
    Step best = cauchy;

    auto consider = [&](Vector s) {
        if (!s.allFinite()) return;
        clip_to_ball(s, delta);
        const double dec = predicted_decrease(g, H, s);
        if (dec > best.predicted_decrease) {
            best.s = std::move(s);
            best.predicted_decrease = dec;
        }
    };
    if (auto dl = dogleg_step(g, H, delta)) consider(std::move(*dl));
    consider(minimize_quadratic_on_ball(g, H, delta));

    best.cauchy_decrease_floor = cauchy_floor(g, H, delta, options.kappa_fcd);
    if (!check_cauchy(g, H, best, delta, options.kappa_fcd)) {
        Step fallback = cauchy;
        fallback.cauchy_decrease_floor = best.cauchy_decrease_floor;
        return fallback;
    }
    return best;
}

Step solve(const LocalModel& model, double delta, const SubproblemOptions& options) {
    return solve(model.gradient(), model.hessian(), delta, options);
}

bool check_cauchy(const Vector& g, const Matrix& H, const Step& step, double delta, double kappa_fcd) {
    if (step.s.norm() > delta * (1.0 + 1e-12)) return false;
    const double dec = predicted_decrease(g, H, step.s);
    const double floor = cauchy_floor(g, H, delta, kappa_fcd);
    return dec >= floor * (1.0 - 1e-10);
}

bool check_cauchy(const LocalModel& model, const Step& step, double delta, double kappa_fcd) {
    return check_cauchy(model.gradient(), model.hessian(), step, delta, kappa_fcd);
}

}  // namespace astrodf
