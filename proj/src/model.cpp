#include "astrodf/model.hpp"

#include "astrodf/ball_quadratic.hpp"

#include <cmath>
#include <limits>

namespace astrodf {

LocalModel::LocalModel(PolynomialBasis basis, Point center, double radius, Vector alpha)
    : basis_(std::move(basis)), center_(std::move(center)), radius_(radius), alpha_(std::move(alpha)) {
    basis_.unpack(alpha_, value_, gradient_, hessian_);
}

double LocalModel::eval(const Point& z) const {
    const Vector s = z - center_;
    return value_ + quadratic_form_value(gradient_, hessian_, s);
}

Vector LocalModel::grad(const Point& z) const { return gradient_ + hessian_ * (z - center_); }

LocalModel fit(const PolynomialBasis& basis, const InterpolationSet& set, std::span<const double> estimates,
               double condition_max) {
    if (static_cast<int>(estimates.size()) != basis.size() ||
        static_cast<int>(set.points.size()) != basis.size()) {
        throw GeometryError("fit needs exactly p points and p estimates");
    }
    const Matrix p = scaled_interpolation_matrix(basis, set);
    const double cond = condition_number(p);
    if (!(cond <= condition_max)) {
        throw GeometryError("interpolation set is not poised (condition " + std::to_string(cond) + ")");
    }
    const Eigen::Map<const Vector> rhs(estimates.data(), static_cast<Eigen::Index>(estimates.size()));
    Vector alpha = Eigen::ColPivHouseholderQR<Matrix>(p).solve(rhs);

    // Undo the 1 / radius scaling: linear terms pick up 1/r, quadratic 1/r^2.
    const int d = basis.dimension();
    alpha.segment(1, d) /= set.radius;
    if (basis.kind() == BasisKind::quadratic) {
        alpha.tail(alpha.size() - d - 1) /= set.radius * set.radius;
    }
    return LocalModel(basis, set.center, set.radius, std::move(alpha));
}

ModelDiagnostics error_bound_report(const LocalModel& model, const InterpolationSet& set,
                                    const std::function<double(const Point&)>& true_f,
                                    const std::function<Vector(const Point&)>& true_gradient, int probes,
                                    std::uint64_t probe_seed) {
    const PolynomialBasis& basis = model.basis();
    const std::size_t p = set.points.size();
    const bool have_stats = set.stats.size() == p;

    std::vector<double> truth(p);
    std::vector<double> errors(p);
    ModelDiagnostics diag;
    for (std::size_t i = 0; i < p; ++i) {
        truth[i] = true_f(set.points[i]);
        const double estimate = have_stats ? set.stats[i].mean() : model.eval(set.points[i]);
        errors[i] = estimate - truth[i];
        diag.max_abs_sampling_error = std::max(diag.max_abs_sampling_error, std::abs(errors[i]));
    }

    const LagrangeSet lag = lagrange_polynomials(basis, set, std::numeric_limits<double>::infinity());
    diag.lambda_hat = poisedness_constant(lag, set.center, set.radius, set.points);
    diag.bound_rhs = static_cast<double>(p) * diag.lambda_hat * diag.max_abs_sampling_error;
    diag.hessian_norm = spectral_norm(model.hessian());

    const LocalModel exact = fit(basis, set, truth, std::numeric_limits<double>::infinity());

    RngStream rng(probe_seed, 0xD1A6);
    const int d = basis.dimension();
    // Slack for floating point in the two solves.
    const double slack = 1e-9 * (1.0 + std::abs(model.value_at_center()));
    for (int k = 0; k < probes; ++k) {
        Vector v(d);
        for (int i = 0; i < d; ++i) v[i] = rng.normal();
        const double vn = v.norm();
        const Point z = vn == 0.0 ? set.center
                                  : Point(set.center + v * (set.radius * std::pow(rng.uniform(), 1.0 / d) / vn));
        const double dev = std::abs(model.eval(z) - exact.eval(z));
        diag.max_abs_deviation = std::max(diag.max_abs_deviation, dev);
        if (dev > diag.bound_rhs + slack) ++diag.violations;
    }
    diag.probes = probes;

    double sq = 0.0;
    for (std::size_t i = 1; i < p; ++i) sq += (errors[i] - errors[0]) * (errors[i] - errors[0]);
    diag.sampling_gradient_term = std::sqrt(sq) / set.radius;
    if (true_gradient) {
        const Vector gf = true_gradient(set.center);
        diag.gradient_error = (model.gradient() - gf).norm();
        diag.interpolation_gradient_error = (exact.gradient() - gf).norm();
    } else {
        diag.gradient_error = std::numeric_limits<double>::quiet_NaN();
        diag.interpolation_gradient_error = std::numeric_limits<double>::quiet_NaN();
    }
    return diag;
}

}  // namespace astrodf
