#pragma once

#include "astrodf/geometry.hpp"

#include <functional>
#include <span>

namespace astrodf {

/// Stochastic interpolation model
///   M(z) = c + g'(z - x0) + (z - x0)' H (z - x0) / 2
/// fitted on a poised set centred at x0. Immutable after fit().
class LocalModel {
public:
    LocalModel(PolynomialBasis basis, Point center, double radius, Vector alpha);

    const PolynomialBasis& basis() const { return basis_; }
    /// Coefficients on the basis evaluated at (z - center): (c, g, upper(H)).
    const Vector& alpha() const { return alpha_; }
    const Point& center() const { return center_; }
    double radius() const { return radius_; }
    double value_at_center() const { return value_; }
    const Vector& gradient() const { return gradient_; }
    /// Symmetric; identically zero for the linear basis.
    const Matrix& hessian() const { return hessian_; }

    double eval(const Point& z) const;
    Vector grad(const Point& z) const;
    const Matrix& hess() const { return hessian_; }

private:
    PolynomialBasis basis_;
    Point center_;
    double radius_;
    Vector alpha_;
    double value_ = 0.0;
    Vector gradient_;
    Matrix hessian_;
};

/// Solves P(Phi, Y) alpha = estimates in coordinates (z - center) / radius and
/// maps the coefficients back. Throws GeometryError if the set is not poised.
LocalModel fit(const PolynomialBasis& basis, const InterpolationSet& set, std::span<const double> estimates,
               double condition_max = kDefaultConditionMax);

struct ModelDiagnostics {
    double lambda_hat = 0.0;
    double max_abs_sampling_error = 0.0;  // max_i |Fbar(Y_i) - f(Y_i)|
    double bound_rhs = 0.0;               // p * lambda_hat * max_abs_sampling_error
    double max_abs_deviation = 0.0;       // max over probes of |M(z) - m(z)|
    int probes = 0;
    int violations = 0;
    double hessian_norm = 0.0;
    double gradient_error = 0.0;  // ||grad M(x0) - grad f(x0)||, NaN without a true gradient
    double sampling_gradient_term = 0.0;  // sqrt(sum_{i>=2} (E_i - E_1)^2) / radius
    double interpolation_gradient_error = 0.0;  // ||grad m(x0) - grad f(x0)||, NaN without a true gradient
};

/// Compares M against the noise-free interpolant m of true_f on the same set
/// at `probes` random points of the ball and checks
///   |M(z) - m(z)| <= p * Lambda-hat * max_i |E_i|.
/// Estimates come from set.stats when present, otherwise from M(Y_i).
ModelDiagnostics error_bound_report(const LocalModel& model, const InterpolationSet& set,
                                    const std::function<double(const Point&)>& true_f,
                                    const std::function<Vector(const Point&)>& true_gradient = {},
                                    int probes = 50, std::uint64_t probe_seed = 0);

}  // namespace astrodf
