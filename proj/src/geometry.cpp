#include "astrodf/geometry.hpp"

#include "astrodf/ball_quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace astrodf {

BasisKind parse_basis_kind(const std::string& name) {
    if (name == "linear") return BasisKind::linear;
    if (name == "quadratic") return BasisKind::quadratic;
    throw ConfigError("unknown basis kind '" + name + "' (expected linear or quadratic)");
}

std::string to_string(BasisKind kind) { return kind == BasisKind::linear ? "linear" : "quadratic"; }

PolynomialBasis::PolynomialBasis(BasisKind kind, int dimension) : kind_(kind), dim_(dimension) {
    if (dimension < 1) throw ConfigError("basis dimension must be >= 1");
    size_ = kind == BasisKind::linear ? dimension + 1 : (dimension + 1) * (dimension + 2) / 2;
}

Vector PolynomialBasis::evaluate(const Vector& z) const {
    Vector phi(size_);
    phi[0] = 1.0;
    phi.segment(1, dim_) = z;
    if (kind_ == BasisKind::quadratic) {
        int k = dim_ + 1;
        for (int i = 0; i < dim_; ++i) {
            phi[k++] = 0.5 * z[i] * z[i];
            for (int j = i + 1; j < dim_; ++j) phi[k++] = z[i] * z[j];
        }
    }
    return phi;
}

void PolynomialBasis::unpack(const Vector& coeffs, double& constant, Vector& gradient, Matrix& hessian) const {
    constant = coeffs[0];
    gradient = coeffs.segment(1, dim_);
    hessian = Matrix::Zero(dim_, dim_);
    if (kind_ == BasisKind::quadratic) {
        int k = dim_ + 1;
        for (int i = 0; i < dim_; ++i) {
            hessian(i, i) = coeffs[k++];
            for (int j = i + 1; j < dim_; ++j) {
                hessian(i, j) = coeffs[k];
                hessian(j, i) = coeffs[k];
                ++k;
            }
        }
    }
}

Matrix interpolation_matrix(const PolynomialBasis& basis, const InterpolationSet& set) {
    Matrix p(static_cast<Eigen::Index>(set.points.size()), basis.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        p.row(static_cast<Eigen::Index>(i)) = basis.evaluate(set.points[i]).transpose();
    }
    return p;
}

Matrix scaled_interpolation_matrix(const PolynomialBasis& basis, const InterpolationSet& set) {
    Matrix p(static_cast<Eigen::Index>(set.points.size()), basis.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        p.row(static_cast<Eigen::Index>(i)) = basis.evaluate(set.scaled(set.points[i])).transpose();
    }
    return p;
}

double condition_number(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& sv = svd.singularValues();
    if (sv.size() == 0) return std::numeric_limits<double>::infinity();
    const double smin = sv[sv.size() - 1];
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return sv[0] / smin;
}

namespace {

/// Stencil directions in scaled coordinates, columns of the returned matrix
/// (the center's zero column is implicit).
std::vector<Vector> stencil_directions(const PolynomialBasis& basis) {
    const int d = basis.dimension();
    std::vector<Vector> dirs;
    for (int i = 0; i < d; ++i) dirs.push_back(Vector::Unit(d, i));
    if (basis.kind() == BasisKind::quadratic) {
        for (int i = 0; i < d; ++i) dirs.push_back(-Vector::Unit(d, i));
        const double c = 1.0 / std::sqrt(2.0);
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) dirs.push_back(c * (Vector::Unit(d, i) + Vector::Unit(d, j)));
        }
    }
    return dirs;
}

InterpolationSet build_set(const Point& center, double radius, const std::vector<Vector>& dirs) {
    InterpolationSet set;
    set.center = center;
    set.radius = radius;
    set.points.reserve(dirs.size() + 1);
    set.points.push_back(center);
    for (const auto& u : dirs) set.points.push_back(center + radius * u);
    return set;
}

}  // namespace

InterpolationSet default_poised_set(const Point& center, double radius, const PolynomialBasis& basis) {
    if (!(radius > 0.0)) throw ConfigError("stencil radius must be > 0");
    if (center.size() != basis.dimension()) throw ConfigError("stencil center dimension mismatch");
    return build_set(center, radius, stencil_directions(basis));
}

InterpolationSet rotated_poised_set(const Point& center, double radius, const PolynomialBasis& basis,
                                    RngStream& rng) {
    if (!(radius > 0.0)) throw ConfigError("stencil radius must be > 0");
    const int d = basis.dimension();
    Matrix gauss(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) gauss(i, j) = rng.normal();
    }
    const Matrix rot = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
    auto dirs = stencil_directions(basis);
    for (auto& u : dirs) u = rot * u;
    return build_set(center, radius, dirs);
}

LagrangeSet::LagrangeSet(PolynomialBasis basis, Point center, double radius, Matrix coefficients)
    : basis_(std::move(basis)), center_(std::move(center)), radius_(radius), coeffs_(std::move(coefficients)) {}

double LagrangeSet::value(int j, const Point& z) const {
    return basis_.evaluate((z - center_) / radius_).dot(coeffs_.col(j));
}

Vector LagrangeSet::values(const Point& z) const {
    return coeffs_.transpose() * basis_.evaluate((z - center_) / radius_);
}

LagrangeSet lagrange_polynomials(const PolynomialBasis& basis, const InterpolationSet& set, double condition_max) {
    if (static_cast<int>(set.points.size()) != basis.size()) {
        throw GeometryError("interpolation set has " + std::to_string(set.points.size()) + " points, basis needs " +
                            std::to_string(basis.size()));
    }
    const Matrix p = scaled_interpolation_matrix(basis, set);
    const double cond = condition_number(p);
    if (!(cond <= condition_max)) {
        throw GeometryError("interpolation set is not poised (condition " + std::to_string(cond) + ")");
    }
    // Row i of P is phi(Y_i), so l_j(Y_i) = delta_ij reads P C = I.
    const Eigen::ColPivHouseholderQR<Matrix> qr(p);
    const Matrix coeffs = qr.solve(Matrix::Identity(basis.size(), basis.size()));
    return LagrangeSet(basis, set.center, set.radius, coeffs);
}

namespace {

Vector uniform_in_ball(RngStream& rng, int d, double radius) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    const double n = v.norm();
    if (n == 0.0) return Vector::Zero(d);
    return v * (radius * std::pow(rng.uniform(), 1.0 / d) / n);
}

Vector project_to_ball(Vector v, double radius) {
    const double n = v.norm();
    if (n > radius) v *= radius / n;
    return v;
}

}  // namespace

double poisedness_constant(const LagrangeSet& lagrange, const Point& ball_center, double ball_radius,
                           std::span<const Point> extra_starts) {
    const PolynomialBasis& basis = lagrange.basis();
    const int d = basis.dimension();
    // Work in the Lagrange set's scaled coordinates, shifted to the ball center.
    const Vector uc = (ball_center - lagrange.center()) / lagrange.radius();
    const double ur = ball_radius / lagrange.radius();

    double best = 0.0;
    if (basis.kind() == BasisKind::linear) {
        for (int j = 0; j < lagrange.size(); ++j) {
            const Vector c = lagrange.coefficients().col(j);
            const double at_center = c[0] + c.segment(1, d).dot(uc);
            best = std::max(best, std::abs(at_center) + ur * c.segment(1, d).norm());
        }
        return best;
    }

    // Shared start points (in shifted coordinates v = u - uc).
    std::vector<Vector> starts;
    RngStream rng(0x243F6A8885A308D3ULL, static_cast<std::uint64_t>(d));
    for (int s = 0; s < 2 * d + 10; ++s) starts.push_back(uniform_in_ball(rng, d, ur));
    for (const auto& y : extra_starts) {
        starts.push_back(project_to_ball((y - lagrange.center()) / lagrange.radius() - uc, ur));
    }

    for (int j = 0; j < lagrange.size(); ++j) {
        double a = 0.0;
        Vector b;
        Matrix h;
        basis.unpack(lagrange.coefficients().col(j), a, b, h);
        // l(uc + v) = a0 + g'v + v'Hv / 2
        const double a0 = a + b.dot(uc) + 0.5 * uc.dot(h * uc);
        const Vector g = b + h * uc;
        auto ell = [&](const Vector& v) { return a0 + quadratic_form_value(g, h, v); };

        for (const double sign : {1.0, -1.0}) {
            const Vector v = minimize_quadratic_on_ball(-sign * g, -sign * h, ur);
            best = std::max(best, std::abs(ell(v)));
        }

        const double lip = std::max(spectral_norm(h), 1e-12);
        for (const auto& v0 : starts) {
            Vector v = v0;
            const double sign = ell(v) >= 0.0 ? 1.0 : -1.0;
            for (int it = 0; it < 30; ++it) {
                const Vector grad = sign * (g + h * v);
                Vector next = project_to_ball(v + grad / lip, ur);
                if ((next - v).norm() <= 1e-6 * ur) {
                    v = std::move(next);
                    break;
                }
                v = std::move(next);
            }
            best = std::max(best, std::abs(ell(v)));
        }
    }
    return best;
}

ReusePlan plan_point_reuse(const PolynomialBasis& basis, const InterpolationSet& stencil,
                           std::span<const Point> pool, double lambda_max, double condition_max) {
    ReusePlan plan;
    plan.set = stencil;
    plan.source.assign(stencil.points.size(), std::nullopt);

    LagrangeSet lag = lagrange_polynomials(basis, plan.set, condition_max);
    plan.lambda_hat = poisedness_constant(lag, stencil.center, stencil.radius);
    std::vector<bool> used(pool.size(), false);
    const double tiny = 1e-8 * stencil.radius;

    for (std::size_t i = 1; i < plan.set.points.size(); ++i) {
        std::optional<std::size_t> best;
        double best_value = 0.5;
        for (std::size_t k = 0; k < pool.size(); ++k) {
            if (used[k]) continue;
            const Point& y = pool[k];
            if (y.size() != stencil.center.size()) continue;
            if ((y - stencil.center).norm() > stencil.radius * (1.0 + 1e-12)) continue;
            bool duplicate = false;
            for (const auto& existing : plan.set.points) {
                if ((existing - y).norm() <= tiny) duplicate = true;
            }
            if (duplicate) continue;
            const double v = std::abs(lag.value(static_cast<int>(i), y));
            if (v > best_value) {
                best_value = v;
                best = k;
            }
        }
        if (!best) continue;

        InterpolationSet trial = plan.set;
        trial.points[i] = pool[*best];
        try {
            LagrangeSet trial_lag = lagrange_polynomials(basis, trial, condition_max);
            const double trial_lambda = poisedness_constant(trial_lag, stencil.center, stencil.radius);
            if (trial_lambda <= lambda_max) {
                plan.set = std::move(trial);
                plan.source[i] = *best;
                used[*best] = true;
                lag = std::move(trial_lag);
                plan.lambda_hat = trial_lambda;
            }
        } catch (const GeometryError&) {
            // keep the stencil point
        }
    }
    return plan;
}

}  // namespace astrodf
