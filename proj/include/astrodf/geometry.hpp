#pragma once

#include "astrodf/oracle.hpp"

#include <optional>
#include <span>
#include <vector>

namespace astrodf {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BasisKind { linear, quadratic };

BasisKind parse_basis_kind(const std::string& name);
std::string to_string(BasisKind kind);

/// Natural polynomial basis.
///   linear:    (1, z1, ..., zd)
///   quadratic: (1, z1, ..., zd, z1^2/2, z1 z2, ..., z1 zd, z2^2/2, z2 z3, ..., zd^2/2)
/// so the quadratic coefficients are literally Hessian entries (upper triangle,
/// row by row).
class PolynomialBasis {
public:
    PolynomialBasis(BasisKind kind, int dimension);

    BasisKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    /// Number of basis functions p.
    int size() const { return size_; }
    int degree() const { return kind_ == BasisKind::linear ? 1 : 2; }

    Vector evaluate(const Vector& z) const;

    /// Split a coefficient vector into value, gradient and Hessian at z = 0.
    void unpack(const Vector& coeffs, double& constant, Vector& gradient, Matrix& hessian) const;

private:
    BasisKind kind_;
    int dim_;
    int size_;
};

/// Design points in B(center; radius); points[0] is the center.
struct InterpolationSet {
    Point center;
    double radius = 1.0;
    std::vector<Point> points;
    /// Optional per-point replicate statistics, parallel to `points`.
    std::vector<ReplicationStats> stats;

    /// (y - center) / radius
    Vector scaled(const Point& y) const { return (y - center) / radius; }
};

/// P(Phi, Y) in raw coordinates: entry (i, j) = phi_j(Y_i).
Matrix interpolation_matrix(const PolynomialBasis& basis, const InterpolationSet& set);

/// Same matrix built from (Y_i - center) / radius.
Matrix scaled_interpolation_matrix(const PolynomialBasis& basis, const InterpolationSet& set);

/// 2-norm condition number (infinity when singular).
double condition_number(const Matrix& m);

/// Coordinate stencil: {x0} + {x0 + r e_i} (linear), or
/// {x0} + {x0 +- r e_i} + {x0 + (r / sqrt 2)(e_i + e_j), i < j} (quadratic).
InterpolationSet default_poised_set(const Point& center, double radius, const PolynomialBasis& basis);

/// The default stencil under a random rotation about the center.
InterpolationSet rotated_poised_set(const Point& center, double radius, const PolynomialBasis& basis,
                                    RngStream& rng);

/// Lagrange polynomials of a poised set, with coefficients expressed in the
/// basis evaluated at scaled coordinates (z - center) / radius.
class LagrangeSet {
public:
    LagrangeSet(PolynomialBasis basis, Point center, double radius, Matrix coefficients);

    const PolynomialBasis& basis() const { return basis_; }
    const Point& center() const { return center_; }
    double radius() const { return radius_; }
    /// Column j holds the coefficients of l_j.
    const Matrix& coefficients() const { return coeffs_; }
    int size() const { return static_cast<int>(coeffs_.cols()); }

    double value(int j, const Point& z) const;
    /// (l_1(z), ..., l_p(z))
    Vector values(const Point& z) const;

private:
    PolynomialBasis basis_;
    Point center_;
    double radius_;
    Matrix coeffs_;
};

inline constexpr double kDefaultConditionMax = 1e8;

/// Solves P C = I in scaled coordinates, so column j of C holds l_j. Throws
/// GeometryError when the scaled interpolation matrix has condition above
/// `condition_max`.
LagrangeSet lagrange_polynomials(const PolynomialBasis& basis, const InterpolationSet& set,
                                 double condition_max = kDefaultConditionMax);

/// Lower estimate of max_j max_{z in ball} |l_j(z)|. Exact for linear
/// polynomials; for quadratics combines the global ball maximizer (eigen-step)
/// with multistart projected ascent from 2d + 10 interior starts and the
/// interpolation points themselves.
double poisedness_constant(const LagrangeSet& lagrange, const Point& ball_center, double ball_radius,
                           std::span<const Point> extra_starts = {});

struct ReusePlan {
    InterpolationSet set;
    /// source[i] is the pool index that replaced stencil point i, if any.
    std::vector<std::optional<std::size_t>> source;
    double lambda_hat = 0.0;
};

/// Greedily swaps stencil points (never the center) for already-evaluated
/// pool points inside the ball when the swap keeps the set poised with
/// Lambda-hat <= lambda_max.
ReusePlan plan_point_reuse(const PolynomialBasis& basis, const InterpolationSet& stencil,
                           std::span<const Point> pool, double lambda_max,
                           double condition_max = kDefaultConditionMax);

}  // namespace astrodf
