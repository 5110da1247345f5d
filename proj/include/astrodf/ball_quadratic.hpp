#pragma once

#include "astrodf/oracle.hpp"

namespace astrodf {

/// Global minimizer of g's + 0.5 s'Hs subject to ||s|| <= radius, via the
/// eigendecomposition of H and bisection on the secular equation. Handles
/// the hard case (g orthogonal to the leftmost eigenspace).
Vector minimize_quadratic_on_ball(const Vector& g, const Matrix& H, double radius);

/// g's + 0.5 s'Hs
inline double quadratic_form_value(const Vector& g, const Matrix& H, const Vector& s) {
    return g.dot(s) + 0.5 * s.dot(H * s);
}

/// Largest absolute eigenvalue of a symmetric matrix (spectral norm).
double spectral_norm(const Matrix& symmetric);

}  // namespace astrodf
