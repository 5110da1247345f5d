#include "astrodf/ball_quadratic.hpp"

#include <algorithm>
#include <cmath>

namespace astrodf {

double spectral_norm(const Matrix& symmetric) {
    if (symmetric.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Vector minimize_quadratic_on_ball(const Vector& g, const Matrix& H, double radius) {
    const Eigen::Index n = g.size();
    if (n == 0 || !(radius > 0.0)) return Vector::Zero(n);

    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const Vector& lam = es.eigenvalues();  // ascending
    const Matrix& q = es.eigenvectors();
    const Vector gp = q.transpose() * g;

    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    const double eig_tol = 1e-12 * scale;
    const double lmin = lam[0];

    if (lmin > eig_tol) {
        const Vector newton = -gp.cwiseQuotient(lam);
        if (newton.norm() <= radius) return q * newton;
    }

    // Boundary solution s(mu) = -(H + mu I)^{-1} g with mu >= max(0, -lmin).
    const double lo = std::max(0.0, -lmin);
    const double gnorm = g.norm();

    auto step_at = [&](double mu) {
        Vector s(n);
        for (Eigen::Index i = 0; i < n; ++i) s[i] = -gp[i] / (lam[i] + mu);
        return s;
    };

    // Hard case: g has (numerically) no component in the leftmost eigenspace
    // and the shifted step is still interior.
    bool hard = true;
    for (Eigen::Index i = 0; i < n && lam[i] - lmin <= eig_tol; ++i) {
        if (std::abs(gp[i]) > 1e-14 * std::max(gnorm, 1e-300)) hard = false;
    }
    if (gnorm == 0.0) hard = true;
    if (hard && lmin <= eig_tol) {
        Vector s = Vector::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (lam[i] - lmin > eig_tol) s[i] = -gp[i] / (lam[i] + lo);
        }
        const double sn = s.norm();
        if (sn <= radius) {
            s[0] += std::sqrt(std::max(0.0, radius * radius - sn * sn));
            return q * s;
        }
    }

    double left = lo;
    double right = lo + gnorm / radius + eig_tol;
    while (step_at(right).norm() > radius) right = lo + 2.0 * (right - lo);
    for (int it = 0; it < 200 && right - left > 1e-16 * std::max(1.0, right); ++it) {
        const double mid = 0.5 * (left + right);
        if (step_at(mid).norm() > radius) {
            left = mid;
        } else {
            right = mid;
        }
    }
    Vector s = step_at(right);
    const double sn = s.norm();
    if (sn > radius) s *= radius / sn;
    return q * s;
}

}  // namespace astrodf
