#include "astrodf/ball_quadratic.hpp"
#include "astrodf/subproblem.hpp"

#include <doctest.h>

#include <cmath>

using namespace astrodf;

namespace {

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

// Brute-force best decrease over a polar grid of the ball (independent of the solver).
double polar_brute_force(const Vector& g, const Matrix& H, double delta) {
    double best = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double rho = delta * i / 400.0;
        for (int j = 0; j < 1440; ++j) {
            const double th = 2.0 * M_PI * j / 1440.0;
            const Vector s = v2(rho * std::cos(th), rho * std::sin(th));
            best = std::max(best, -(g.dot(s) + 0.5 * s.dot(H * s)));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("cauchy step examples") {
    const Matrix H = 2.0 * Matrix::Identity(2, 2);
    const Step st = cauchy_step(v2(2, 0), H, 0.5);
    CHECK(st.s.isApprox(v2(-0.5, 0)));
    CHECK(st.predicted_decrease == doctest::Approx(0.75));
    CHECK(cauchy_floor(v2(2, 0), H, 0.5, 1.0) == doctest::Approx(0.5));
    CHECK(check_cauchy(v2(2, 0), H, st, 0.5, 1.0));

    const Step lin = cauchy_step(v2(1, 1), Matrix::Zero(2, 2), 1.0);
    CHECK(lin.s.isApprox(-v2(1, 1) / std::sqrt(2.0)));
    CHECK(lin.predicted_decrease == doctest::Approx(std::sqrt(2.0)));

    const Step zero = cauchy_step(v2(0, 0), H, 1.0);
    CHECK(zero.s.isZero());
    CHECK(zero.predicted_decrease == 0.0);
}

TEST_CASE("interior cauchy point") {
    // Along -g the model is 1-d: -t|g| + t^2 g'Hg / (2|g|^2); minimizer t = |g|^3 / g'Hg.
    const Vector g = v2(1, 0);
    const Matrix H = 4.0 * Matrix::Identity(2, 2);
    const Step st = cauchy_step(g, H, 10.0);
    CHECK(st.s.norm() == doctest::Approx(0.25));
    CHECK(st.predicted_decrease == doctest::Approx(0.125));
}

TEST_CASE("zero step fails the cauchy check") {
    const Step zero{Vector::Zero(2), 0.0, 0.0};
    CHECK_FALSE(check_cauchy(v2(1, 0), Matrix::Identity(2, 2), zero, 1.0, 0.5));
}

TEST_CASE("positive definite with interior Newton point returns the Newton point") {
    Matrix H(2, 2);
    H << 3, 1, 1, 2;
    const Vector g = v2(0.3, -0.2);
    const Step st = solve(g, H, 5.0);
    const Vector newton = -H.ldlt().solve(g);
    CHECK((st.s - newton).norm() < 1e-10);
    CHECK(st.predicted_decrease >= cauchy_step(g, H, 5.0).predicted_decrease);
}

TEST_CASE("random indefinite instances satisfy the floor and match brute force") {
    RngStream rng(1234, 0);
    for (int t = 0; t < 100; ++t) {
        const Vector g = v2(rng.normal(), rng.normal());
        const double th = 2 * M_PI * rng.uniform();
        Matrix q(2, 2);
        q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        const Matrix H = q * v2(1.0, -1.0).asDiagonal() * q.transpose();
        const double delta = 0.1 + 2.0 * rng.uniform();
        const Step st = solve(g, H, delta);
        CHECK(st.s.norm() <= delta * (1 + 1e-12));
        CHECK(st.predicted_decrease >= st.cauchy_decrease_floor - 1e-10);
        CHECK(check_cauchy(g, H, st, delta, 0.5));
        CHECK(st.predicted_decrease >= 0.95 * polar_brute_force(g, H, delta));
    }
}

TEST_CASE("ball minimizer handles the hard case") {
    // g orthogonal to the leftmost eigenvector; the minimizer sits on the boundary.
    Matrix H(2, 2);
    H << -2, 0, 0, 1;
    const Vector g = v2(0, 0.5);
    const Vector s = minimize_quadratic_on_ball(g, H, 1.0);
    CHECK(s.norm() == doctest::Approx(1.0));
    CHECK(quadratic_form_value(g, H, s) <= -(polar_brute_force(g, H, 1.0)) + 1e-6);
}

TEST_CASE("scaling g and H scales the cauchy decrease") {
    Matrix H(2, 2);
    H << 1, 0.5, 0.5, -0.3;
    const Vector g = v2(1.0, -2.0);
    const Step a = cauchy_step(g, H, 0.7);
    const Step b = cauchy_step(3.0 * g, 3.0 * H, 0.7);
    CHECK(b.predicted_decrease == doctest::Approx(3.0 * a.predicted_decrease));
    CHECK(b.s.norm() == doctest::Approx(a.s.norm()));
}

TEST_CASE("solve always respects the ball in higher dimensions") {
    RngStream rng(77, 0);
    for (int t = 0; t < 200; ++t) {
        const int d = 2 + t % 9;
        Vector g(d);
        Matrix a(d, d);
        for (int i = 0; i < d; ++i) {
            g[i] = rng.normal();
            for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
        }
        const Matrix H = 0.5 * (a + a.transpose());
        const double delta = std::exp(rng.normal());
        const Step st = solve(g, H, delta);
        CHECK(st.s.norm() <= delta * (1 + 1e-12));
        CHECK(check_cauchy(g, H, st, delta, 0.5));
        CHECK(st.predicted_decrease == doctest::Approx(predicted_decrease(g, H, st.s)));
    }
}
