#include "astrodf/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace astrodf;

namespace {

TestProblem sphere(int d, double sigma, NoiseFamily family = NoiseFamily::gaussian) {
    ProblemOptions o;
    o.dimension = d;
    o.noise = NoiseModel{family, sigma};
    return builtin_problems().make("noisy-sphere", o);
}

// Two-pass reference for mean and divide-by-n variance.
std::pair<double, double> batch_moments(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return {mean, ss / static_cast<double>(v.size())};
}

}  // namespace

TEST_CASE("deterministic sphere returns the exact value") {
    const auto p = sphere(2, 0.0);
    RngStream rng(1, 0);
    Point x(2);
    x << 1.0, 1.0;
    CHECK(observe(p, x, rng) == 2.0);
}

TEST_CASE("gaussian noise is centred") {
    const auto p = sphere(2, 1.0);
    RngStream rng(17, 3);
    const Point x = Point::Zero(2);
    ReplicationStats s;
    for (int i = 0; i < 100000; ++i) s.push(observe(p, x, rng));
    CHECK(std::abs(s.mean()) <= 0.01);
    CHECK(s.variance() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("noise is centred for every builtin at three fixed points") {
    for (const auto& name : builtin_problems().names()) {
        for (const auto family : {NoiseFamily::gaussian, NoiseFamily::uniform}) {
            ProblemOptions o;
            o.dimension = 3;
            o.noise = NoiseModel{family, 2.0};
            const auto p = builtin_problems().make(name, o);
            for (int k = 0; k < 3; ++k) {
                const Point x = Point::Constant(3, 0.5 * k - 0.3);
                RngStream rng(5, static_cast<std::uint64_t>(k));
                ReplicationStats s;
                const int n = 40000;
                for (int i = 0; i < n; ++i) s.push(observe(p, x, rng));
                // 4.5 standard errors of the sample mean.
                CHECK(std::abs(s.mean() - p.true_value(x)) <= 4.5 * 2.0 / std::sqrt(n));
            }
        }
    }
}

TEST_CASE("uniform noise has the configured standard deviation") {
    NoiseModel noise{NoiseFamily::uniform, 0.7};
    RngStream rng(3, 9);
    ReplicationStats s;
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double v = noise.draw(rng);
        s.push(v);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(s.variance() == doctest::Approx(0.49).epsilon(0.02));
    CHECK(hi <= 0.7 * std::sqrt(3.0));
    CHECK(lo >= -0.7 * std::sqrt(3.0));
}

TEST_CASE("same seed and stream replay identically, different streams differ") {
    const auto p = sphere(2, 1.0);
    const Point x = Point::Ones(2);
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 100; ++i) {
        const double va = observe(p, x, a);
        CHECK(va == observe(p, x, b));
        differs_c = differs_c || va != observe(p, x, c);
        differs_d = differs_d || va != observe(p, x, d);
    }
    CHECK(differs_c);
    CHECK(differs_d);
}

TEST_CASE("uniform draws stay in the open unit interval") {
    RngStream rng(0, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
    CHECK(rng.counter() == 100000);
}

TEST_CASE("observe rejects dimension mismatch and counts calls") {
    const auto p = sphere(3, 0.0);
    RngStream rng(1, 1);
    CHECK_THROWS_AS(observe(p, Point::Zero(2), rng), ConfigError);
    const auto before = global_oracle_calls();
    for (int i = 0; i < 37; ++i) observe(p, Point::Zero(3), rng);
    CHECK(global_oracle_calls() - before == 37);
}

TEST_CASE("push examples") {
    ReplicationStats s;
    s = push(s, 1.0);
    s = push(s, 3.0);
    CHECK(s.count() == 2);
    CHECK(s.mean() == 2.0);
    CHECK(s.variance() == 1.0);

    ReplicationStats one;
    one.push(4.2);
    CHECK(one.variance() == 0.0);
    CHECK(std::isinf(one.standard_error()));
}

TEST_CASE("streaming moments match two-pass batch and are shift invariant") {
    RngStream rng(11, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform() * 500);
        const double scale = std::exp(8.0 * rng.uniform() - 4.0);
        const double offset = 1e3 * rng.normal();
        std::vector<double> v;
        ReplicationStats s, shifted;
        for (int i = 0; i < n; ++i) {
            v.push_back(offset + scale * rng.normal());
            s.push(v.back());
            shifted.push(v.back() + 12345.0);
        }
        const auto [mean, var] = batch_moments(v);
        CHECK(s.mean() == doctest::Approx(mean).epsilon(1e-10));
        CHECK(s.variance() == doctest::Approx(var).epsilon(1e-10));
        CHECK(shifted.variance() == doctest::Approx(var).epsilon(1e-8));
        CHECK(s.standard_error() == doctest::Approx(std::sqrt(var / n)).epsilon(1e-10));
    }
}

TEST_CASE("builtin registry") {
    const auto& reg = builtin_problems();
    CHECK(reg.contains("noisy-sphere"));
    CHECK(reg.contains("noisy-quadratic"));
    CHECK(reg.contains("noisy-rosenbrock"));
    CHECK_THROWS_AS(reg.make("foo", ProblemOptions{}), LookupError);

    const auto s = sphere(2, 0.0);
    CHECK(s.minimizer.isZero());
    CHECK(s.optimal_value == 0.0);
    CHECK(s.true_value(s.minimizer) == 0.0);

    const auto r = reg.make("noisy-rosenbrock", ProblemOptions{});
    CHECK(r.minimizer.isApprox(Point::Ones(2)));
    CHECK(r.true_value(r.minimizer) == 0.0);
    CHECK(r.true_value(Point::Zero(2)) == 1.0);
}

TEST_CASE("builtin gradients match central differences and starts have gradient norm 5") {
    for (const auto& name : {"noisy-sphere", "noisy-quadratic"}) {
        for (const int d : {2, 5}) {
            ProblemOptions o;
            o.dimension = d;
            const auto p = builtin_problems().make(name, o);
            CHECK(p.true_gradient(p.start).norm() == doctest::Approx(5.0).epsilon(1e-12));
        }
    }
    for (const auto& name : builtin_problems().names()) {
        ProblemOptions o;
        o.dimension = 3;
        const auto p = builtin_problems().make(name, o);
        const Point x = Point::LinSpaced(3, -0.7, 1.3);
        const Vector g = p.true_gradient(x);
        for (int i = 0; i < 3; ++i) {
            const double h = 1e-6;
            Point a = x, b = x;
            a[i] += h;
            b[i] -= h;
            CHECK(g[i] == doctest::Approx((p.true_value(a) - p.true_value(b)) / (2 * h)).epsilon(1e-5));
        }
    }
}

TEST_CASE("noisy-quadratic condition number") {
    ProblemOptions o;
    o.dimension = 4;
    o.condition = 100.0;
    const auto p = builtin_problems().make("noisy-quadratic", o);
    // Hessian diagonal recovered from the gradient along unit vectors.
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double h = p.true_gradient(Point::Unit(4, i))[i] - p.true_gradient(Point::Zero(4))[i];
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    CHECK(hi / lo == doctest::Approx(100.0));
}

TEST_CASE("noise family parsing") {
    CHECK(parse_noise_family("gaussian") == NoiseFamily::gaussian);
    CHECK(parse_noise_family("uniform") == NoiseFamily::uniform);
    CHECK_THROWS_AS(parse_noise_family("cauchy"), ConfigError);
}
