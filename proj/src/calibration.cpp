#include "astrodf/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace astrodf {

ScalingReport model_error_scaling(const TestProblem& problem, const Point& center, BasisKind kind,
                                  const std::vector<double>& radii, int probes, std::uint64_t seed) {
    const PolynomialBasis basis(kind, problem.dimension);
    const int d = problem.dimension;
    ScalingReport report;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const double r : radii) {
        const InterpolationSet set = default_poised_set(center, r, basis);
        std::vector<double> values;
        for (const auto& y : set.points) values.push_back(problem.true_value(y));
        const LocalModel m = fit(basis, set, values);

        // Same probe directions at every radius.
        RngStream rng(seed, 0);
        double worst = 0.0;
        for (int k = 0; k < probes; ++k) {
            Vector v(d);
            for (int i = 0; i < d; ++i) v[i] = rng.normal();
            const double u = rng.uniform();
            const double vn = v.norm();
            if (vn == 0.0) continue;
            const double scale = (k % 2 == 0) ? 1.0 : std::pow(u, 1.0 / d);
            const Point z = center + v * (r * scale / vn);
            worst = std::max(worst, std::abs(problem.true_value(z) - m.eval(z)));
        }
        ScalingRow row;
        row.radius = r;
        row.max_error = worst;
        row.scaled_error = worst / std::pow(r, basis.degree() + 1);
        lo = std::min(lo, row.scaled_error);
        hi = std::max(hi, row.scaled_error);
        report.rows.push_back(row);
    }
    report.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return report;
}

ErrorBoundTrials error_bound_trials(int trials, std::span<const int> dims, std::span<const BasisKind> kinds,
                                    double error_scale, int probes, std::uint64_t seed) {
    ErrorBoundTrials out;
    out.trials = trials;
    out.probes = probes;
    if (dims.empty() || kinds.empty()) throw ConfigError("error_bound_trials needs dimensions and basis kinds");
    for (int t = 0; t < trials; ++t) {
        const int d = dims[static_cast<std::size_t>(t) % dims.size()];
        const BasisKind kind = kinds[(static_cast<std::size_t>(t) / dims.size()) % kinds.size()];
        const PolynomialBasis basis(kind, d);
        RngStream rng(seed, static_cast<std::uint64_t>(t));

        Point center(d);
        for (int i = 0; i < d; ++i) center[i] = 2.0 * rng.normal();
        const double radius = std::exp(-3.0 + 4.0 * rng.uniform());

        InterpolationSet set;
        for (int attempt = 0;; ++attempt) {
            set = rotated_poised_set(center, radius, basis, rng);
            for (std::size_t i = 1; i < set.points.size(); ++i) {
                Vector jitter(d);
                for (int c = 0; c < d; ++c) jitter[c] = rng.normal();
                Vector y = set.points[i] - center + 0.3 * radius * jitter;
                if (y.norm() > radius) y *= radius / y.norm();
                set.points[i] = center + y;
            }
            if (condition_number(scaled_interpolation_matrix(basis, set)) <= kDefaultConditionMax) break;
            if (attempt > 20) throw GeometryError("could not draw a poised random set");
        }

        // Random quadratic truth.
        const double c0 = rng.normal();
        Vector b(d);
        for (int i = 0; i < d; ++i) b[i] = rng.normal();
        Matrix a(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
        }
        const Matrix sym = 0.5 * (a + a.transpose());
        auto truth = [=](const Point& z) { return c0 + b.dot(z) + 0.5 * z.dot(sym * z); };

        std::vector<double> estimates;
        set.stats.clear();
        for (const auto& y : set.points) {
            const double e = error_scale * (2.0 * rng.uniform() - 1.0);
            ReplicationStats s;
            s.push(truth(y) + e);
            set.stats.push_back(s);
            estimates.push_back(s.mean());
        }
        const LocalModel model = fit(basis, set, estimates, std::numeric_limits<double>::infinity());
        const ModelDiagnostics diag =
            error_bound_report(model, set, truth, {}, probes, seed ^ static_cast<std::uint64_t>(t));
        out.violations += diag.violations;
        if (diag.bound_rhs > 0.0) out.worst_ratio = std::max(out.worst_ratio, diag.max_abs_deviation / diag.bound_rhs);
        out.max_lambda_hat = std::max(out.max_lambda_hat, diag.lambda_hat);
    }
    return out;
}

}  // namespace astrodf
