#include "astrodf/solver.hpp"

#include "astrodf/ball_quadratic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace astrodf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid solver config: ") + what);
}

std::size_t pool_capacity(const SolverConfig& config, int dimension) {
    return 20 * static_cast<std::size_t>(PolynomialBasis(config.basis, dimension).size());
}

void add_to_pool(SolverState& state, SampledPoint point, const SolverConfig& config) {
    if (!config.point_reuse) return;
    const auto cap = pool_capacity(config, static_cast<int>(point.x.size()));
    state.pool.push_back(std::move(point));
    while (state.pool.size() > cap) state.pool.pop_front();
}

SampledPoint fresh_point(SolverState& state, const Point& x, const SolverConfig& config) {
    return SampledPoint{x, {}, RngStream(config.seed, state.next_stream++)};
}

SamplingRule make_rule(double kappa, std::uint64_t lambda_k, double radius, const SolverConfig& config) {
    SamplingRule rule;
    rule.kappa = kappa;
    rule.lambda_k = lambda_k;
    rule.delta = radius;
    rule.cap = config.sample_cap;
    rule.batch_growth = config.batch_growth;
    return rule;
}

/// Returns false if the budget ran out.
bool sample(SampledPoint& point, const SamplingRule& rule, const TestProblem& problem, CallBudget& budget) {
    auto res = sample_to_stopping(point.x, point.stats, rule, problem, point.rng, budget);
    point.stats = res.stats;
    return !res.truncated;
}

}  // namespace

void SolverConfig::validate() const {
    require(delta0 > 0.0, "delta0 must be > 0");
    require(delta_max >= delta0, "delta_max must be >= delta0");
    require(eta1 > 0.0 && eta1 < 1.0, "eta1 must lie in (0, 1)");
    require(gamma1 > 1.0, "gamma1 must be > 1");
    require(gamma2 > 0.0 && gamma2 < 1.0, "gamma2 must lie in (0, 1)");
    require(w > 0.0 && w < 1.0, "w must lie in (0, 1)");
    require(mu > 0.0, "mu must be > 0");
    require(beta > 0.0 && beta < mu, "beta must satisfy 0 < beta < mu");
    require(kappa_ias > 0.0, "kappa_ias must be > 0");
    require(kappa_oas > 0.0, "kappa_oas must be > 0");
    require(lambda_schedule.lambda0 >= 2, "lambda0 must be >= 2");
    require(lambda_schedule.epsilon > 0.0, "lambda_eps must be > 0");
    require(kappa_fcd > 0.0 && kappa_fcd <= 1.0, "kappa_fcd must lie in (0, 1]");
    require(delta_min > 0.0, "delta_min must be > 0");
    require(j_max >= 1, "j_max must be >= 1");
    require(kappa_bhm > 0.0, "kappa_bhm must be > 0");
    require(lambda_max >= 1.0, "lambda_max must be >= 1");
    require(condition_max > 1.0, "condition_max must be > 1");
    require(!sample_cap || *sample_cap >= 2, "sample_cap must be >= 2");
}

SolverState initial_state(const TestProblem& problem, const Point& x0, const SolverConfig& config) {
    config.validate();
    if (x0.size() != problem.dimension) throw ConfigError("x0 dimension does not match the problem");
    if (!x0.allFinite()) throw ConfigError("x0 must be finite");
    SolverState state;
    state.incumbent = SampledPoint{x0, {}, RngStream(config.seed, 0)};
    state.delta_tilde = config.delta0;
    state.last_delta = config.delta0;
    state.sample_set.center = x0;
    state.sample_set.radius = config.delta0;
    state.sample_set.points = {x0};
    state.budget = CallBudget(config.budget);
    return state;
}

ModelConstruction adaptive_model_construction(SolverState& state, const TestProblem& problem,
                                              const SolverConfig& config) {
    if (!(state.delta_tilde > 0.0)) throw ConfigError("candidate radius must be > 0");
    const PolynomialBasis basis(config.basis, problem.dimension);
    const std::uint64_t lambda_k = lambda_at(config.lambda_schedule, state.k);
    const Point& center = state.incumbent.x;

    ModelConstruction out;
    std::vector<SampledPoint> previous;
    for (int j = 1;; ++j) {
        const double radius = state.delta_tilde * std::pow(config.w, j - 1);
        out.j_k = j;
        out.radius = radius;

        // Off-center points from the last pass become reuse candidates.
        for (auto& p : previous) add_to_pool(state, std::move(p), config);
        previous.clear();

        InterpolationSet set = default_poised_set(center, radius, basis);
        std::vector<SampledPoint> members;
        bool stencil_geometry = true;
        if (config.point_reuse && !state.pool.empty()) {
            std::vector<Point> pool_points;
            for (const auto& p : state.pool) pool_points.push_back(p.x);
            const ReusePlan plan = plan_point_reuse(basis, set, pool_points, config.lambda_max, config.condition_max);
            set = plan.set;
            std::vector<bool> taken(state.pool.size(), false);
            for (std::size_t i = 1; i < set.points.size(); ++i) {
                if (plan.source[i]) {
                    members.push_back(state.pool[*plan.source[i]]);
                    taken[*plan.source[i]] = true;
                    stencil_geometry = false;
                } else {
                    members.push_back(fresh_point(state, set.points[i], config));
                }
            }
            std::deque<SampledPoint> kept;
            for (std::size_t i = 0; i < state.pool.size(); ++i) {
                if (!taken[i]) kept.push_back(std::move(state.pool[i]));
            }
            state.pool = std::move(kept);
        } else {
            for (std::size_t i = 1; i < set.points.size(); ++i) {
                members.push_back(fresh_point(state, set.points[i], config));
            }
        }

        const SamplingRule rule = make_rule(config.kappa_ias, lambda_k, radius, config);
        bool ok = sample(state.incumbent, rule, problem, state.budget);
        for (auto& m : members) {
            if (!ok) break;
            ok = sample(m, rule, problem, state.budget);
        }
        if (!ok) {
            out.truncated = true;
            out.set = std::move(set);
            return out;
        }

        set.stats.clear();
        set.stats.push_back(state.incumbent.stats);
        for (const auto& m : members) set.stats.push_back(m.stats);
        std::vector<double> estimates;
        for (const auto& s : set.stats) estimates.push_back(s.mean());

        std::optional<LocalModel> model;
        try {
            model = fit(basis, set, estimates, config.condition_max);
        } catch (const GeometryError&) {
            // Reused points spoiled the geometry; resample a rotated stencil.
            RngStream jitter(config.seed ^ 0xA5A5A5A5ULL, state.next_stream++);
            set = rotated_poised_set(center, radius, basis, jitter);
            members.clear();
            for (std::size_t i = 1; i < set.points.size(); ++i) {
                members.push_back(fresh_point(state, set.points[i], config));
            }
            for (auto& m : members) {
                if (!sample(m, rule, problem, state.budget)) {
                    out.truncated = true;
                    out.set = std::move(set);
                    return out;
                }
            }
            set.stats.assign(1, state.incumbent.stats);
            estimates.assign(1, state.incumbent.stats.mean());
            for (const auto& m : members) {
                set.stats.push_back(m.stats);
                estimates.push_back(m.stats.mean());
            }
            model = fit(basis, set, estimates, config.condition_max);
            stencil_geometry = false;
        }

        const double gnorm = model->gradient().norm();
        out.model = std::move(model);
        out.set = std::move(set);
        previous = std::move(members);

        const bool balanced = radius <= config.mu * gnorm;
        if (!balanced) {
            if (radius < config.delta_min) out.below_delta_min = true;
            if (j >= config.j_max) out.hit_j_max = true;
        }
        if (balanced || out.below_delta_min || out.hit_j_max) {
            out.delta_k = std::min(state.delta_tilde, std::max(config.beta * gnorm, radius));
            if (stencil_geometry) {
                // The coordinate stencil's Lambda is scale invariant: compute once.
                if (!state.stencil_lambda_hat) {
                    const LagrangeSet lag = lagrange_polynomials(basis, out.set, config.condition_max);
                    state.stencil_lambda_hat = poisedness_constant(lag, out.set.center, out.set.radius, out.set.points);
                }
                out.lambda_hat = *state.stencil_lambda_hat;
            } else {
                const LagrangeSet lag = lagrange_polynomials(basis, out.set, config.condition_max);
                out.lambda_hat = poisedness_constant(lag, out.set.center, out.set.radius, out.set.points);
            }
            for (auto& p : previous) add_to_pool(state, std::move(p), config);
            return out;
        }
    }
}

double success_ratio(double f_bar_center, double f_bar_candidate, const LocalModel& model, const Point& candidate) {
    const double predicted = model.value_at_center() - model.eval(candidate);
    if (!(predicted > 0.0)) throw std::domain_error("non-positive predicted decrease");
    return (f_bar_center - f_bar_candidate) / predicted;
}

double update_trust_region(double rho_hat, double eta1, double delta_k, double gamma1, double gamma2,
                           double delta_max) {
    if (!(delta_k > 0.0)) throw ConfigError("trust-region radius must be > 0");
    if (rho_hat > eta1) return std::min(gamma1 * delta_k, delta_max);
    return gamma2 * delta_k;
}

void iterate(SolverState& state, const TestProblem& problem, const SolverConfig& config) {
    if (state.finished) return;
    if (state.budget.exhausted()) {
        state.finished = true;
        state.termination_reason = "budget";
        return;
    }

    IterationRecord rec;
    rec.k = state.k;
    const std::uint64_t lambda_k = lambda_at(config.lambda_schedule, state.k);

    auto finish_truncated = [&](double delta_k) {
        rec.x = state.incumbent.x;
        rec.f_bar = state.incumbent.stats.mean();
        rec.f_true = problem.true_value(rec.x);
        rec.delta_k = delta_k;
        rec.rho_hat = kNaN;
        rec.success = false;
        rec.n_center = state.incumbent.stats.count();
        rec.cum_calls = state.cumulative_calls();
        state.trace.push_back(rec);
        state.finished = true;
        state.termination_reason = "budget";
    };

    ModelConstruction mc = adaptive_model_construction(state, problem, config);
    rec.j_k = mc.j_k;
    rec.lambda_hat = mc.lambda_hat;
    if (mc.truncated) {
        rec.model_grad_norm = kNaN;
        rec.hessian_norm = kNaN;
        rec.lambda_hat = kNaN;
        finish_truncated(mc.radius);
        return;
    }
    if (mc.below_delta_min) {
        state.finished = true;
        state.termination_reason = "criticality-stall";
        return;
    }

    const LocalModel& model = *mc.model;
    const double delta_k = mc.delta_k;
    state.last_delta = delta_k;
    state.sample_set = mc.set;
    rec.model_grad_norm = model.gradient().norm();
    rec.hessian_norm = spectral_norm(model.hessian());
    if (rec.hessian_norm > config.kappa_bhm) ++state.hessian_warnings;
    const std::uint64_t n_center = state.incumbent.stats.count();
    rec.n_center = n_center;

    const Step step = solve(model, delta_k, SubproblemOptions{config.kappa_fcd});
    if (!check_cauchy(model, step, delta_k, config.kappa_fcd)) {
        throw std::logic_error("trust-region step violates the Cauchy decrease floor");
    }

    SampledPoint candidate = fresh_point(state, state.incumbent.x + step.s, config);
    const bool ok = sample(candidate, make_rule(config.kappa_oas, lambda_k, delta_k, config), problem, state.budget);
    rec.n_candidate = candidate.stats.count();
    if (!ok) {
        finish_truncated(delta_k);
        return;
    }

    double rho = kNaN;
    bool success = false;
    if (step.predicted_decrease > 0.0) {
        rho = (state.incumbent.stats.mean() - candidate.stats.mean()) / step.predicted_decrease;
        success = rho > config.eta1;
    } else {
        ++state.degenerate_iterations;
    }

    if (success) {
        state.delta_tilde = std::min(config.gamma1 * delta_k, config.delta_max);
        add_to_pool(state, std::move(state.incumbent), config);
        state.incumbent = std::move(candidate);
    } else {
        state.delta_tilde = config.gamma2 * delta_k;
        add_to_pool(state, std::move(candidate), config);
    }

    rec.x = state.incumbent.x;
    rec.f_bar = state.incumbent.stats.mean();
    rec.f_true = problem.true_value(rec.x);
    rec.delta_k = delta_k;
    rec.rho_hat = rho;
    rec.success = success;
    rec.cum_calls = state.cumulative_calls();
    state.trace.push_back(rec);
    ++state.k;

    if (state.delta_tilde < config.delta_min) {
        state.finished = true;
        state.termination_reason = "delta-min";
    } else if (state.budget.exhausted()) {
        state.finished = true;
        state.termination_reason = "budget";
    }
}

RunResult run(const TestProblem& problem, const Point& x0, const SolverConfig& config) {
    RunResult result{initial_state(problem, x0, config), {}};
    SolverState& state = result.state;
    while (!state.finished) iterate(state, problem, config);

    RunSummary& s = result.summary;
    s.final_x = state.incumbent.x;
    s.final_f_bar = state.incumbent.stats.count() > 0 ? state.incumbent.stats.mean() : kNaN;
    s.final_f_true = problem.true_value(s.final_x);
    s.final_grad_norm = problem.true_gradient ? problem.true_gradient(s.final_x).norm() : kNaN;
    s.total_calls = state.cumulative_calls();
    s.iterations = state.trace.size();
    s.termination_reason = state.termination_reason;
    s.hessian_warnings = state.hessian_warnings;
    return result;
}

RunResult run(const TestProblem& problem, const SolverConfig& config) { return run(problem, problem.start, config); }

}  // namespace astrodf
