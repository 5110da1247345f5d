#pragma once

#include <Eigen/Dense>

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace astrodf {

using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Counter-based random stream (Philox4x32-10 keyed by the seed, with the
/// stream id occupying the upper half of the counter block).
///
/// Two streams with distinct (seed, stream_id) are independent; the same pair
/// replays the identical sequence bit for bit.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    /// Number of 64-bit words consumed so far.
    std::uint64_t counter() const { return words_used_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    std::uint64_t words_used_ = 0;
    std::optional<double> spare_normal_;
};

/// Running count, mean and centered sum of squares (Welford).
/// variance() divides by n, not n - 1.
class ReplicationStats {
public:
    void push(double value);

    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double m2() const { return m2_; }
    double variance() const { return n_ == 0 ? 0.0 : m2_ / static_cast<double>(n_); }
    /// sqrt(variance / n); +inf below two replicates.
    double standard_error() const;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

ReplicationStats push(ReplicationStats stats, double value);

enum class NoiseFamily { gaussian, uniform };

NoiseFamily parse_noise_family(const std::string& name);
std::string to_string(NoiseFamily family);

struct NoiseModel {
    NoiseFamily family = NoiseFamily::gaussian;
    double sigma = 0.0;

    /// Centered draw with standard deviation sigma.
    double draw(RngStream& rng) const;
};

struct TestProblem {
    std::string name;
    int dimension = 0;
    std::function<double(const Point&)> true_value;
    std::function<Vector(const Point&)> true_gradient;  // diagnostics only, may be empty
    NoiseModel noise;
    std::optional<double> lipschitz_hint;
    Point minimizer;
    double optimal_value = 0.0;
    Point start;
};

/// One Monte Carlo replicate F(x) = f(x) + noise. Bumps the process-wide
/// oracle-call counter.
double observe(const TestProblem& problem, const Point& x, RngStream& rng);

std::uint64_t global_oracle_calls();

struct ProblemOptions {
    int dimension = 2;
    NoiseModel noise;
    /// Ratio of largest to smallest Hessian eigenvalue (noisy-quadratic only).
    double condition = 10.0;
};

class ProblemRegistry {
public:
    using Factory = std::function<TestProblem(const ProblemOptions&)>;

    void add(const std::string& name, Factory factory);
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;
    /// Throws LookupError for unknown names, ConfigError for bad options.
    TestProblem make(const std::string& name, const ProblemOptions& options) const;

private:
    std::map<std::string, Factory> factories_;
};

const ProblemRegistry& builtin_problems();

}  // namespace astrodf
