#include "astrodf/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace astrodf {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

using Block = std::array<std::uint32_t, 4>;

Block philox4x32_10(Block ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

std::atomic<std::uint64_t> g_oracle_calls{0};

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

void RngStream::refill() {
    const Block ctr = {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                       static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const Block out =
        philox4x32_10(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
    ++block_;
}

std::uint64_t RngStream::next_u64() {
    if (buffered_ == 0) refill();
    ++words_used_;
    return buffer_[2 - buffered_--];
}

double RngStream::uniform() {
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kScale;
}

double RngStream::normal() {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(theta);
    return r * std::cos(theta);
}

void ReplicationStats::push(double value) {
    ++n_;
    const double delta = value - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (value - mean_);
    if (m2_ < 0.0) m2_ = 0.0;
}

double ReplicationStats::standard_error() const {
    if (n_ < 2) return std::numeric_limits<double>::infinity();
    return std::sqrt(variance() / static_cast<double>(n_));
}

ReplicationStats push(ReplicationStats stats, double value) {
    stats.push(value);
    return stats;
}

NoiseFamily parse_noise_family(const std::string& name) {
    if (name == "gaussian") return NoiseFamily::gaussian;
    if (name == "uniform") return NoiseFamily::uniform;
    throw ConfigError("unknown noise family '" + name + "' (expected gaussian or uniform)");
}

std::string to_string(NoiseFamily family) {
    return family == NoiseFamily::gaussian ? "gaussian" : "uniform";
}

double NoiseModel::draw(RngStream& rng) const {
    if (sigma == 0.0) return 0.0;
    switch (family) {
        case NoiseFamily::gaussian:
            return sigma * rng.normal();
        case NoiseFamily::uniform:
            // U(-a, a) has variance a^2 / 3.
            return sigma * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
    }
    return 0.0;
}

double observe(const TestProblem& problem, const Point& x, RngStream& rng) {
    if (x.size() != problem.dimension) {
        throw ConfigError("point has dimension " + std::to_string(x.size()) + ", problem '" + problem.name +
                          "' expects " + std::to_string(problem.dimension));
    }
    g_oracle_calls.fetch_add(1, std::memory_order_relaxed);
    return problem.true_value(x) + problem.noise.draw(rng);
}

std::uint64_t global_oracle_calls() { return g_oracle_calls.load(std::memory_order_relaxed); }

void ProblemRegistry::add(const std::string& name, Factory factory) { factories_[name] = std::move(factory); }

bool ProblemRegistry::contains(const std::string& name) const { return factories_.count(name) != 0; }

std::vector<std::string> ProblemRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : factories_) out.push_back(name);
    return out;
}

TestProblem ProblemRegistry::make(const std::string& name, const ProblemOptions& options) const {
    const auto it = factories_.find(name);
    if (it == factories_.end()) throw LookupError("unknown problem '" + name + "'");
    if (options.dimension < 1) throw ConfigError("problem dimension must be >= 1");
    if (!(options.noise.sigma >= 0.0) || !std::isfinite(options.noise.sigma))
        throw ConfigError("noise sigma must be finite and >= 0");
    return it->second(options);
}

namespace {

TestProblem make_sphere(const ProblemOptions& opt) {
    const int d = opt.dimension;
    TestProblem p;
    p.name = "noisy-sphere";
    p.dimension = d;
    p.true_value = [](const Point& x) { return x.squaredNorm(); };
    p.true_gradient = [](const Point& x) -> Vector { return 2.0 * x; };
    p.noise = opt.noise;
    p.lipschitz_hint = 2.0;
    p.minimizer = Point::Zero(d);
    p.optimal_value = 0.0;
    // ||grad f(start)|| = 5
    p.start = Point::Constant(d, 2.5 / std::sqrt(static_cast<double>(d)));
    return p;
}

TestProblem make_quadratic(const ProblemOptions& opt) {
    const int d = opt.dimension;
    if (!(opt.condition >= 1.0)) throw ConfigError("noisy-quadratic condition must be >= 1");
    Vector diag(d);
    for (int i = 0; i < d; ++i) {
        const double t = d == 1 ? 0.0 : static_cast<double>(i) / (d - 1);
        diag[i] = std::pow(opt.condition, t);
    }
    TestProblem p;
    p.name = "noisy-quadratic";
    p.dimension = d;
    p.true_value = [diag](const Point& x) { return 0.5 * x.dot(diag.cwiseProduct(x)); };
    p.true_gradient = [diag](const Point& x) -> Vector { return diag.cwiseProduct(x); };
    p.noise = opt.noise;
    p.lipschitz_hint = opt.condition;
    p.minimizer = Point::Zero(d);
    p.optimal_value = 0.0;
    p.start = Point::Constant(d, 5.0 / diag.norm());
    return p;
}

TestProblem make_rosenbrock(const ProblemOptions& opt) {
    const int d = opt.dimension;
    if (d < 2) throw ConfigError("noisy-rosenbrock needs dimension >= 2");
    TestProblem p;
    p.name = "noisy-rosenbrock";
    p.dimension = d;
    p.true_value = [](const Point& x) {
        double f = 0.0;
        for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
            const double a = x[i + 1] - x[i] * x[i];
            const double b = 1.0 - x[i];
            f += 100.0 * a * a + b * b;
        }
        return f;
    };
    p.true_gradient = [](const Point& x) -> Vector {
        Vector g = Vector::Zero(x.size());
        for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
            const double a = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * a;
        }
        return g;
    };
    p.noise = opt.noise;
    p.minimizer = Point::Ones(d);
    p.optimal_value = 0.0;
    p.start = Point(d);
    for (int i = 0; i < d; ++i) p.start[i] = (i % 2 == 0) ? -1.2 : 1.0;
    return p;
}

}  // namespace

const ProblemRegistry& builtin_problems() {
    static const ProblemRegistry registry = [] {
        ProblemRegistry r;
        r.add("noisy-sphere", make_sphere);
        r.add("noisy-quadratic", make_quadratic);
        r.add("noisy-rosenbrock", make_rosenbrock);
        return r;
    }();
    return registry;
}

}  // namespace astrodf
