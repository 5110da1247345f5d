#include "astrodf/cli/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace astrodf::cli {

ConfigParseError::ConfigParseError(std::size_t line_no, std::string key_name, const std::string& message)
    : ConfigError(line_no > 0 ? fmt::format("line {}: key '{}': {}", line_no, key_name, message)
                              : fmt::format("key '{}': {}", key_name, message)),
      line(line_no),
      key(std::move(key_name)) {}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, sep)) out.push_back(trim(cell));
    return out;
}

double to_double(const std::string& v) {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
}

std::uint64_t to_u64(const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument(v);
    return out;
}

int to_int(const std::string& v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument(v);
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument(v);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"problem.name", [](auto& c, const auto& v) { c.problem = v; }},
        {"problem.dim", [](auto& c, const auto& v) { c.problem_options.dimension = to_int(v); }},
        {"problem.noise", [](auto& c, const auto& v) { c.problem_options.noise.family = parse_noise_family(v); }},
        {"problem.sigma", [](auto& c, const auto& v) { c.problem_options.noise.sigma = to_double(v); }},
        {"problem.condition", [](auto& c, const auto& v) { c.problem_options.condition = to_double(v); }},
        {"problem.x0",
         [](auto& c, const auto& v) {
             const auto parts = split(v, ',');
             Point x(static_cast<Eigen::Index>(parts.size()));
             for (std::size_t i = 0; i < parts.size(); ++i) x[static_cast<Eigen::Index>(i)] = to_double(parts[i]);
             c.x0 = x;
         }},
        {"solver.delta0", [](auto& c, const auto& v) { c.solver.delta0 = to_double(v); }},
        {"solver.delta_max", [](auto& c, const auto& v) { c.solver.delta_max = to_double(v); }},
        {"solver.eta1", [](auto& c, const auto& v) { c.solver.eta1 = to_double(v); }},
        {"solver.gamma1", [](auto& c, const auto& v) { c.solver.gamma1 = to_double(v); }},
        {"solver.gamma2", [](auto& c, const auto& v) { c.solver.gamma2 = to_double(v); }},
        {"solver.w", [](auto& c, const auto& v) { c.solver.w = to_double(v); }},
        {"solver.mu", [](auto& c, const auto& v) { c.solver.mu = to_double(v); }},
        {"solver.beta", [](auto& c, const auto& v) { c.solver.beta = to_double(v); }},
        {"solver.kappa_ias", [](auto& c, const auto& v) { c.solver.kappa_ias = to_double(v); }},
        {"solver.kappa_oas", [](auto& c, const auto& v) { c.solver.kappa_oas = to_double(v); }},
        {"solver.lambda0", [](auto& c, const auto& v) { c.solver.lambda_schedule.lambda0 = to_u64(v); }},
        {"solver.lambda_eps", [](auto& c, const auto& v) { c.solver.lambda_schedule.epsilon = to_double(v); }},
        {"solver.kappa_fcd", [](auto& c, const auto& v) { c.solver.kappa_fcd = to_double(v); }},
        {"solver.basis", [](auto& c, const auto& v) { c.solver.basis = parse_basis_kind(v); }},
        {"solver.budget", [](auto& c, const auto& v) { c.solver.budget = to_u64(v); }},
        {"solver.delta_min", [](auto& c, const auto& v) { c.solver.delta_min = to_double(v); }},
        {"solver.j_max", [](auto& c, const auto& v) { c.solver.j_max = to_int(v); }},
        {"solver.kappa_bhm", [](auto& c, const auto& v) { c.solver.kappa_bhm = to_double(v); }},
        {"solver.point_reuse", [](auto& c, const auto& v) { c.solver.point_reuse = to_bool(v); }},
        {"solver.lambda_max", [](auto& c, const auto& v) { c.solver.lambda_max = to_double(v); }},
        {"solver.condition_max", [](auto& c, const auto& v) { c.solver.condition_max = to_double(v); }},
        {"solver.batch_growth", [](auto& c, const auto& v) { c.solver.batch_growth = to_bool(v); }},
        {"solver.sample_cap",
         [](auto& c, const auto& v) {
             if (v == "none") {
                 c.solver.sample_cap.reset();
             } else {
                 c.solver.sample_cap = to_u64(v);
             }
         }},
        {"seeds", [](auto& c, const auto& v) { c.seeds = parse_seed_list(v); }},
        {"output", [](auto& c, const auto& v) { c.output_dir = v; }},
        {"parallel", [](auto& c, const auto& v) { c.parallel = to_int(v); }},
    };
    return table;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    for (const auto& part : split(csv, ',')) {
        if (part.empty()) continue;
        seeds.push_back(to_u64(part));
    }
    if (seeds.empty()) throw std::invalid_argument("empty seed list");
    return seeds;
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value, std::size_t line) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigParseError(line, key, "unknown key");
    try {
        it->second(config, value);
    } catch (const ConfigError& e) {
        throw ConfigParseError(line, key, e.what());
    } catch (const std::exception&) {
        throw ConfigParseError(line, key, "invalid value '" + value + "'");
    }
}

ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig config;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigParseError(line_no, line, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigParseError(line_no, key, "empty key");
        apply_setting(config, key, value, line_no);
    }
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_experiment_config(in);
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw ConfigParseError(0, "seeds", "at least one seed is required");
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw ConfigParseError(0, "seeds", "seeds must be distinct");
    if (parallel < 1) throw ConfigParseError(0, "parallel", "must be >= 1");
    if (problem_options.dimension < 1) throw ConfigParseError(0, "problem.dim", "must be >= 1");
    if (!(problem_options.noise.sigma >= 0.0)) throw ConfigParseError(0, "problem.sigma", "must be >= 0");
    if (x0 && x0->size() != problem_options.dimension) {
        throw ConfigParseError(0, "problem.x0", "length does not match problem.dim");
    }
    solver.validate();
}

void write_experiment_config(std::ostream& out, const ExperimentConfig& c) {
    const SolverConfig& s = c.solver;
    out << "# effective configuration\n";
    out << "problem.name = " << c.problem << '\n';
    out << "problem.dim = " << c.problem_options.dimension << '\n';
    out << "problem.noise = " << to_string(c.problem_options.noise.family) << '\n';
    out << "problem.sigma = " << num(c.problem_options.noise.sigma) << '\n';
    out << "problem.condition = " << num(c.problem_options.condition) << '\n';
    if (c.x0) {
        out << "problem.x0 = ";
        for (Eigen::Index i = 0; i < c.x0->size(); ++i) out << (i ? "," : "") << num((*c.x0)[i]);
        out << '\n';
    }
    out << "solver.delta0 = " << num(s.delta0) << '\n';
    out << "solver.delta_max = " << num(s.delta_max) << '\n';
    out << "solver.eta1 = " << num(s.eta1) << '\n';
    out << "solver.gamma1 = " << num(s.gamma1) << '\n';
    out << "solver.gamma2 = " << num(s.gamma2) << '\n';
    out << "solver.w = " << num(s.w) << '\n';
    out << "solver.mu = " << num(s.mu) << '\n';
    out << "solver.beta = " << num(s.beta) << '\n';
    out << "solver.kappa_ias = " << num(s.kappa_ias) << '\n';
    out << "solver.kappa_oas = " << num(s.kappa_oas) << '\n';
    out << "solver.lambda0 = " << s.lambda_schedule.lambda0 << '\n';
    out << "solver.lambda_eps = " << num(s.lambda_schedule.epsilon) << '\n';
    out << "solver.kappa_fcd = " << num(s.kappa_fcd) << '\n';
    out << "solver.basis = " << to_string(s.basis) << '\n';
    out << "solver.budget = " << s.budget << '\n';
    out << "solver.delta_min = " << num(s.delta_min) << '\n';
    out << "solver.j_max = " << s.j_max << '\n';
    out << "solver.kappa_bhm = " << num(s.kappa_bhm) << '\n';
    out << "solver.point_reuse = " << (s.point_reuse ? "true" : "false") << '\n';
    out << "solver.lambda_max = " << num(s.lambda_max) << '\n';
    out << "solver.condition_max = " << num(s.condition_max) << '\n';
    out << "solver.batch_growth = " << (s.batch_growth ? "true" : "false") << '\n';
    out << "solver.sample_cap = " << (s.sample_cap ? std::to_string(*s.sample_cap) : std::string("none")) << '\n';
    out << "seeds = ";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) out << (i ? "," : "") << c.seeds[i];
    out << '\n';
    out << "output = " << c.output_dir << '\n';
    out << "parallel = " << c.parallel << '\n';
}

}  // namespace astrodf::cli
