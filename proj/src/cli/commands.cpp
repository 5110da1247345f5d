#include "astrodf/cli/commands.hpp"

#include "astrodf/calibration.hpp"
#include "astrodf/cli/stats_table.hpp"

#include <fmt/format.h>
#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace astrodf::cli {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t");
        const auto e = cell.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(cell.substr(b, e - b + 1));
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const auto& part : split_list(s)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("{}: '{}' is not a number", what, part));
        }
    }
    if (out.empty()) throw ConfigError(fmt::format("{}: empty list", what));
    return out;
}

/// Routes output to a file when requested, stdout otherwise.
class OutputSink {
public:
    OutputSink(const std::optional<std::string>& path, std::ostream& fallback) : out_(&fallback) {
        if (path) {
            file_.open(*path);
            if (!file_) throw std::runtime_error("cannot open output file '" + *path + "'");
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

void write_summary_csv(std::ostream& out, const std::vector<std::uint64_t>& seeds,
                       const std::vector<RunSummary>& runs) {
    out << "seed,final_grad_norm,final_f_true,final_f_bar,total_calls,iterations,termination_reason\n";
    std::vector<double> grad, ftrue, fbar, calls, iters;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const RunSummary& r = runs[i];
        out << seeds[i] << ',' << num(r.final_grad_norm) << ',' << num(r.final_f_true) << ',' << num(r.final_f_bar)
            << ',' << r.total_calls << ',' << r.iterations << ',' << r.termination_reason << '\n';
        grad.push_back(r.final_grad_norm);
        ftrue.push_back(r.final_f_true);
        fbar.push_back(r.final_f_bar);
        calls.push_back(static_cast<double>(r.total_calls));
        iters.push_back(static_cast<double>(r.iterations));
    }
    for (const auto& [label, q] : {std::pair{"median", 0.5}, std::pair{"q25", 0.25}, std::pair{"q75", 0.75}}) {
        out << label << ',' << num(quantile(grad, q)) << ',' << num(quantile(ftrue, q)) << ','
            << num(quantile(fbar, q)) << ',' << num(quantile(calls, q)) << ',' << num(quantile(iters, q)) << ",\n";
    }
}

}  // namespace

ExperimentConfig resolve_run_config(const RunOptions& options) {
    ExperimentConfig cfg = load_experiment_config(options.config_path);
    for (const auto& kv : options.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigParseError(0, kv, "override must look like key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_setting(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (options.out_dir) cfg.output_dir = *options.out_dir;
    if (options.seeds) apply_setting(cfg, "seeds", *options.seeds);
    if (options.parallel) cfg.parallel = *options.parallel;
    cfg.validate();
    return cfg;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    try {
        cfg = resolve_run_config(options);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitParse;
    }

    TestProblem problem;
    try {
        problem = builtin_problems().make(cfg.problem, cfg.problem_options);
    } catch (const LookupError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUnknownProblem;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitParse;
    }
    const Point x0 = cfg.x0.value_or(problem.start);

    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    std::vector<RunSummary> summaries(cfg.seeds.size());
    std::vector<std::exception_ptr> failures(cfg.seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
            try {
                SolverConfig sc = cfg.solver;
                sc.seed = cfg.seeds[i];
                const RunResult res = run(problem, x0, sc);
                std::ofstream trace(dir / fmt::format("trace_{}.csv", sc.seed));
                write_trace_csv(trace, res.state.trace, problem.dimension);
                std::ofstream summary(dir / fmt::format("summary_{}.txt", sc.seed));
                write_summary_block(summary, res.summary);
                summaries[i] = res.summary;
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const int workers = std::max(1, std::min<int>(cfg.parallel, static_cast<int>(cfg.seeds.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (!failures[i]) continue;
        try {
            std::rethrow_exception(failures[i]);
        } catch (const std::exception& e) {
            err << "seed " << cfg.seeds[i] << " failed: " << e.what() << '\n';
        }
        return kExitFailure;
    }

    std::ofstream summary_csv(dir / "summary.csv");
    write_summary_csv(summary_csv, cfg.seeds, summaries);
    std::ofstream effective(dir / "effective_config.cfg");
    write_experiment_config(effective, cfg);
    out << "wrote " << cfg.seeds.size() << " trace(s) to " << dir.string() << '\n';
    return kExitOk;
}

int cmd_calibrate(const CalibrateOptions& o, std::ostream& out, std::ostream& err) {
    try {
        if (o.kind == "stopping") {
            std::vector<std::uint64_t> grid;
            for (const double v : parse_doubles(o.lambdas, "lambdas")) {
                if (!(v >= 2.0) || v != std::floor(v)) throw ConfigError("lambdas must be integers >= 2");
                grid.push_back(static_cast<std::uint64_t>(v));
            }
            if (o.reps < 100) throw ConfigError("reps must be >= 100");
            const NoiseModel noise{parse_noise_family(o.noise), o.sigma};
            const auto rows = calibrate_stopping(noise, o.kappa, o.delta, grid, o.reps, o.seed);
            OutputSink sink(o.out_file, out);
            auto& s = sink.stream();
            s << "lambda,mean_N,ratio_N,mean_sq_mean,ratio_msm,pass_N,pass_msm\n";
            for (const auto& r : rows) {
                const bool pass_n = std::abs(r.ratio_n - 1.0) <= o.ratio_n_tolerance;
                const bool pass_msm = r.ratio_msm >= o.msm_low && r.ratio_msm <= o.msm_high;
                s << num(r.lambda) << ',' << num(r.mean_n) << ',' << num(r.ratio_n) << ',' << num(r.mean_sq_mean)
                  << ',' << num(r.ratio_msm) << ',' << pass_n << ',' << pass_msm << '\n';
            }
            return kExitOk;
        }
        if (o.kind == "fully-linear") {
            ProblemOptions popt;
            popt.dimension = o.dim;
            popt.condition = o.condition;
            const TestProblem problem = builtin_problems().make(o.problem, popt);
            Point center = problem.start;
            if (o.center) {
                const auto c = parse_doubles(*o.center, "center");
                if (static_cast<int>(c.size()) != o.dim) throw ConfigError("center length does not match dim");
                center = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
            }
            const auto report =
                model_error_scaling(problem, center, parse_basis_kind(o.basis), parse_doubles(o.radii, "radii"));
            OutputSink sink(o.out_file, out);
            auto& s = sink.stream();
            s << "radius,max_error,scaled_error,spread,pass\n";
            const bool pass = report.spread <= o.max_spread;
            for (const auto& r : report.rows) {
                s << num(r.radius) << ',' << num(r.max_error) << ',' << num(r.scaled_error) << ','
                  << num(report.spread) << ',' << pass << '\n';
            }
            return kExitOk;
        }
        if (o.kind == "error-bound") {
            std::vector<int> dims;
            for (const double v : parse_doubles(o.dims, "dims")) dims.push_back(static_cast<int>(v));
            std::vector<BasisKind> kinds;
            for (const auto& b : split_list(o.bases)) kinds.push_back(parse_basis_kind(b));
            if (kinds.empty()) throw ConfigError("bases: empty list");
            const auto res = error_bound_trials(o.trials, dims, kinds, o.error_scale, o.probes, o.seed);
            OutputSink sink(o.out_file, out);
            auto& s = sink.stream();
            s << "trials,probes,violations,worst_ratio,max_lambda_hat,pass\n";
            s << res.trials << ',' << res.probes << ',' << res.violations << ',' << num(res.worst_ratio) << ','
              << num(res.max_lambda_hat) << ',' << (res.violations == 0) << '\n';
            return kExitOk;
        }
        err << "unknown calibration kind '" << o.kind << "' (expected stopping, fully-linear or error-bound)\n";
        return kExitParse;
    } catch (const LookupError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUnknownProblem;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitParse;
    }
}

std::vector<std::string> expand_glob(const std::string& pattern) {
    const fs::path p(pattern);
    const std::string name = p.filename().string();
    if (name.find_first_of("*?[") == std::string::npos) {
        if (fs::is_regular_file(p)) return {p.string()};
        return {};
    }
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const std::string fname = entry.path().filename().string();
        if (fnmatch(name.c_str(), fname.c_str(), 0) == 0) out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

int cmd_summarize(const SummarizeOptions& options, std::ostream& out, std::ostream& err) {
    std::vector<std::string> files;
    for (const auto& pattern : options.patterns) {
        for (auto& f : expand_glob(pattern)) files.push_back(std::move(f));
    }
    if (files.empty()) {
        err << "error: no trace files matched\n";
        return kExitNoTraces;
    }

    std::vector<std::vector<IterationRecord>> traces;
    int dimension = -1;
    for (const auto& f : files) {
        std::ifstream in(f);
        int d = 0;
        try {
            traces.push_back(read_trace_csv(in, d));
        } catch (const ConfigError& e) {
            err << f << ": " << e.what() << '\n';
            return kExitParse;
        }
        if (dimension >= 0 && d != dimension) {
            err << "error: dimension mismatch (" << f << " has d=" << d << ", expected " << dimension << ")\n";
            return kExitDimensionMismatch;
        }
        dimension = d;
    }

    std::uint64_t max_calls = 0;
    for (const auto& t : traces) {
        if (!t.empty()) max_calls = std::max(max_calls, t.back().cum_calls);
    }

    OutputSink sink(options.out_file, out);
    auto& s = sink.stream();
    s << "calls,n_traces,f_true_median,f_true_q25,f_true_q75,grad_median,grad_q25,grad_q75\n";
    for (std::uint64_t checkpoint = 100; checkpoint <= max_calls; checkpoint *= 10) {
        std::vector<double> f, g;
        for (const auto& t : traces) {
            // Last record that had spent no more than `checkpoint` calls.
            const IterationRecord* at = nullptr;
            for (const auto& r : t) {
                if (r.cum_calls > checkpoint) break;
                at = &r;
            }
            if (!at) continue;
            f.push_back(at->f_true);
            g.push_back(at->model_grad_norm);
        }
        s << checkpoint << ',' << f.size() << ',' << num(quantile(f, 0.5)) << ',' << num(quantile(f, 0.25)) << ','
          << num(quantile(f, 0.75)) << ',' << num(quantile(g, 0.5)) << ',' << num(quantile(g, 0.25)) << ','
          << num(quantile(g, 0.75)) << '\n';
    }
    return kExitOk;
}

}  // namespace astrodf::cli
